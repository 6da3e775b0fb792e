"""Exact character sums: bias, Gowers uniformity norms, analytic rank, and
value equidistribution.

No complex number enters any computation.  A sum of additive-character values
sum_x e_p(f(x)) is stored as the integer histogram N_k = #{x : f(x) = k}.
Such a sum is a cyclotomic integer sum_k N_k zeta^k; it is rational exactly
when N_1 = ... = N_{p-1}, in which case it equals N_0 - N_1 (the minimal
polynomial 1 + zeta + ... + zeta^{p-1} = 0 collapses the tail).  Squared
magnitudes |sum_x e_p(f(x))|^2 expand the same way through the circular
autocorrelation of the histogram.  Whenever the tail does not collapse the
histogram itself is the stored truth and floats are presentation only.

Multilinear forms have histograms that are uniform off zero (scaling any one
block permutes fibers), so every Gowers norm computed through the d-fold
difference form is an exact rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .domain import box
from .errors import InputError, VerificationError
from .gf import PrimeField
from .poly import MultilinearForm, MultiPoly, PolyFamily, multilinear_form
from .runtime import SERIAL, Budget, ParallelContext


@dataclass(frozen=True)
class CharHistogram:
    """Exact counts of a k-valued expression over an enumerated domain."""

    p: int
    counts: tuple[int, ...]
    domain_size: int

    def __post_init__(self):
        if len(self.counts) != self.p:
            raise InputError("histogram length must equal the modulus")
        if sum(self.counts) != self.domain_size:
            raise InputError("histogram counts do not sum to the domain size")

    @staticmethod
    def from_counts(p: int, counts) -> "CharHistogram":
        counts = tuple(int(c) for c in counts)
        return CharHistogram(p, counts, sum(counts))

    def merge(self, other: "CharHistogram") -> "CharHistogram":
        if other.p != self.p:
            raise InputError("modulus mismatch")
        return CharHistogram(
            self.p,
            tuple(a + b for a, b in zip(self.counts, other.counts)),
            self.domain_size + other.domain_size,
        )

    # -- exact extraction -------------------------------------------------------

    def char_sum_rational(self) -> Fraction | None:
        """sum_k N_k zeta^k as a rational, or None if it is irrational."""
        tail = self.counts[1:]
        if all(t == tail[0] for t in tail):
            return Fraction(self.counts[0] - self.counts[1], 1) if self.p > 1 else Fraction(self.counts[0])
        return None

    def autocorrelation(self) -> tuple[int, ...]:
        """w_k = sum_a N_a N_{a-k}; the cyclotomic expansion of |sum e_p|^2."""
        p = self.p
        c = self.counts
        return tuple(sum(c[a] * c[(a - k) % p] for a in range(p)) for k in range(p))

    def magnitude_squared(self) -> Fraction | None:
        """|E e_p|^2 as an exact rational (normalized), or None if irrational."""
        w = self.autocorrelation()
        tail = w[1:]
        if tail and not all(t == tail[0] for t in tail):
            return None
        num = w[0] - (w[1] if self.p > 1 else 0)
        return Fraction(num, self.domain_size**2)

    def magnitude_squared_float(self) -> float:
        w = self.autocorrelation()
        val = sum(wk * math.cos(2 * math.pi * k / self.p) for k, wk in enumerate(w))
        return val / self.domain_size**2


@dataclass(frozen=True)
class ExactMagnitude:
    """|E e_p(f)| over a domain, stored exactly.

    mag_sq is the exact rational |E|^2 when the cyclotomic expansion
    collapses; otherwise None, with the histogram as the stored truth.
    """

    histogram: CharHistogram
    mag_sq: Fraction | None

    @staticmethod
    def from_histogram(hist: CharHistogram) -> "ExactMagnitude":
        return ExactMagnitude(hist, hist.magnitude_squared())

    @property
    def float_view(self) -> float:
        if self.mag_sq is not None:
            return math.sqrt(float(self.mag_sq))
        return math.sqrt(max(self.histogram.magnitude_squared_float(), 0.0))

    def magnitude_exact(self) -> Fraction | None:
        """|E| itself when it is rational (mag_sq a perfect rational square)."""
        if self.mag_sq is None:
            return None
        num, den = self.mag_sq.numerator, self.mag_sq.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
        return None


# ---------------------------------------------------------------------------
# Histogram builders
# ---------------------------------------------------------------------------


def histogram_of_poly(
    P: MultiPoly,
    budget: Budget | None = None,
    ctx: ParallelContext = SERIAL,
) -> CharHistogram:
    """Histogram of P over all of k^n, chunked deterministically."""
    field = P.field
    b = box(field, P.n)
    (budget or Budget()).charge(b.size, "histogram enumeration")
    p = field.p

    def chunk(lo: int, hi: int):
        vals = b.eval_poly(P, np.arange(lo, hi, dtype=np.int64))
        return np.bincount(vals, minlength=p)

    parts = ctx.map_chunks(chunk, b.size)
    total = np.zeros(p, dtype=np.int64)
    for part in parts:
        total += part
    return CharHistogram.from_counts(p, total)


def bias(P: MultiPoly, budget: Budget | None = None, ctx: ParallelContext = SERIAL) -> ExactMagnitude:
    """|E_{x in k^n} e_p(P(x))| as an exact magnitude."""
    return ExactMagnitude.from_histogram(histogram_of_poly(P, budget, ctx))


# ---------------------------------------------------------------------------
# Gowers norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GowersNorm:
    """The U_d norm of e_p(P), held as its exact 2^d-th power."""

    d: int
    histogram: CharHistogram  # histogram of the d-fold difference form over V^d
    norm_pow: Fraction  # ||e_p(P)||_{U_d}^{2^d}, exact

    @property
    def norm_float(self) -> float:
        return float(norm_root_float(self.norm_pow, self.d))


def norm_root_float(norm_pow: Fraction, d: int) -> float:
    return float(norm_pow) ** (1.0 / (1 << d))


def gowers_norm(
    P: MultiPoly,
    d: int,
    budget: Budget | None = None,
    ctx: ParallelContext = SERIAL,
) -> GowersNorm:
    """U_d norm of e_p(P) for d >= deg P, through the difference-form histogram.

    ||e_p(P)||^{2^d} = |E over direction tuples of e_p of the order-d form|;
    the form's histogram is uniform away from zero, so the value is the exact
    rational (N_0 - N_1) / q^{nd}.
    """
    if P.degree() > d:
        raise InputError(
            f"gowers_norm requires d >= deg P (got d={d}, deg={P.degree()}); "
            "use gowers_norm_direct for the experimental low-order path"
        )
    field = P.field
    n = P.n
    (budget or Budget()).charge(field.p ** (n * d), "difference-form histogram")
    form = multilinear_form(P, d) if d >= 1 else None
    if form is None or form.is_zero():
        hist = CharHistogram.from_counts(
            field.p, [field.p ** (n * d)] + [0] * (field.p - 1)
        )
        return GowersNorm(d, hist, Fraction(1))
    hist = histogram_of_poly(form.poly, budget, ctx)
    val = hist.char_sum_rational()
    if val is None:
        raise VerificationError("difference-form histogram is not uniform off zero")
    norm_pow = Fraction(val, hist.domain_size)
    if norm_pow < 0:
        raise VerificationError("negative Gowers norm power")
    return GowersNorm(d, hist, norm_pow)


@dataclass(frozen=True)
class DirectGowersValue:
    d: int
    histogram: CharHistogram  # of the signed cube sum over V^{d+1}
    value: Fraction | None  # rational value of the norm power, when it collapses

    @property
    def float_view(self) -> float:
        if self.value is not None:
            return float(self.value)
        h = self.histogram
        return sum(
            nk * math.cos(2 * math.pi * k / h.p) for k, nk in enumerate(h.counts)
        ) / h.domain_size


def gowers_norm_direct(
    P: MultiPoly,
    d: int,
    budget: Budget | None = None,
    ctx: ParallelContext = SERIAL,
) -> DirectGowersValue:
    """U_d norm power straight from the definition, enumerating (x, v_1..v_d).

    Cross-validation path; also runs for d < deg P (experimental), where the
    value may be a genuinely irrational cyclotomic number.
    """
    field = P.field
    p = field.p
    n = P.n
    N = n * (d + 1)
    (budget or Budget()).charge(p**N * (1 << d), "direct Gowers enumeration")
    bbig = box(field, N)

    sign_of = [(-1) ** bin(omega).count("1") for omega in range(1 << d)]

    def chunk(lo: int, hi: int):
        D = bbig.digits()[lo:hi]
        x = D[:, :n]
        total = np.zeros(hi - lo, dtype=np.int64)
        bsmall = box(field, n)
        for omega in range(1 << d):
            coords = x.copy()
            for k in range(d):
                if omega >> k & 1:
                    coords = coords + D[:, (k + 1) * n : (k + 2) * n]
            coords %= p
            vals = bsmall.eval_poly(P, bsmall.encode(coords))
            total = (total + sign_of[omega] * vals) % p
        return np.bincount(total, minlength=p)

    parts = ctx.map_chunks(chunk, bbig.size)
    counts = np.zeros(p, dtype=np.int64)
    for part in parts:
        counts += part
    hist = CharHistogram.from_counts(p, counts)
    val = hist.char_sum_rational()
    if val is not None:
        val = Fraction(val, hist.domain_size)
    return DirectGowersValue(d, hist, val)


@dataclass(frozen=True)
class AnalyticRank:
    d: int
    norm: GowersNorm
    exact: Fraction | None  # -log_q of the norm, when the power is an exact power of q
    approx: float

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"AnalyticRank({self.exact})"
        return f"AnalyticRank(~{self.approx:.6g})"


def analytic_rank(
    P: MultiPoly,
    d: int,
    budget: Budget | None = None,
    ctx: ParallelContext = SERIAL,
) -> AnalyticRank:
    """arank = -log_q ||e_p(P)||_{U_d}, symbolic when the norm is a power of q."""
    gn = gowers_norm(P, d, budget, ctx)
    q = P.field.p
    exact = None
    if gn.norm_pow > 0:
        num, den = gn.norm_pow.numerator, gn.norm_pow.denominator
        if num == 1:
            t = _exact_log(den, q)
            if t is not None:
                exact = Fraction(t, 1 << d)
        elif den == 1:
            t = _exact_log(num, q)
            if t is not None:
                exact = Fraction(-t, 1 << d)
    if gn.norm_pow == 0:
        approx = math.inf
    else:
        approx = -math.log(float(gn.norm_pow), q) / (1 << d)
    if exact is not None and exact < 0:
        raise VerificationError("negative analytic rank")
    return AnalyticRank(d, gn, exact, approx)


def _exact_log(value: int, base: int) -> int | None:
    if value < 1:
        return None
    t = 0
    while value % base == 0:
        value //= base
        t += 1
    return t if value == 1 else None


# ---------------------------------------------------------------------------
# Value distribution of a family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueDistribution:
    family_size: int  # c
    p: int
    counts: tuple[int, ...]  # indexed by the value tuple, row-major over k^c
    domain_size: int
    epsilon: Fraction  # max_b |q^c count(b) - q^n| / q^n

    def count_of(self, b: tuple[int, ...]) -> int:
        idx = 0
        for v in b:
            idx = idx * self.p + (v % self.p)
        return self.counts[idx]


def value_distribution(
    family: PolyFamily,
    budget: Budget | None = None,
    ctx: ParallelContext = SERIAL,
) -> ValueDistribution:
    """Exact fiber counts of the map x -> (P_1(x), ..., P_c(x)) on k^n."""
    field = family.field
    p = field.p
    n = family.n
    c = family.c
    b = box(field, n)
    (budget or Budget()).charge(b.size * c, "value distribution enumeration")

    def chunk(lo: int, hi: int):
        idxs = np.arange(lo, hi, dtype=np.int64)
        key = np.zeros(hi - lo, dtype=np.int64)
        for P in family:
            key = key * p + b.eval_poly(P, idxs)
        return np.bincount(key, minlength=p**c)

    parts = ctx.map_chunks(chunk, b.size)
    counts = np.zeros(p**c, dtype=np.int64)
    for part in parts:
        counts += part
    total = p**n
    qc = p**c
    eps = max(Fraction(abs(int(cnt) * qc - total), total) for cnt in counts)
    return ValueDistribution(c, p, tuple(int(x) for x in counts), total, eps)


def count_points_char_sum(
    family: PolyFamily,
    b_target: tuple[int, ...],
    budget: Budget | None = None,
    ctx: ParallelContext = SERIAL,
) -> int:
    """|{x : P_i(x) = b_i for all i}| via the full character-sum identity.

    Enumerates the (a, x) double sum q^{-c} sum_a sum_x e_p(sum_i a_i (P_i(x)-b_i))
    as one histogram; the cyclotomic tail must cancel exactly, which is itself
    a consistency check.
    """
    field = family.field
    p = field.p
    n = family.n
    c = family.c
    if len(b_target) != c:
        raise InputError("target tuple length must equal the family size")
    bx = box(field, n)
    (budget or Budget()).charge(bx.size * p**c, "character-sum point count")
    vals = [bx.eval_poly(P) for P in family]
    shifted = [(v - (t % p)) % p for v, t in zip(vals, b_target)]
    counts = np.zeros(p, dtype=np.int64)
    abox = box(field, c)
    for a_idx in range(p**c):
        a = abox.point_of(a_idx)
        combo = np.zeros(bx.size, dtype=np.int64)
        for ai, sv in zip(a, shifted):
            if ai:
                combo = (combo + ai * sv) % p
        counts += np.bincount(combo, minlength=p)
    hist = CharHistogram.from_counts(p, counts)
    val = hist.char_sum_rational()
    if val is None:
        raise VerificationError("character-sum point count did not collapse to a rational")
    qc = p**c
    if val % qc != 0:
        raise VerificationError("character-sum point count is not divisible by q^c")
    result = int(val) // qc
    if result < 0:
        raise VerificationError("negative point count")
    return result
