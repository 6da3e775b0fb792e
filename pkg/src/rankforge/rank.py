"""Exhaustive small-scale rank decisions with re-verifiable certificates.

A decomposition P = sum_j Q_j R_j is linear in the R_j once the Q_j are
fixed, so the search enumerates only the Q side and solves for the R side
exactly.  Q factors are normalized (first nonzero coefficient 1, graded-lex
coefficient order) and tuples are strictly increasing, which removes the
scaling and merging redundancy without losing any decomposition.  Searches
run r = 1, 2, ... and each r is either refuted exhaustively, witnessed by a
certificate, or abandoned on budget; the three outcomes are reported
separately.

The rank of a nonzero polynomial of degree <= 1 is an infinite sentinel
(such polynomials admit no factors of lower degree), never a large integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analytic import CharHistogram, histogram_of_poly
from .domain import box
from .errors import BudgetExceededError, InputError, VerificationError
from .gf import PrimeField
from .linalg import solve_mod
from .poly import AffineMap, MultilinearForm, MultiPoly, PolyFamily, multilinear_form
from .runtime import Budget


class InfiniteRank:
    """Sentinel for the infinite rank of nonzero affine polynomials."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "InfiniteRank"


INFINITE_RANK = InfiniteRank()


@dataclass(frozen=True)
class RankCertificate:
    """A decomposition witness; re-expands exactly to the decomposed object.

    For kind "schmidt", pairs is a list of (Q, R) polynomial factors.
    For kind "partition", pairs is a list of (J, Q, R) with J the block
    index set of Q (R lives on the complementary blocks).
    """

    kind: str
    pairs: tuple
    bound_provenance: str = ""

    def expand(self, field: PrimeField, n: int) -> MultiPoly:
        total = MultiPoly.zero(field, n)
        for entry in self.pairs:
            Q, R = entry[-2], entry[-1]
            total = total + Q * R
        return total

    def verify_schmidt(self, P: MultiPoly) -> None:
        d = P.degree()
        for Q, R in self.pairs:
            if Q.degree() >= d or R.degree() >= d:
                raise VerificationError("certificate factor degree too large")
        if self.expand(P.field, P.n) != P:
            raise VerificationError("certificate does not re-expand to the polynomial")

    def verify_partition(self, T: MultilinearForm) -> None:
        dims = T.block_dims
        offs = T.block_offsets()
        for J, Q, R in self.pairs:
            J = frozenset(J)
            if not J or J == frozenset(range(T.d)):
                raise VerificationError("bipartition must be proper and nonempty")
            for poly, blocks in ((Q, J), (R, frozenset(range(T.d)) - J)):
                for mono in poly.terms:
                    for b in range(T.d):
                        deg_b = sum(mono[offs[b] : offs[b] + dims[b]])
                        if deg_b != (1 if b in blocks else 0):
                            raise VerificationError("factor not multilinear on its blocks")
        if self.expand(T.field, T.poly.n) != T.poly:
            raise VerificationError("certificate does not re-expand to the tensor")


@dataclass(frozen=True)
class RankResult:
    value: int | None  # decided rank, None if not decided
    infinite: bool = False
    r_max: int = 0
    exceeded_at: int | None = None
    certificate: RankCertificate | None = None
    per_r: tuple[tuple[int, str], ...] = ()
    exhaustive: bool = True  # False when a restricted factor dictionary was used

    @property
    def decided(self) -> bool:
        return self.infinite or self.value is not None

    def display(self) -> str:
        if self.infinite:
            return "infinite"
        if self.value is not None:
            return str(self.value)
        if self.exceeded_at is not None:
            return f"budget exceeded at r={self.exceeded_at}"
        return f"> {self.r_max}"


# ---------------------------------------------------------------------------
# Normalized factor enumeration
# ---------------------------------------------------------------------------


def _monomials_upto(n: int, d: int) -> list[tuple[int, ...]]:
    monos = [m for m in itertools.product(range(d + 1), repeat=n) if sum(m) <= d]
    monos.sort(key=lambda m: (sum(m), m))
    return monos


def _normalized_vectors(q: int, length: int):
    """All length-`length` coefficient vectors with first nonzero entry 1,
    in deterministic lexicographic order."""
    for lead in range(length):
        for tail in itertools.product(range(q), repeat=length - lead - 1):
            vec = [0] * length
            vec[lead] = 1
            vec[lead + 1 :] = tail
            yield tuple(vec)


def _count_normalized(q: int, length: int) -> int:
    return (q**length - 1) // (q - 1) if q > 1 else length


def _poly_from_vec(field: PrimeField, n: int, monos, vec) -> MultiPoly:
    return MultiPoly(field, n, {m: c for m, c in zip(monos, vec) if c})


# ---------------------------------------------------------------------------
# Schmidt rank
# ---------------------------------------------------------------------------


def schmidt_rank(P: MultiPoly, r_max: int, budget: Budget | None = None) -> RankResult:
    """Minimal r with P = sum of r products of strictly lower-degree factors.

    Exhaustive for each r <= r_max; formal polynomial identity (no reduction
    by the field equation).
    """
    budget = budget or Budget()
    if P.is_zero():
        return RankResult(0, r_max=r_max, certificate=RankCertificate("schmidt", ()))
    d = P.degree()
    if d <= 1:
        return RankResult(None, infinite=True, r_max=r_max)
    field = P.field
    q = field.p
    n = P.n

    factor_monos = _monomials_upto(n, d - 1)
    M = len(factor_monos)
    product_monos = _monomials_upto(n, 2 * (d - 1))
    row_of = {m: i for i, m in enumerate(product_monos)}
    rows = len(product_monos)
    for m in P.terms:
        if m not in row_of:
            # degree-d monomial beyond factor products: impossible already
            return RankResult(None, r_max=r_max, per_r=tuple((r, "no") for r in range(1, r_max + 1)))

    target = np.zeros(rows, dtype=np.int64)
    for m, c in P.terms.items():
        target[row_of[m]] = c

    # Per-Q block of columns: coefficients of Q * (each factor monomial).
    qvecs = list(_normalized_vectors(q, M))
    blocks: list[np.ndarray] = []
    for vec in qvecs:
        B = np.zeros((rows, M), dtype=np.int64)
        for j, mono_r in enumerate(factor_monos):
            for mono_q, c in zip(factor_monos, vec):
                if c:
                    prod = tuple(a + b for a, b in zip(mono_q, mono_r))
                    B[row_of[prod], j] = (B[row_of[prod], j] + c) % q
        blocks.append(B)

    per_r: list[tuple[int, str]] = []
    for r in range(1, r_max + 1):
        tuples = math.comb(len(qvecs), r)
        try:
            budget.charge(tuples * rows * M * r, f"schmidt rank search at r={r}")
        except BudgetExceededError:
            if not per_r:
                raise
            # partial answers are honest: "rank <= r-1: no, r: abandoned"
            per_r.append((r, "budget"))
            return RankResult(None, r_max=r_max, exceeded_at=r, per_r=tuple(per_r))
        found = _search_products(field, n, r, qvecs, blocks, target, factor_monos)
        if found is not None:
            cert = found
            cert.verify_schmidt(P)
            per_r.append((r, "found"))
            return RankResult(r, r_max=r_max, certificate=cert, per_r=tuple(per_r))
        per_r.append((r, "no"))
    return RankResult(None, r_max=r_max, per_r=tuple(per_r))


def _search_products(field, n, r, qvecs, blocks, target, factor_monos):
    q = field.p
    M = len(factor_monos)
    for combo in itertools.combinations(range(len(qvecs)), r):
        A = np.concatenate([blocks[i] for i in combo], axis=1)
        x, _ = solve_mod(A, target, q, want_certificate=False)
        if x is None:
            continue
        pairs = []
        for slot, i in enumerate(combo):
            Q = _poly_from_vec(field, n, factor_monos, qvecs[i])
            R = _poly_from_vec(field, n, factor_monos, x[slot * M : (slot + 1) * M])
            pairs.append((Q, R))
        return RankCertificate("schmidt", tuple(pairs), f"exhausted r<{r}")
    return None


# ---------------------------------------------------------------------------
# Partition rank
# ---------------------------------------------------------------------------


def _block_monomials(dims: tuple[int, ...], offs: tuple[int, ...], blocks: frozenset[int]):
    """Multilinear monomials supported on the given blocks, in the full ring."""
    total = sum(dims)
    choices = [range(dims[b]) for b in sorted(blocks)]
    out = []
    for pick in itertools.product(*choices):
        e = [0] * total
        for b, v in zip(sorted(blocks), pick):
            e[offs[b] + v] = 1
        out.append(tuple(e))
    out.sort()
    return out


def partition_rank(
    T: MultilinearForm,
    r_max: int,
    budget: Budget | None = None,
    factor_dictionary: list[tuple[frozenset, MultiPoly]] | None = None,
) -> RankResult:
    """Minimal r with T = sum of r products Q_j R_j over proper bipartitions.

    Exhaustive unless a factor dictionary restricts the Q side, in which case
    the result is an upper-bound search only (exhaustive=False): a found
    certificate is still valid, but "not found" decides nothing.
    """
    budget = budget or Budget()
    if T.is_zero():
        return RankResult(0, r_max=r_max, certificate=RankCertificate("partition", ()))
    field = T.field
    q = field.p
    d = T.d
    if d < 2:
        raise InputError("partition rank needs at least two blocks")
    dims = T.block_dims
    offs = T.block_offsets()
    total_vars = sum(dims)

    tensor_monos = _block_monomials(dims, offs, frozenset(range(d)))
    row_of = {m: i for i, m in enumerate(tensor_monos)}
    rows = len(tensor_monos)
    target = np.zeros(rows, dtype=np.int64)
    for m, c in T.poly.terms.items():
        target[row_of[m]] = c

    # Candidate (J, Q) pairs; J always contains block 0 so each unordered
    # bipartition appears once.
    candidates: list[tuple[frozenset, MultiPoly]] = []
    exhaustive = factor_dictionary is None
    if factor_dictionary is not None:
        candidates = [(frozenset(J), Q) for J, Q in factor_dictionary]
    else:
        blocks_all = frozenset(range(d))
        for size in range(1, d):
            for J in itertools.combinations(range(1, d), size - 1):
                Jset = frozenset((0,) + J)
                if Jset == blocks_all:
                    continue
                monos_q = _block_monomials(dims, offs, Jset)
                for vec in _normalized_vectors(q, len(monos_q)):
                    Q = MultiPoly(field, total_vars, {m: c for m, c in zip(monos_q, vec) if c})
                    candidates.append((Jset, Q))

    # Precompute the column block for each candidate.
    blocks_arr: list[tuple[frozenset, MultiPoly, np.ndarray, list]] = []
    all_blocks = frozenset(range(d))
    for Jset, Q in candidates:
        comp = all_blocks - Jset
        monos_r = _block_monomials(dims, offs, comp)
        B = np.zeros((rows, len(monos_r)), dtype=np.int64)
        for j, mono_r in enumerate(monos_r):
            for mono_q, c in Q.terms.items():
                prod = tuple(a + b for a, b in zip(mono_q, mono_r))
                B[row_of[prod], j] = (B[row_of[prod], j] + c) % q
        blocks_arr.append((Jset, Q, B, monos_r))

    per_r: list[tuple[int, str]] = []
    for r in range(1, r_max + 1):
        tuples = math.comb(len(blocks_arr), r)
        try:
            budget.charge(tuples * rows * max(len(b[3]) for b in blocks_arr) * r, f"partition rank search at r={r}")
        except BudgetExceededError:
            if not per_r:
                raise
            per_r.append((r, "budget"))
            return RankResult(None, r_max=r_max, exceeded_at=r, per_r=tuple(per_r), exhaustive=exhaustive)
        for combo in itertools.combinations(range(len(blocks_arr)), r):
            A = np.concatenate([blocks_arr[i][2] for i in combo], axis=1)
            x, _ = solve_mod(A, target, q, want_certificate=False)
            if x is None:
                continue
            pairs = []
            pos = 0
            for i in combo:
                Jset, Q, B, monos_r = blocks_arr[i]
                width = len(monos_r)
                R = MultiPoly(field, total_vars, {m: int(c) for m, c in zip(monos_r, x[pos : pos + width]) if c})
                pairs.append((tuple(sorted(Jset)), Q, R))
                pos += width
            cert = RankCertificate("partition", tuple(pairs), f"exhausted r<{r}" if exhaustive else "dictionary search")
            cert.verify_partition(T)
            per_r.append((r, "found"))
            return RankResult(r if exhaustive else r, r_max=r_max, certificate=cert, per_r=tuple(per_r), exhaustive=exhaustive)
        per_r.append((r, "no"))
    return RankResult(None, r_max=r_max, per_r=tuple(per_r), exhaustive=exhaustive)


def invariant_factor_dictionary(T: MultilinearForm) -> list[tuple[frozenset, MultiPoly]]:
    """Coordinate-permutation-invariant factor candidates for upper-bound searches.

    For each proper bipartition J (0 in J), the Q candidates are all nonzero
    span combinations of products of power-sum tensors over set partitions of
    J, where the power sum over a block set B is sum_i prod_{b in B} x_{b,i}.
    Sound for upper bounds on symmetric tensors with equal block sizes.
    """
    field = T.field
    q = field.p
    d = T.d
    dims = T.block_dims
    if len(set(dims)) != 1:
        raise InputError("invariant dictionary needs equal block sizes")
    n = dims[0]
    offs = T.block_offsets()
    total = sum(dims)

    def power_sum(blocks: tuple[int, ...]) -> MultiPoly:
        terms = {}
        for i in range(n):
            e = [0] * total
            for b in blocks:
                e[offs[b] + i] = 1
            terms[tuple(e)] = 1
        return MultiPoly(field, total, terms)

    out: list[tuple[frozenset, MultiPoly]] = []
    for size in range(1, d):
        for J in itertools.combinations(range(1, d), size - 1):
            Jset = frozenset((0,) + J)
            parts = list(_set_partitions(sorted(Jset)))
            basis = []
            for part in parts:
                Q = MultiPoly.constant(field, total, 1)
                for blockset in part:
                    Q = Q * power_sum(tuple(blockset))
                basis.append(Q)
            for coeffs in itertools.product(range(q), repeat=len(basis)):
                if not any(coeffs):
                    continue
                Q = MultiPoly.zero(field, total)
                for c, b in zip(coeffs, basis):
                    if c:
                        Q = Q + b.scale(c)
                if not Q.is_zero():
                    out.append((Jset, Q))
    return out


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


# ---------------------------------------------------------------------------
# nc-rank and family rank
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NcRankResult:
    schmidt: RankResult  # rank of the d-fold difference form as a polynomial
    partition: RankResult  # partition rank of the same form, reported alongside

    def display(self) -> str:
        return f"nc-rank {self.schmidt.display()} (partition rank {self.partition.display()})"


def nc_rank(P: MultiPoly, r_max: int, budget: Budget | None = None) -> NcRankResult:
    """Rank of the order-(deg P) difference form of P, in d*n variables."""
    if P.is_zero():
        zero = RankResult(0, r_max=r_max)
        return NcRankResult(zero, zero)
    if P.degree() <= 1:
        inf = RankResult(None, infinite=True, r_max=r_max)
        return NcRankResult(inf, inf)
    form = multilinear_form(P)
    if form.is_zero():
        zero = RankResult(0, r_max=r_max)
        return NcRankResult(zero, zero)
    return NcRankResult(
        schmidt_rank(form.poly, r_max, budget),
        partition_rank(form, r_max, budget),
    )


@dataclass(frozen=True)
class FamilyRankResult:
    value: int | None
    infinite: bool
    span_dependent: bool  # True when the members are linearly dependent
    witness: tuple[int, ...] | None  # combination attaining the minimum
    combination_results: tuple[tuple[tuple[int, ...], RankResult], ...]

    def display(self) -> str:
        if self.infinite:
            return "infinite"
        return str(self.value) if self.value is not None else "undecided"


def family_rank(family: PolyFamily, r_max: int, budget: Budget | None = None) -> FamilyRankResult:
    """Minimal Schmidt rank over all nonzero combinations (projective reps)."""
    budget = budget or Budget()
    q = family.field.p
    dependent = not family.is_independent()
    results = []
    best: int | None = None
    best_witness = None
    all_infinite = True
    for coeffs in _normalized_vectors(q, family.c):
        combo = family.combination(coeffs)
        res = schmidt_rank(combo, r_max, budget)
        results.append((coeffs, res))
        if not res.infinite:
            all_infinite = False
        if res.value is not None and (best is None or res.value < best):
            best = res.value
            best_witness = coeffs
    return FamilyRankResult(best, all_infinite, dependent, best_witness, tuple(results))


# ---------------------------------------------------------------------------
# Bias-derived partition rank lower bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BiasPrankBound:
    """Largest r with |E e_p(T)| < q^{-r}; guarantees prank(T) > r for T != 0.

    The bias and the partition rank refer to the same tensor over the same
    domain; mixing the full polarization of a polynomial with a compressed
    block form of it produces nonsense, so don't.
    For the zero tensor the bound degenerates to 0 with no guarantee.
    """

    bound: int
    bias_value: Fraction
    zero_form: bool
    histogram: CharHistogram

    @property
    def guarantees(self) -> str:
        if self.zero_form:
            return "none (zero tensor)"
        return f"partition rank > {self.bound}"


def prank_lower_bound_from_bias(T: MultilinearForm, budget: Budget | None = None) -> BiasPrankBound:
    hist = histogram_of_poly(T.poly, budget)
    val = hist.char_sum_rational()
    if val is None:
        raise VerificationError("multilinear form histogram must be uniform off zero")
    bias_fr = Fraction(val, hist.domain_size)
    if bias_fr < 0:
        raise VerificationError("multilinear form bias must be nonnegative")
    q = T.field.p
    if bias_fr == 1:
        return BiasPrankBound(0, bias_fr, True, hist)
    r = 0
    while bias_fr < Fraction(1, q ** (r + 1)):
        r += 1
    return BiasPrankBound(r, bias_fr, False, hist)


# ---------------------------------------------------------------------------
# Rank axioms on instances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    status: str  # "ok" | "violated" | "untested"
    detail: str = ""


@dataclass(frozen=True)
class RankAxiomReport:
    checks: tuple[AxiomCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.status != "violated" for c in self.checks)


def _rank_value(res: RankResult):
    if res.infinite:
        return INFINITE_RANK
    return res.value


def check_rank_axioms(
    P: MultiPoly,
    r_max: int,
    subspace: AffineMap | None = None,
    phi: AffineMap | None = None,
    budget: Budget | None = None,
) -> RankAxiomReport:
    """Instance checks: restriction drop vs codimension, invariance under an
    invertible affine substitution, and the partition/Schmidt sandwich on the
    difference form.  Budget refusals surface as "untested", never failures.
    """
    from .errors import BudgetExceededError

    budget = budget or Budget()
    checks: list[AxiomCheck] = []

    try:
        base = schmidt_rank(P, r_max, budget)
    except BudgetExceededError as exc:
        names = []
        if subspace is not None:
            names.append("subspace-drop")
        if phi is not None:
            names.append("affine-invariance")
        if P.degree() >= 2:
            names.append("schmidt-partition-sandwich")
        return RankAxiomReport(tuple(AxiomCheck(n, "untested", str(exc)) for n in names))

    if subspace is not None:
        try:
            restricted = schmidt_rank(P.compose(subspace), r_max, budget)
            codim = subspace.n_out - subspace.n_in
            if base.value is not None and restricted.value is not None:
                ok = restricted.value >= base.value - codim
                checks.append(
                    AxiomCheck(
                        "subspace-drop",
                        "ok" if ok else "violated",
                        f"rank {restricted.value} >= {base.value} - {codim}",
                    )
                )
            else:
                checks.append(AxiomCheck("subspace-drop", "untested", "rank undecided"))
        except BudgetExceededError as exc:
            checks.append(AxiomCheck("subspace-drop", "untested", str(exc)))

    if phi is not None:
        if phi.n_in != phi.n_out:
            raise InputError("invariance check needs an invertible (square) map")
        try:
            moved = schmidt_rank(P.compose(phi), r_max, budget)
            if base.decided and moved.decided:
                ok = _rank_value(base) is _rank_value(moved) or _rank_value(base) == _rank_value(moved)
                checks.append(
                    AxiomCheck(
                        "affine-invariance",
                        "ok" if ok else "violated",
                        f"{base.display()} vs {moved.display()}",
                    )
                )
            else:
                checks.append(AxiomCheck("affine-invariance", "untested", "rank undecided"))
        except BudgetExceededError as exc:
            checks.append(AxiomCheck("affine-invariance", "untested", str(exc)))

    if P.degree() >= 2:
        try:
            form = multilinear_form(P)
            if form.is_zero():
                checks.append(AxiomCheck("schmidt-partition-sandwich", "ok", "zero form"))
            else:
                r_form = schmidt_rank(form.poly, r_max, budget)
                pr_form = partition_rank(form, r_max, budget)
                if r_form.value is not None and pr_form.value is not None:
                    d = P.degree()
                    ok = r_form.value <= pr_form.value <= (4**d) * r_form.value
                    checks.append(
                        AxiomCheck(
                            "schmidt-partition-sandwich",
                            "ok" if ok else "violated",
                            f"r={r_form.value}, pr={pr_form.value}, 4^d r={(4 ** d) * r_form.value}",
                        )
                    )
                else:
                    checks.append(AxiomCheck("schmidt-partition-sandwich", "untested", "rank undecided"))
        except BudgetExceededError as exc:
            checks.append(AxiomCheck("schmidt-partition-sandwich", "untested", str(exc)))

    return RankAxiomReport(tuple(checks))
