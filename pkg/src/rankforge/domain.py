"""Vectorized enumeration of the box k^n.

Points of F_p^n are identified with integers in [0, p^n) in row-major order
(first coordinate most significant), which agrees with lexicographic order
on coordinate tuples.  A Box carries the digit table for the whole space and
vectorized evaluation of sparse polynomials; these are the inner loops of
every histogram and every subspace scan, so they run on int64 numpy arrays
with arithmetic kept exactly in [0, p).
"""

from __future__ import annotations

import itertools

import numpy as np

from .gf import PrimeField
from .poly import MultiPoly, Point


class Box:
    """The enumerated cube F_p^n."""

    def __init__(self, field: PrimeField, n: int):
        self.field = field
        self.n = n
        self.size = field.p**n
        self._digits: np.ndarray | None = None
        self._places = np.array(
            [field.p ** (n - 1 - i) for i in range(n)], dtype=np.int64
        )

    def digits(self) -> np.ndarray:
        """(size, n) array of coordinates; row i is the point with index i."""
        if self._digits is None:
            p, n = self.field.p, self.n
            idx = np.arange(self.size, dtype=np.int64)
            D = np.empty((self.size, n), dtype=np.int64)
            for i in range(n):
                D[:, i] = (idx // self._places[i]) % p
            self._digits = D
        return self._digits

    def encode(self, coords: np.ndarray) -> np.ndarray:
        """Map an (..., n) coordinate array to point indices."""
        return (np.asarray(coords, dtype=np.int64) % self.field.p) @ self._places

    def index_of(self, point: Point) -> int:
        return int(sum(int(x) % self.field.p * pl for x, pl in zip(point, self._places)))

    def point_of(self, index: int) -> Point:
        p = self.field.p
        return tuple(int(index // pl) % p for pl in self._places)

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Pointwise group addition of two index arrays."""
        D = self.digits()
        return self.encode(D[a] + D[b])

    def translate(self, indices: np.ndarray, h: Point) -> np.ndarray:
        D = self.digits()
        hv = np.array(h, dtype=np.int64) % self.field.p
        return self.encode(D[indices] + hv)

    def eval_poly(self, P: MultiPoly, indices: np.ndarray | None = None) -> np.ndarray:
        """Values of P at the given indices (default: the whole box)."""
        p = self.field.p
        D = self.digits() if indices is None else self.digits()[indices]
        m = D.shape[0]
        out = np.zeros(m, dtype=np.int64)
        pow_cache: dict[tuple[int, int], np.ndarray] = {}
        for mono, c in P.terms.items():
            t = np.full(m, c, dtype=np.int64)
            for i, e in enumerate(mono):
                if e:
                    key = (i, e)
                    if key not in pow_cache:
                        col = D[:, i]
                        acc = np.ones(m, dtype=np.int64)
                        base = col % p
                        ee = e
                        while ee:
                            if ee & 1:
                                acc = (acc * base) % p
                            base = (base * base) % p
                            ee >>= 1
                        pow_cache[key] = acc
                    t = (t * pow_cache[key]) % p
            out = (out + t) % p
        return out

    def subspace_points(self, base: Point, basis: np.ndarray) -> np.ndarray:
        """Indices of base + span(basis rows), enumerated over all q^m parameters.

        Parameter tuples run in row-major order, so position
        sum_i t_i q^(m-1-i) holds the point base + sum_i t_i basis[i].
        """
        p = self.field.p
        m = basis.shape[0] if basis.size else 0
        params = np.array(list(itertools.product(range(p), repeat=m)), dtype=np.int64)
        coords = (params @ (np.asarray(basis, dtype=np.int64) % p) + np.array(base, dtype=np.int64)) % p
        return self.encode(coords)


_BOX_CACHE: dict[tuple[int, int], Box] = {}


def box(field: PrimeField, n: int) -> Box:
    key = (field.p, n)
    if key not in _BOX_CACHE:
        _BOX_CACHE[key] = Box(field, n)
    return _BOX_CACHE[key]
