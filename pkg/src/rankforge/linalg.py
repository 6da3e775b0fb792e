"""Exact dense linear algebra over F_p on int64 numpy arrays.

All entries stay in [0, p) between operations; p < 2^31 keeps every
intermediate product inside int64, so results are exact.  Elimination is
plain Gauss-Jordan with the first nonzero entry as pivot, which makes every
routine deterministic.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

# Row-operation tracking for infeasibility certificates is quadratic in the
# row count; above this many rows we skip the certificate.
CERTIFICATE_ROW_LIMIT = 4096


def as_mod_array(A, p: int) -> np.ndarray:
    M = np.asarray(A, dtype=np.int64) % p
    if M.ndim != 2:
        raise InputError("expected a 2-d array")
    return M


def rref_mod(A, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form; returns (R, pivot_columns, rank)."""
    M = as_mod_array(A, p).copy()
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        touched = np.nonzero(col)[0]
        if touched.size:
            M[touched] = (M[touched] - np.outer(col[touched], M[r])) % p
        pivots.append(c)
        r += 1
    return M, pivots, r


def rank_mod(A, p: int) -> int:
    return rref_mod(A, p)[2]


def nullspace_mod(A, p: int) -> np.ndarray:
    """Basis of the right nullspace, one vector per row; shape (dim, cols)."""
    M, pivots, rank = rref_mod(A, p)
    cols = M.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for j, pc in enumerate(pivots):
            basis[k, pc] = (-int(M[j, f])) % p
    return basis


def inv_mod(A, p: int) -> np.ndarray:
    M = as_mod_array(A, p)
    n = M.shape[0]
    if M.shape[1] != n:
        raise InputError("matrix is not square")
    aug = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    R, pivots, rank = rref_mod(aug, p)
    if rank < n or pivots[:n] != list(range(n)):
        raise InputError("matrix is singular mod p")
    return R[:, n:]


def solve_mod(A, b, p: int, want_certificate: bool = True):
    """Solve A x = b over F_p.

    Returns (x, None) for a solution (free variables set to 0), or
    (None, y) where y is a dual certificate with y.A = 0 and y.b != 0.
    The certificate is omitted (None) for very tall systems.
    """
    M = as_mod_array(A, p)
    rows, cols = M.shape
    bv = np.asarray(b, dtype=np.int64).reshape(-1) % p
    if bv.shape[0] != rows:
        raise InputError("right-hand side length mismatch")
    track = want_certificate and rows <= CERTIFICATE_ROW_LIMIT
    if track:
        aug = np.concatenate([M, bv[:, None], np.eye(rows, dtype=np.int64)], axis=1)
    else:
        aug = np.concatenate([M, bv[:, None]], axis=1)
    R, pivots, _ = rref_mod(aug, p)
    bad = [j for j, c in enumerate(pivots) if c == cols]
    if bad:
        j = bad[0]
        cert = R[j, cols + 1 :].copy() if track else None
        return None, cert
    x = np.zeros(cols, dtype=np.int64)
    for j, c in enumerate(pivots):
        if c < cols:
            x[c] = R[j, cols]
    return x, None


def row_space_contains(A, v, p: int) -> bool:
    """Whether v lies in the row space of A (exact rank comparison)."""
    M = as_mod_array(A, p)
    vv = np.asarray(v, dtype=np.int64).reshape(1, -1) % p
    if vv.shape[1] != M.shape[1]:
        raise InputError("vector length mismatch")
    return rank_mod(np.concatenate([M, vv]), p) == rank_mod(M, p)


def row_space_leq(A, B, p: int) -> bool:
    """Whether rowspace(A) is contained in rowspace(B)."""
    A = as_mod_array(A, p)
    B = as_mod_array(B, p)
    if A.shape[1] != B.shape[1]:
        raise InputError("column count mismatch")
    rb = rank_mod(B, p)
    return rank_mod(np.concatenate([B, A]), p) == rb
