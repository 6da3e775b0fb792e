import numpy as np
import pytest

from rankforge.errors import InputError
from rankforge.linalg import (
    inv_mod,
    nullspace_mod,
    rank_mod,
    row_space_contains,
    row_space_leq,
    rref_mod,
    solve_mod,
)


def test_rref_and_rank():
    A = np.array([[2, 4], [1, 2]], dtype=np.int64)
    R, pivots, rank = rref_mod(A, 5)
    assert rank == 1 and pivots == [0]
    assert np.array_equal(R[0], np.array([1, 2]))


def test_inverse_roundtrip():
    rng = np.random.RandomState(0)
    for p in (2, 3, 7):
        for _ in range(10):
            A = rng.randint(0, p, (4, 4)).astype(np.int64)
            if rank_mod(A, p) < 4:
                continue
            Ainv = inv_mod(A, p)
            assert np.array_equal((A @ Ainv) % p, np.eye(4, dtype=np.int64))


def test_inverse_singular_raises():
    with pytest.raises(InputError):
        inv_mod(np.zeros((2, 2), dtype=np.int64), 3)


def test_nullspace():
    A = np.array([[1, 1, 0], [0, 0, 1]], dtype=np.int64)
    N = nullspace_mod(A, 3)
    assert N.shape[0] == 1
    assert np.all((A @ N.T) % 3 == 0)


def test_solve_feasible():
    A = np.array([[1, 2], [3, 4]], dtype=np.int64)
    b = np.array([1, 0], dtype=np.int64)
    x, cert = solve_mod(A, b, 5)
    assert cert is None
    assert np.array_equal((A @ x) % 5, b)


def test_solve_infeasible_with_certificate():
    # rows conflict: x = 1 and x = 2
    A = np.array([[1], [1]], dtype=np.int64)
    b = np.array([1, 2], dtype=np.int64)
    x, cert = solve_mod(A, b, 5)
    assert x is None and cert is not None
    assert np.all((cert @ A) % 5 == 0)
    assert int(cert @ b) % 5 != 0


def test_row_space_predicates():
    A = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.int64)
    assert row_space_contains(A, [1, 1, 2], 3)
    assert not row_space_contains(A, [0, 0, 1], 3)
    B = np.array([[1, 0, 1]], dtype=np.int64)
    assert row_space_leq(B, A, 3)
    assert not row_space_leq(A, B, 3)


def test_random_solve_consistency():
    rng = np.random.RandomState(7)
    for p in (2, 3, 7):
        for _ in range(25):
            A = rng.randint(0, p, (6, 4)).astype(np.int64)
            xtrue = rng.randint(0, p, 4).astype(np.int64)
            b = (A @ xtrue) % p
            x, cert = solve_mod(A, b, p)
            assert x is not None
            assert np.array_equal((A @ x) % p, b)
