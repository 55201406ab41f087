import numpy as np
import pytest

from siegel3.fields import gf3m
from siegel3.linalg import nullspace, rank, rref, solve, solve_unique


@pytest.mark.parametrize("seed", range(10))
def test_rank_nullity_over_gf3(seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, 3, (6, 9))
    M[3] = (M[0] + 2 * M[1]) % 3
    N = nullspace(M, 3)
    assert rank(M, 3) + len(N) == 9
    assert not ((M @ N.T) % 3).any()
    assert rank(M, 3) <= 5


def test_rref_shape():
    M = np.array([[0, 2, 1], [0, 1, 2], [1, 0, 0]])
    R, piv = rref(M, 3)
    assert list(piv) == [0, 1]
    assert R[0].tolist() == [1, 0, 0]
    assert R[1].tolist() == [0, 1, 2]


def test_solve_over_extension():
    F = gf3m(8)
    rng = np.random.default_rng(4)
    A = F.random(rng, (12, 5))
    x = F.random(rng, 5)
    b = np.zeros(12, dtype=np.int64)
    for j in range(5):
        b = F.vadd(b, F.vmul(A[:, j], np.full(12, x[j])))
    got, full = solve_unique(A, b, F)
    assert full
    assert got.tolist() == x.tolist()


def test_solve_inconsistent():
    A = np.array([[1, 0], [1, 0]])
    assert solve(A, np.array([1, 2]), 3) is None
    assert solve(A, np.array([2, 2]), 3) is not None
