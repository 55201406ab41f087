"""Dense Gaussian elimination over GF(p) and GF(p^m).

Matrices are numpy int64 arrays of reduced residues (or encoded extension
field elements).  Elimination only touches rows with a nonzero entry in the
pivot column, so sparse systems stay cheap until fill-in sets in.
"""

from __future__ import annotations

import numpy as np

from .fields import ExtensionField


class _PrimeOps:
    def __init__(self, p):
        self.p = p

    def reduce(self, M):
        return np.asarray(M, dtype=np.int64) % self.p

    def inv(self, x):
        return pow(int(x), self.p - 2, self.p)

    def scale_row(self, row, s):
        return (row * s) % self.p

    def eliminate(self, block, factors, pivot_row):
        return (block - factors[:, None] * pivot_row[None, :]) % self.p

    def neg(self, v):
        return (-v) % self.p


class _ExtOps:
    def __init__(self, F: ExtensionField):
        self.F = F

    def reduce(self, M):
        return np.array(M, dtype=np.int64)

    def inv(self, x):
        return self.F.inv(int(x))

    def scale_row(self, row, s):
        return self.F.vmul(row, s)

    def eliminate(self, block, factors, pivot_row):
        F = self.F
        return F.vsub(block, F.vmul(factors[:, None], pivot_row[None, :]))

    def neg(self, v):
        return self.F.vneg(v)


def _ops(field):
    if isinstance(field, ExtensionField):
        return _ExtOps(field)
    return _PrimeOps(3 if field is None else int(getattr(field, "p", field)))


def rref(M, field=3):
    """Reduced row-echelon form; returns ``(R, pivot_columns)`` with zero rows dropped.

    ``field`` is a prime (GF(p)) or an :class:`ExtensionField`.
    """
    ops = _ops(field)
    M = ops.reduce(M).copy()
    if M.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
        lead = int(M[r, c])
        if lead != 1:
            M[r, c:] = ops.scale_row(M[r, c:], ops.inv(lead))
        col = M[:, c].copy()
        col[r] = 0
        targets = np.flatnonzero(col)
        if targets.size:
            M[targets, c:] = ops.eliminate(M[targets, c:], col[targets], M[r, c:])
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rank(M, field=3) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(rref(M, field)[1])


def nullspace(M, field=3) -> np.ndarray:
    """Basis (as rows, in reduced row-echelon form) of ``{x : M x = 0}``."""
    ops = _ops(field)
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(M, field)
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((len(free), n), dtype=np.int64)
    for j, f in enumerate(free):
        K[j, f] = 1
        if piv:
            K[j, piv] = ops.neg(R[:, f])
    # leading entries may sit in pivot columns; normalise to echelon form
    if len(free):
        K = rref(K, field)[0]
    return K


def solve(A, b, field=3):
    """Some ``x`` with ``A x = b``, or ``None`` if the system is inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    n = A.shape[1]
    R, piv = rref(np.hstack([A, b]), field)
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return x


def solve_unique(A, b, field=3):
    """``(x, full_rank)``: solution (or ``None``) and whether it is unique."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    n = A.shape[1]
    R, piv = rref(np.hstack([A, b]), field)
    if piv and piv[-1] == n:
        return None, len(piv) - 1 == n
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return x, len(piv) == n
