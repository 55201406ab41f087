"""Binary forms, the SL(2) action on sextic coefficients, and invariant spaces.

The universal sextic is ``f = sum_i a_i x1^(6-i) x2^i``.  The two unipotent
one-parameter subgroups act on its coefficients by

* upper: ``x1 -> x1, x2 -> t*x1 + x2``, so ``a_l -> sum_{i>=l} C(i,l) t^(i-l) a_i``;
* lower: ``x1 -> x1 + t*x2, x2 -> x2``, so ``a_j -> sum_{i<=j} C(6-i,j-i) t^(j-i) a_i``.

Invariance in characteristic 3 means a polynomial identity in ``t`` for both
subgroups.  Over the integers ``P(sigma_t a) = sum_k t^k D^k(P)/k!`` where
``D`` is the derivation ``a_l -> (l+1) a_(l+1)`` (upper) or
``a_j -> (7-j) a_(j-1)`` (lower); the divided powers are computed exactly by
working modulo a large enough power of 3 and dividing out the 3-part of k!.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

import numpy as np
import scipy.sparse as sp

from .fields import GF3, QQ, Domain, gf3m
from .linalg import nullspace, rref
from .polyring import (
    BITS,
    MAX_EXP,
    SEXTIC_VARS,
    ExponentOverflow,
    PolyError,
    SparsePoly,
    _grevlex_key,
    evaluate_many,
    substitute,
)

T_VAR = "t"
FORM_VARS = SEXTIC_VARS + ("x1", "x2")
MONOMIAL_CAP = 10**6


class CapExceeded(PolyError):
    pass


# ------------------------------------------------------------------------
# binary forms
# ------------------------------------------------------------------------

class BinaryForm:
    """``sum_i c_i x1^(n-i) x2^i`` with polynomial coefficients ``c_i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a form needs at least one coefficient")
        v, d = coeffs[0].variables, coeffs[0].domain
        for c in coeffs:
            if c.variables != v or c.domain != d:
                raise ValueError("coefficients must share variables and domain")
        self.coeffs = tuple(coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def domain(self) -> Domain:
        return self.coeffs[0].domain

    @property
    def variables(self):
        return self.coeffs[0].variables

    @classmethod
    def from_constants(cls, values, domain=QQ, variables=()):
        return cls([SparsePoly.constant(variables, domain, c) for c in values])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, BinaryForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        if self.order != other.order:
            raise ValueError("orders differ")
        return BinaryForm([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if self.order != other.order:
            raise ValueError("orders differ")
        return BinaryForm([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, c) -> "BinaryForm":
        return BinaryForm([x.scale(c) for x in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            m, n = self.order, other.order
            zero = SparsePoly.zero(self.variables, self.domain)
            out = [zero] * (m + n + 1)
            for i, a in enumerate(self.coeffs):
                if a.is_zero():
                    continue
                for j, b in enumerate(other.coeffs):
                    if not b.is_zero():
                        out[i + j] = out[i + j] + a * b
            return BinaryForm(out)
        return self.scale(other)

    def partial(self, i: int, j: int) -> "BinaryForm":
        """``d^(i+j) / dx1^i dx2^j``."""
        n = self.order
        if i + j > n:
            return BinaryForm([SparsePoly.zero(self.variables, self.domain)])
        out = []
        for s in range(n - i - j + 1):
            # term x1^(n-s-j) x2^(s+j) of the original
            idx = s + j
            factor = (factorial(n - idx) // factorial(n - idx - i)) * (factorial(idx) // factorial(idx - j))
            out.append(self.coeffs[idx].scale(factor))
        return BinaryForm(out)

    def to_poly(self, x1="x1", x2="x2") -> SparsePoly:
        variables = self.variables + (x1, x2)
        n = self.order
        acc = SparsePoly.zero(variables, self.domain)
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            mono = [0] * len(self.variables) + [n - i, i]
            acc = acc + c.embed(variables) * SparsePoly.monomial(variables, self.domain, mono)
        return acc

    @classmethod
    def from_poly(cls, P: SparsePoly, order: int, x1="x1", x2="x2") -> "BinaryForm":
        """Split a polynomial homogeneous of ``order`` in ``x1, x2``."""
        i1, i2 = P.variables.index(x1), P.variables.index(x2)
        rest = tuple(v for k, v in enumerate(P.variables) if k not in (i1, i2))
        buckets = [dict() for _ in range(order + 1)]
        for exps, c in P.items():
            if exps[i1] + exps[i2] != order:
                raise ValueError("polynomial is not homogeneous of the given order in x1, x2")
            key = tuple(e for k, e in enumerate(exps) if k not in (i1, i2))
            buckets[exps[i2]][key] = c
        return cls([SparsePoly(rest, P.domain, b) for b in buckets])

    def __repr__(self):
        return f"BinaryForm(order={self.order}, domain={self.domain!r})"


def universal_sextic(domain: Domain = GF3) -> BinaryForm:
    return BinaryForm(SparsePoly.gens(SEXTIC_VARS, domain))


def transvectant(f: BinaryForm, g: BinaryForm, k: int) -> BinaryForm:
    """The k-th transvectant ``(f, g)_k`` over a characteristic-0 domain.

    ``((m-k)!(n-k)!/(m!n!)) sum_j (-1)^j C(k,j) f_{x1^(k-j) x2^j} g_{x1^j x2^(k-j)}``
    """
    if f.domain.characteristic != 0 or g.domain.characteristic != 0:
        raise ValueError("transvectants need a characteristic-0 coefficient domain")
    m, n = f.order, g.order
    if not 0 <= k <= min(m, n):
        raise ValueError(f"transvectant index {k} out of range for orders {m}, {n}")
    acc = None
    for j in range(k + 1):
        term = f.partial(k - j, j) * g.partial(j, k - j)
        term = term.scale((-1) ** j * comb(k, j))
        acc = term if acc is None else acc + term
    return acc.scale(Fraction(factorial(m - k) * factorial(n - k), factorial(m) * factorial(n)))


# ------------------------------------------------------------------------
# coefficient action
# ------------------------------------------------------------------------

def coefficient_substitution(matrix, domain: Domain = GF3, params=(T_VAR,)):
    """Images of ``a0..a6`` under ``x1 -> m00 x1 + m01 x2, x2 -> m10 x1 + m11 x2``.

    Matrix entries are integers or polynomials in ``params``; the images are
    polynomials in ``a0..a6`` followed by ``params``.
    """
    params = tuple(params)
    lin_vars = ("x1", "x2") + params

    def entry(e):
        if isinstance(e, SparsePoly):
            return e.embed(lin_vars)
        return SparsePoly.constant(lin_vars, domain, e)

    (m00, m01), (m10, m11) = matrix
    X1, X2 = SparsePoly.gens(lin_vars, domain)[:2]
    img1 = entry(m00) * X1 + entry(m01) * X2
    img2 = entry(m10) * X1 + entry(m11) * X2
    out_vars = SEXTIC_VARS + params
    images = [SparsePoly.zero(out_vars, domain) for _ in range(7)]
    for i in range(7):
        # a_i * img1^(6-i) * img2^i, re-collected by powers of x1, x2
        term = (img1 ** (6 - i)) * (img2 ** i)
        for exps, c in term.items():
            j = exps[1]
            rest = [0] * 7 + list(exps[2:])
            rest[i] = 1
            images[j] = images[j] + SparsePoly.monomial(out_vars, domain, rest, c)
    return images


def _unipotent_matrix(which, t):
    if which == "upper":
        return ((1, 0), (t, 1))
    if which == "lower":
        return ((1, t), (0, 1))
    raise ValueError(f"unknown subgroup {which!r}")


def unipotent_images(which: str, domain: Domain = GF3, param=T_VAR):
    t = SparsePoly.variable((param,), domain, param)
    return coefficient_substitution(_unipotent_matrix(which, t), domain, (param,))


def _v3_factorial(k: int) -> int:
    v, q = 0, 3
    while q <= k:
        v += k // q
        q *= 3
    return v


_UNITS = [1 << (BITS * (6 - i)) for i in range(7)]
_SHIFTS = [BITS * (6 - i) for i in range(7)]


def _derivation_moves(which):
    # (source index, target index, factor)
    if which == "upper":
        return [(l, l + 1, l + 1) for l in range(6)]
    if which == "lower":
        return [(j, j - 1, 7 - j) for j in range(1, 7)]
    raise ValueError(f"unknown subgroup {which!r}")


def _apply_derivation(X: dict, moves, modulus: int) -> dict:
    out = {}
    get = out.get
    for key, c in X.items():
        for src, dst, fac in moves:
            e = (key >> _SHIFTS[src]) & 0xFF
            if e:
                k2 = key - _UNITS[src] + _UNITS[dst]
                out[k2] = (get(k2, 0) + c * e * fac) % modulus
    return {k: v for k, v in out.items() if v}


def hasse_expansion(which: str, P: SparsePoly) -> list:
    """``[H_0, H_1, ...]`` over GF(3) with ``P(sigma_t a) = sum_k t^k H_k``."""
    if P.domain != GF3 or P.variables != SEXTIC_VARS:
        raise ValueError("hasse_expansion expects a GF(3) polynomial in a0..a6")
    if P.is_zero():
        return [P]
    if which == "upper":
        kmax = max(6 * sum(e) - sum(i * x for i, x in enumerate(e)) for e, _ in P.items())
    else:
        kmax = max(sum(i * x for i, x in enumerate(e)) for e, _ in P.items())
    moves = _derivation_moves(which)
    N = _v3_factorial(kmax) + 1
    modulus = 3**N
    X = dict(P._t)
    out = [P]
    fact = 1
    for k in range(1, kmax + 1):
        X = _apply_derivation(X, moves, modulus)
        if not X:
            break
        fact *= k
        v = _v3_factorial(k)
        unit_inv = pow((fact // 3**v) % 3, -1, 3)
        scale = 3**v
        H = {}
        for key, c in X.items():
            if c % scale:
                raise ArithmeticError("divided power is not integral")  # cannot happen
            r = (c // scale * unit_inv) % 3
            if r:
                H[key] = r
        out.append(SparsePoly._raw(SEXTIC_VARS, GF3, H))
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return out


def unipotent_action(which: str, P: SparsePoly, method: str = "auto") -> SparsePoly:
    """``P`` evaluated on the coefficient images, a polynomial in ``a0..a6, t``.

    ``method`` is "hasse" (divided-power expansion, GF(3) only), "direct"
    (literal substitution into the form) or "auto".
    """
    if P.variables != SEXTIC_VARS:
        P = P.embed(SEXTIC_VARS)
    if method == "auto":
        method = "hasse" if P.domain == GF3 else "direct"
    if method == "direct":
        images = unipotent_images(which, P.domain)
        return substitute(P, {v: img for v, img in zip(SEXTIC_VARS, images)})
    if method != "hasse":
        raise ValueError(f"unknown method {method!r}")
    out_vars = SEXTIC_VARS + (T_VAR,)
    d = {}
    for k, H in enumerate(hasse_expansion(which, P)):
        if k > MAX_EXP and not H.is_zero():
            raise ExponentOverflow(f"t-exponent {k} exceeds {MAX_EXP}")
        for key, c in H._t.items():
            d[(key << BITS) | k] = c
    return SparsePoly._raw(out_vars, P.domain, d)


def isobaric_weight(P: SparsePoly):
    """Common value of ``sum i*e_i`` over the monomials, or ``None``."""
    if P.is_zero():
        raise ValueError("zero polynomial has no weight")
    idx = [P.variables.index(v) for v in SEXTIC_VARS]
    ws = {sum(i * e[j] for i, j in enumerate(idx)) for e, _ in P.items()}
    others = [k for k in range(P.nvars) if k not in idx]
    if others and any(e[k] for e, _ in P.items() for k in others):
        return None
    return ws.pop() if len(ws) == 1 else None


def is_invariant(P: SparsePoly, method: str = "auto") -> bool:
    """SL(2)-invariance: isobaric of weight 3*deg and fixed by both unipotent subgroups."""
    if P.variables != SEXTIC_VARS:
        try:
            P = P.embed(SEXTIC_VARS)
        except PolyError:
            return False
    if P.is_zero():
        return True
    if not P.is_homogeneous() or isobaric_weight(P) != 3 * P.degree():
        return False
    if method == "auto":
        method = "hasse" if P.domain == GF3 else "direct"
    if method == "hasse":
        return all(len(hasse_expansion(w, P)) == 1 for w in ("upper", "lower"))
    lifted = P.embed(SEXTIC_VARS + (T_VAR,))
    return all(unipotent_action(w, P, "direct") == lifted for w in ("upper", "lower"))


EXACT_WORK_CAP = 300_000


def invariance_defect(P: SparsePoly, method: str = "auto", seed: int = 0x5EED):
    """First failing identity as ``(subgroup, k, H_k)``, or ``None`` if invariant.

    ``method="sampled"`` compares ``P(sigma_t a)`` with ``P(a)`` at random
    points of GF(3^8)^7 x GF(3^8) instead; a failure then has ``k = None``.
    "auto" samples only when the exact expansion would be large.
    """
    if P.variables != SEXTIC_VARS:
        P = P.embed(SEXTIC_VARS)
    if P.is_zero():
        return None
    if not P.is_homogeneous() or isobaric_weight(P) != 3 * P.degree():
        return ("weight", 0, P)
    if method == "auto":
        method = "exact" if len(P) * 3 * P.degree() <= EXACT_WORK_CAP else "sampled"
    if method == "sampled":
        for w in ("upper", "lower"):
            if not sampled_invariance(w, P, seed):
                return (w, None, "nonzero at a sampled point")
        return None
    for w in ("upper", "lower"):
        hs = hasse_expansion(w, P)
        if len(hs) > 1:
            k = next(i for i in range(1, len(hs)) if not hs[i].is_zero())
            return (w, k, hs[k])
    return None


def _action_matrix(which, p=3):
    # M[i][j] = (binomial, t-power) with a'_j = sum_i M[i][j] t^pow a_i
    out = {}
    for i in range(7):
        for j in range(7):
            if which == "upper" and i >= j:
                out[(i, j)] = (comb(i, j) % p, i - j)
            elif which == "lower" and i <= j:
                out[(i, j)] = (comb(6 - i, j - i) % p, j - i)
    return out


def act_on_points(which: str, points: np.ndarray, ts: np.ndarray, F) -> np.ndarray:
    """Coefficient images ``sigma_t(a)`` for rows of ``points`` (vectorised over GF(3^m))."""
    out = np.zeros_like(points)
    for (i, j), (c, e) in _action_matrix(which).items():
        if c:
            term = F.vmul(F.vmul(points[:, i], F.vpow(ts, e)), np.int64(c))
            out[:, j] = F.vadd(out[:, j], term)
    return out


def sampled_invariance(which: str, P: SparsePoly, seed: int = 0x5EED, points: int = 32) -> bool:
    F = gf3m(8)
    rng = np.random.default_rng(np.random.SeedSequence([seed, P.degree(), 17]))
    pts = F.random(rng, (points, 7))
    ts = F.random(rng, points)
    moved = act_on_points(which, pts, ts, F)
    return bool(np.array_equal(evaluate_many(P, moved, F), evaluate_many(P, pts, F)))


# ------------------------------------------------------------------------
# invariant spaces
# ------------------------------------------------------------------------

def isobaric_monomials(d: int, w: int) -> list:
    """Exponent vectors of degree ``d`` and weight ``w``, lexicographic backtracking."""
    out = []
    e = [0] * 7

    def rec(i, deg_left, w_left):
        if i == 6:
            if w_left == 6 * deg_left:
                e[6] = deg_left
                out.append(tuple(e))
            return
        # remaining variables have index >= i+1 (weights up to 6)
        for x in range(deg_left, -1, -1):
            rest_deg = deg_left - x
            rest_w = w_left - i * x
            if rest_w < (i + 1) * rest_deg or rest_w > 6 * rest_deg:
                continue
            e[i] = x
            rec(i + 1, rest_deg, rest_w)
        e[i] = 0

    rec(0, d, w)
    return out


def count_isobaric(d: int, w: int) -> int:
    # coefficient of q^w in the Gaussian binomial [d+6, 6]_q
    table = [[0] * (6 * d + 1) for _ in range(d + 1)]
    table[0][0] = 1
    for i in range(7):
        new = [[0] * (6 * d + 1) for _ in range(d + 1)]
        for deg in range(d + 1):
            for ww in range(6 * d + 1):
                v = table[deg][ww]
                if not v:
                    continue
                for x in range(d - deg + 1):
                    if ww + i * x > 6 * d:
                        break
                    new[deg + x][ww + i * x] += v
        table = new
    return table[d][w] if 0 <= w <= 6 * d else 0


def _sorted_monomials(d, w):
    mons = isobaric_monomials(d, w)
    mons.sort(key=_grevlex_key, reverse=True)
    return mons


def _derivation_matrix(src, dst_index, moves):
    rows, cols, vals = [], [], []
    for j, e in enumerate(src):
        for s, t, fac in moves:
            if e[s]:
                m = list(e)
                m[s] -= 1
                m[t] += 1
                rows.append(dst_index[tuple(m)])
                cols.append(j)
                vals.append(e[s] * fac)
    return sp.csr_matrix(
        (np.array(vals, dtype=np.int64), (np.array(rows), np.array(cols))),
        shape=(len(dst_index), len(src)),
        dtype=np.int64,
    )


def invariant_space_basis(d: int, cap: int = MONOMIAL_CAP, verify: bool = True) -> list:
    """Basis of the degree-``d`` SL(2)-invariants over GF(3), rows in reduced echelon form.

    The space is cut out inside the span of isobaric monomials of weight 3d.
    Invariants are fixed by ``w: x1 -> x2, x2 -> -x1``, which acts by
    ``m -> (-1)^d rev(m)``, so we start from the w-fixed subspace.  Since
    the lower subgroup is the w-conjugate of the upper one, it then suffices
    to impose the upper identities ``H_k = 0`` for ``k = 1..3d``.
    """
    if d < 0:
        raise ValueError("degree must be non-negative")
    W = 3 * d
    n0 = count_isobaric(d, W)
    if n0 > cap:
        raise CapExceeded(f"{n0} isobaric monomials exceed the cap {cap}")
    if d == 0:
        return [SparsePoly.constant(SEXTIC_VARS, GF3, 1)]
    base = _sorted_monomials(d, W)
    index = {m: i for i, m in enumerate(base)}
    sign = 1 if d % 2 == 0 else 2
    cols = []
    for i, m in enumerate(base):
        r = m[::-1]
        j = index[r]
        if j == i:
            if sign == 1:
                cols.append(((i, 1),))
        elif i < j:
            cols.append(((i, 1), (j, sign)))
    K = np.zeros((len(base), len(cols)), dtype=np.int64)
    for c, entries in enumerate(cols):
        for i, v in entries:
            K[i, c] = v
    if K.shape[1] == 0:
        return []
    moves = _derivation_moves("upper")
    N = _v3_factorial(W) + 1
    modulus = 3**N
    if modulus * 8 * d * max(len(cols), 7) >= 2**62:
        raise CapExceeded(f"degree {d} is too large for int64 divided powers")
    X = K.copy()
    src = base
    fact = 1
    for k in range(1, W + 1):
        dst = _sorted_monomials(d, W + k)
        dst_index = {m: i for i, m in enumerate(dst)}
        Dk = _derivation_matrix(src, dst_index, moves)
        X = np.asarray(Dk @ X) % modulus
        fact *= k
        v = _v3_factorial(k)
        unit_inv = pow((fact // 3**v) % 3, -1, 3)
        H = ((X // 3**v) * unit_inv) % 3
        if H.any():
            T = nullspace(H, 3).T            # (r, r')
            if T.shape[1] == 0:
                return []
            X = (X @ T) % modulus
            K = (K @ T) % 3
        src = dst
    R, _ = rref(K.T, 3)
    basis = []
    for row in R:
        terms = {base[i]: int(c) for i in np.flatnonzero(row) for c in [row[i]]}
        basis.append(SparsePoly(SEXTIC_VARS, GF3, terms))
    if verify:
        for P in basis:
            if not is_invariant(P):
                raise ArithmeticError(f"degree-{d} basis element failed the invariance check")
    return basis


def swap_coefficients(P: SparsePoly) -> SparsePoly:
    """Image under ``a_i <-> a_(6-i)``."""
    idx = [P.variables.index(v) for v in SEXTIC_VARS]
    out = {}
    for e, c in P.items():
        e2 = list(e)
        for i in range(7):
            e2[idx[i]] = e[idx[6 - i]]
        out[tuple(e2)] = c
    return SparsePoly(P.variables, P.domain, out)
