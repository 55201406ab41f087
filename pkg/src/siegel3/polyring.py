"""Exact sparse multivariate polynomials.

A :class:`SparsePoly` is an immutable map from monomials to nonzero
coefficients in one of the domains of :mod:`siegel3.fields`, over an ordered
tuple of variable names.  Monomials are stored packed into a single integer,
eight bits per variable (first variable most significant); exponents are
limited to :data:`MAX_EXP` so that every field keeps a guard bit.

The fixed monomial order is graded reverse lexicographic with the variables
ordered as given (``a0 > a1 > ... > a6 > x1 > x2``).
"""

from __future__ import annotations

import hashlib
import heapq
import json
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .fields import (
    GF3,
    QQ,
    ZZ,
    Domain,
    ExtensionField,
    PrimeField,
    domain_from_tag,
)

BITS = 8
MAX_EXP = 127
MAX_POWER = 2**31 - 1
_MASK = (1 << BITS) - 1

# numpy multiplication kicks in above this many term pairs
NUMPY_THRESHOLD = 40_000
_CHUNK = 1 << 22

SEXTIC_VARS = tuple(f"a{i}" for i in range(7))


class PolyError(Exception):
    pass


class DomainMismatch(PolyError, ValueError):
    pass


class ExponentOverflow(PolyError, OverflowError):
    pass


class ParseError(PolyError, ValueError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"byte {offset}: {reason}")
        self.offset = offset
        self.reason = reason


def pack(exps: Iterable[int]) -> int:
    key = 0
    for e in exps:
        if e < 0:
            raise ValueError("negative exponent")
        if e > MAX_EXP:
            raise ExponentOverflow(f"exponent {e} exceeds {MAX_EXP}")
        key = (key << BITS) | e
    return key


def unpack(key: int, n: int) -> tuple:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = key & _MASK
        key >>= BITS
    return tuple(out)


def _shifts(n):
    return np.array([BITS * (n - 1 - i) for i in range(n)], dtype=np.int64)


def unpack_array(keys: np.ndarray, n: int) -> np.ndarray:
    """Exponent matrix (len(keys) x n) of packed keys (int64)."""
    return (keys[:, None] >> _shifts(n)[None, :]) & _MASK


def _grevlex_key(exps):
    return (sum(exps), tuple(-e for e in reversed(exps)))


class SparsePoly:
    """Immutable sparse polynomial.

    >>> a = SparsePoly.gens(SEXTIC_VARS, GF3)
    >>> A = a[1] * a[5] - a[2] * a[4]
    >>> str(A)
    '2*a2*a4 + a1*a5'
    """

    __slots__ = ("variables", "domain", "_t", "_deg", "_maxexp", "_hash")

    def __init__(self, variables, domain: Domain, terms: Mapping | None = None):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        d = {}
        if terms:
            conv = domain.convert
            add = domain.add
            n = len(variables)
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != n:
                    raise ValueError(f"exponent vector {exps} does not match {n} variables")
                k = pack(exps)
                c = conv(c)
                d[k] = add(d[k], c) if k in d else c
            d = {k: c for k, c in d.items() if c != 0}
        self._init(variables, domain, d)

    def _init(self, variables, domain, d):
        self.variables = variables
        self.domain = domain
        self._t = d
        self._deg = None
        self._maxexp = None
        self._hash = None

    @classmethod
    def _raw(cls, variables, domain, d) -> "SparsePoly":
        obj = cls.__new__(cls)
        obj._init(variables, domain, d)
        return obj

    # constructors --------------------------------------------------------
    @classmethod
    def zero(cls, variables, domain):
        return cls._raw(tuple(variables), domain, {})

    @classmethod
    def constant(cls, variables, domain, c):
        c = domain.convert(c)
        return cls._raw(tuple(variables), domain, {0: c} if c != 0 else {})

    @classmethod
    def variable(cls, variables, domain, name):
        variables = tuple(variables)
        i = variables.index(name)
        exps = [0] * len(variables)
        exps[i] = 1
        return cls._raw(variables, domain, {pack(exps): domain.convert(1)})

    @classmethod
    def gens(cls, variables, domain):
        return [cls.variable(variables, domain, v) for v in variables]

    @classmethod
    def monomial(cls, variables, domain, exps, c=1):
        return cls(variables, domain, {tuple(exps): c})

    # inspection ----------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    def __len__(self):
        return len(self._t)

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def items(self):
        """Unordered iterator of ``(exponent tuple, coefficient)``."""
        n = self.nvars
        for k, c in self._t.items():
            yield unpack(k, n), c

    def terms(self) -> list:
        """Terms sorted by the monomial order, leading term first."""
        return sorted(self.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def monomials(self) -> list:
        return [e for e, _ in self.terms()]

    def coefficient(self, exps):
        return self._t.get(pack(exps), 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._deg is None:
            n = self.nvars
            self._deg = max((sum(unpack(k, n)) for k in self._t), default=-1)
        return self._deg

    def max_exponents(self) -> tuple:
        if self._maxexp is None:
            n = self.nvars
            mx = [0] * n
            for k in self._t:
                for i, e in enumerate(unpack(k, n)):
                    if e > mx[i]:
                        mx[i] = e
            self._maxexp = tuple(mx)
        return self._maxexp

    def degree_in(self, var) -> int:
        if not self._t:
            return -1
        return self.max_exponents()[self.variables.index(var)]

    def is_homogeneous(self) -> bool:
        n = self.nvars
        return len({sum(unpack(k, n)) for k in self._t}) <= 1

    def leading_term(self):
        if not self._t:
            raise ValueError("zero polynomial has no leading term")
        return max(self.items(), key=lambda t: _grevlex_key(t[0]))

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def slice(self, var, power: int) -> "SparsePoly":
        """Coefficient of ``var**power``, as a polynomial in the same variables."""
        i = self.variables.index(var)
        shift = BITS * (self.nvars - 1 - i)
        out = {}
        for k, c in self._t.items():
            if (k >> shift) & _MASK == power:
                out[k - (power << shift)] = c
        return SparsePoly._raw(self.variables, self.domain, out)

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return (
                self.variables == other.variables
                and self.domain == other.domain
                and self._t == other._t
            )
        if isinstance(other, (int, Fraction)):
            return self == SparsePoly.constant(self.variables, self.domain, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, self.domain, frozenset(self._t.items())))
        return self._hash

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "SparsePoly":
        if isinstance(other, SparsePoly):
            if other.domain != self.domain:
                raise DomainMismatch(f"{self.domain!r} vs {other.domain!r}")
            if other.variables != self.variables:
                raise DomainMismatch(f"variables {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePoly.constant(self.variables, self.domain, other)
        raise TypeError(f"cannot combine SparsePoly with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return SparsePoly._raw(self.variables, self.domain, _add_dicts(self._t, other._t, self.domain, 1))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return SparsePoly._raw(self.variables, self.domain, _add_dicts(self._t, other._t, self.domain, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        neg = self.domain.neg
        return SparsePoly._raw(self.variables, self.domain, {k: neg(c) for k, c in self._t.items()})

    def scale(self, c) -> "SparsePoly":
        dom = self.domain
        c = dom.convert(c)
        if c == 0:
            return SparsePoly.zero(self.variables, dom)
        mul = dom.mul
        return SparsePoly._raw(self.variables, dom, {k: mul(v, c) for k, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not self._t or not other._t:
            return SparsePoly.zero(self.variables, self.domain)
        _check_sum_overflow(self, other)
        return SparsePoly._raw(self.variables, self.domain, _mul_dicts(self._t, other._t, self.domain, self.nvars))

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            raise ValueError("negative exponent")
        if e > MAX_POWER:
            raise ExponentOverflow(f"exponent {e} exceeds {MAX_POWER}")
        one = SparsePoly.constant(self.variables, self.domain, 1)
        if e == 0:
            return one
        if not self._t:
            return self
        mx = max(self.max_exponents())
        if mx * e > MAX_EXP:
            raise ExponentOverflow(f"power {e} overflows exponent storage")
        dom = self.domain
        if isinstance(dom, PrimeField):
            # Frobenius: (sum c m)^p = sum c m^p over the prime field
            p = dom.p
            result = one
            base = self
            while e:
                e, r = divmod(e, p)
                if r:
                    result = result * _small_pow(base, r)
                if e:
                    base = SparsePoly._raw(self.variables, dom, {k * p: c for k, c in base._t.items()})
            return result
        return _small_pow(self, e)

    # conversions ---------------------------------------------------------
    def change_domain(self, domain: Domain) -> "SparsePoly":
        src = self.domain
        d = {}
        for k, c in self._t.items():
            c = _coerce_scalar(c, src, domain)
            if c != 0:
                d[k] = c
        return SparsePoly._raw(self.variables, domain, d)

    def embed(self, variables) -> "SparsePoly":
        """Re-express in a variable tuple containing all of ``self.variables``."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = [v for v in self.variables if v not in variables]
        if missing:
            used = self.max_exponents()
            bad = [v for v in missing if used[self.variables.index(v)] > 0]
            if bad:
                raise DomainMismatch(f"variables {bad} are not in the target set")
        idx = [(variables.index(v) if v in variables else None) for v in self.variables]
        n, m = self.nvars, len(variables)
        out = {}
        for k, c in self._t.items():
            exps = unpack(k, n)
            new = [0] * m
            for i, e in enumerate(exps):
                if e:
                    new[idx[i]] = e
            out[pack(new)] = c
        return SparsePoly._raw(variables, self.domain, out)

    def as_arrays(self):
        """(exponent matrix, coefficient list) in monomial order."""
        ts = self.terms()
        E = np.array([e for e, _ in ts], dtype=np.int64).reshape(len(ts), self.nvars)
        return E, [c for _, c in ts]

    def map_coefficients(self, fn) -> "SparsePoly":
        conv = self.domain.convert
        d = {k: conv(fn(c)) for k, c in self._t.items()}
        return SparsePoly._raw(self.variables, self.domain, {k: c for k, c in d.items() if c != 0})

    # printing ------------------------------------------------------------
    def __repr__(self):
        return f"SparsePoly({self.domain!r}, {self})"

    def __str__(self):
        if not self._t:
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                (v if e == 1 else f"{v}^{e}") for v, e in zip(self.variables, exps) if e
            )
            cs = self.domain.encode(c)
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)


# ------------------------------------------------------------------------
# kernels
# ------------------------------------------------------------------------

def _add_dicts(a, b, dom, sign):
    out = dict(a)
    if isinstance(dom, PrimeField):
        p = dom.p
        for k, c in b.items():
            v = (out.get(k, 0) + sign * c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return out
    add = dom.add if sign == 1 else dom.sub
    for k, c in b.items():
        if k in out:
            v = add(out[k], c)
            if v != 0:
                out[k] = v
            else:
                del out[k]
        else:
            out[k] = c if sign == 1 else dom.neg(c)
    return out


def _check_sum_overflow(f, g):
    if f.degree() + g.degree() <= MAX_EXP:
        return
    for x, y in zip(f.max_exponents(), g.max_exponents()):
        if x + y > MAX_EXP:
            raise ExponentOverflow(f"product exponent {x + y} exceeds {MAX_EXP}")


def _mul_dicts(f, g, dom, nvars):
    if len(f) > len(g):
        f, g = g, f
    if isinstance(dom, PrimeField):
        if len(f) * len(g) >= NUMPY_THRESHOLD and nvars * BITS <= 64:
            return _mul_numpy_modp(f, g, dom.p)
        res = {}
        get = res.get
        for k1, c1 in f.items():
            for k2, c2 in g.items():
                k = k1 + k2
                res[k] = get(k, 0) + c1 * c2
        p = dom.p
        return {k: v % p for k, v in res.items() if v % p}
    if isinstance(dom, ExtensionField):
        mul, add = dom.mul, dom.add
        res = {}
        for k1, c1 in f.items():
            for k2, c2 in g.items():
                k = k1 + k2
                v = mul(c1, c2)
                res[k] = add(res[k], v) if k in res else v
        return {k: v for k, v in res.items() if v}
    res = {}
    get = res.get
    for k1, c1 in f.items():
        for k2, c2 in g.items():
            k = k1 + k2
            res[k] = get(k, 0) + c1 * c2
    conv = dom.convert
    return {k: conv(v) for k, v in res.items() if v != 0}


def _mul_numpy_modp(f, g, p):
    fk = np.fromiter(f.keys(), dtype=np.int64, count=len(f))
    fc = np.fromiter(f.values(), dtype=np.int64, count=len(f))
    gk = np.fromiter(g.keys(), dtype=np.int64, count=len(g))
    gc = np.fromiter(g.values(), dtype=np.int64, count=len(g))
    step = max(1, _CHUNK // len(gk))
    keys, vals = [], []
    for i in range(0, len(fk), step):
        k = (fk[i:i + step, None] + gk[None, :]).ravel()
        c = (fc[i:i + step, None] * gc[None, :]).ravel()
        u, inv = np.unique(k, return_inverse=True)
        s = np.bincount(inv, weights=c).astype(np.int64) % p
        nz = s != 0
        keys.append(u[nz])
        vals.append(s[nz])
    if len(keys) > 1:
        k = np.concatenate(keys)
        c = np.concatenate(vals)
        u, inv = np.unique(k, return_inverse=True)
        s = np.bincount(inv, weights=c).astype(np.int64) % p
        nz = s != 0
        u, s = u[nz], s[nz]
    else:
        u, s = keys[0], vals[0]
    return dict(zip(u.tolist(), s.tolist()))


def _small_pow(f, e):
    result = None
    base = f
    while e:
        if e & 1:
            result = base if result is None else result * base
        e >>= 1
        if e:
            base = base * base
    return result


def _coerce_scalar(c, src: Domain, dst: Domain):
    if src == dst:
        return c
    if isinstance(dst, ExtensionField):
        if src in (ZZ, GF3) or (isinstance(src, PrimeField) and src.p == dst.p):
            return dst.from_int(c)
        if src == QQ:
            return dst.convert(Fraction(c))
    elif isinstance(dst, PrimeField):
        if src in (ZZ, QQ) or isinstance(src, PrimeField):
            if isinstance(src, PrimeField) and src.p != dst.p:
                raise DomainMismatch(f"cannot map {src!r} to {dst!r}")
            return dst.convert(c)
    elif dst == QQ and src == ZZ:
        return c
    elif dst == ZZ and src == QQ:
        return ZZ.convert(Fraction(c))
    raise DomainMismatch(f"cannot map {src!r} coefficients into {dst!r}")


# ------------------------------------------------------------------------
# operations
# ------------------------------------------------------------------------

def poly_arith(op: str, f: SparsePoly, g) -> SparsePoly:
    """``op`` in ``{"add", "sub", "mul", "pow"}``; ``g`` is an exponent for pow."""
    if op == "add":
        return f + f._coerce(g)
    if op == "sub":
        return f - f._coerce(g)
    if op == "mul":
        return f * (g if isinstance(g, (int, Fraction)) else f._coerce(g))
    if op == "pow":
        return f ** g
    raise ValueError(f"unknown operation {op!r}")


def _rank_parts(n):
    tail_bits = BITS * n
    off = sum(MAX_EXP << (BITS * i) for i in range(n))
    guard = sum(1 << (BITS * i + BITS - 1) for i in range(n))
    return tail_bits, off, guard


def _to_rank(exps, tail_bits):
    # graded part on top, then (MAX_EXP - e_i) with the last variable most significant
    r = sum(exps) << tail_bits
    for i, e in enumerate(exps):
        r |= (MAX_EXP - e) << (BITS * i)
    return r


def _from_rank(r, n):
    return tuple(MAX_EXP - ((r >> (BITS * i)) & _MASK) for i in range(n))


def exact_divide(f: SparsePoly, g: SparsePoly):
    """Quotient ``q`` with ``f == q * g``, or ``None`` if ``g`` does not divide ``f``.

    Single-divisor division under graded reverse lexicographic order; the
    remainder is zero exactly when ``g`` divides ``f``, so the division stops
    at the first leading term not divisible by ``LT(g)``.
    """
    g = f._coerce(g)
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    dom = f.domain
    n = f.nvars
    if f.is_zero():
        return SparsePoly.zero(f.variables, dom)
    tail_bits, off, guard = _rank_parts(n)
    tail_mask = (1 << tail_bits) - 1
    gterms = [(_to_rank(e, tail_bits), c) for e, c in g.items()]
    gterms.sort(reverse=True)
    lr, lc = gterms[0]
    lr_tail = lr & tail_mask
    rest = gterms[1:]
    prime = dom.p if isinstance(dom, PrimeField) else None
    if dom.is_field:
        inv_lc = dom.inv(lc)
    elif abs(lc) == 1:
        inv_lc = lc
    else:
        inv_lc = None
    R = {_to_rank(e, tail_bits): c for e, c in f.items()}
    heap = [-r for r in R]
    heapq.heapify(heap)
    Q = {}
    mul, sub = dom.mul, dom.sub
    while heap:
        r = -heapq.heappop(heap)
        c = R.pop(r, 0)
        if c == 0:
            continue
        # exponentwise e(lt) <= e(r)  <=>  every tail field of lt >= that of r
        if (((lr_tail | guard) - (r & tail_mask)) & guard) != guard or r < lr:
            return None
        if inv_lc is not None:
            qc = mul(c, inv_lc)
        else:
            qv, rem = divmod(c, lc)
            if rem:
                return None
            qc = qv
        qr = r - lr + off
        Q[qr] = qc
        if prime is not None:
            for gr, gc in rest:
                nr = qr + gr - off
                old = R.get(nr)
                v = ((old or 0) - qc * gc) % prime
                if v:
                    if old is None:
                        heapq.heappush(heap, -nr)
                    R[nr] = v
                elif old is not None:
                    del R[nr]
        else:
            for gr, gc in rest:
                nr = qr + gr - off
                old = R.get(nr)
                v = sub(old if old is not None else 0, mul(qc, gc))
                if v != 0:
                    if old is None:
                        heapq.heappush(heap, -nr)
                    R[nr] = v
                elif old is not None:
                    del R[nr]
    return SparsePoly._raw(
        f.variables, dom, {pack(_from_rank(r, n)): c for r, c in Q.items()}
    )


def _merge_vars(*groups):
    out = []
    for grp in groups:
        for v in grp:
            if v not in out:
                out.append(v)
    return tuple(out)


def substitute(f: SparsePoly, bindings: Mapping[str, SparsePoly]) -> SparsePoly:
    """Replace variables of ``f`` by polynomials.

    The result lives over ``f.variables`` followed by any new variables of the
    images, in order of first appearance.
    """
    for v in bindings:
        if v not in f.variables:
            raise KeyError(f"{v!r} is not a variable of the polynomial")
    images = {}
    for v, img in bindings.items():
        if not isinstance(img, SparsePoly):
            img = SparsePoly.constant((), f.domain, img)
        if img.domain != f.domain:
            raise DomainMismatch(f"binding for {v} is over {img.domain!r}, polynomial over {f.domain!r}")
        images[v] = img
    target = _merge_vars(f.variables, *(img.variables for img in images.values()))
    factors = []
    for v in f.variables:
        if v in images:
            factors.append(images[v].embed(target))
        else:
            factors.append(SparsePoly.variable(target, f.domain, v))
    cache = [dict() for _ in factors]

    def power(i, e):
        c = cache[i]
        if e not in c:
            c[e] = factors[i] ** e
        return c[e]

    dom = f.domain
    acc = {}
    one = SparsePoly.constant(target, dom, 1)
    for exps, c in f.items():
        term = one
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        acc = _add_dicts(acc, term.scale(c)._t, dom, 1)
    return SparsePoly._raw(target, dom, acc)


def evaluate(f: SparsePoly, point: Mapping, field: Domain | None = None):
    """Value of ``f`` at ``point`` (variable name -> scalar of ``field``)."""
    field = field or f.domain
    n = f.nvars
    used = f.max_exponents() if f else (0,) * n
    vals = []
    for v, u in zip(f.variables, used):
        if v in point:
            vals.append(field.convert(point[v]))
        elif u:
            raise KeyError(f"unbound variable {v!r}")
        else:
            vals.append(None)
    pw = [dict() for _ in range(n)]
    total = 0
    for exps, c in f.items():
        term = _coerce_scalar(c, f.domain, field)
        for i, e in enumerate(exps):
            if e:
                cache = pw[i]
                if e not in cache:
                    cache[e] = _scalar_pow(field, vals[i], e)
                term = field.mul(term, cache[e])
        total = field.add(total, term)
    return total


def _scalar_pow(field, x, e):
    if isinstance(field, ExtensionField):
        return field.pow(x, e)
    r = field.convert(1)
    for _ in range(e):
        r = field.mul(r, x)
    return r


def evaluate_many(f: SparsePoly, points: np.ndarray, field: ExtensionField, chunk: int = 4096) -> np.ndarray:
    """Vectorised evaluation at the rows of ``points`` (shape (P, nvars)).

    Coefficients must lie in the prime field (domains Z or GF(3)).
    """
    points = np.asarray(points, dtype=np.int64)
    P = points.shape[0]
    if points.shape[1] != f.nvars:
        raise ValueError("point dimension does not match the variable count")
    if not f:
        return np.zeros(P, dtype=np.int64)
    if f.domain not in (GF3, ZZ) and f.domain != field:
        raise DomainMismatch(f"cannot evaluate {f.domain!r} polynomial over {field!r}")
    keys = np.fromiter(f._t.keys(), dtype=np.int64, count=len(f))
    coeffs = [_coerce_scalar(c, f.domain, field) for c in f._t.values()]
    E = unpack_array(keys, f.nvars)
    C = np.array(coeffs, dtype=np.int64)
    order = field.q - 1
    logs = field._log[points]                       # (P, n), -1 for zero
    zero = (points == 0).astype(np.int64)
    result = np.zeros(P, dtype=np.int64)
    for s in range(0, len(E), chunk):
        Es = E[s:s + chunk]
        L = (Es @ np.where(logs < 0, 0, logs).T) % order
        vals = field._exp[L]
        vanish = ((Es > 0).astype(np.int64) @ zero.T) > 0
        vals[vanish] = 0
        vals = field.vmul(vals, C[s:s + chunk, None])
        part = field.vsum(vals, axis=0)
        result = field.vadd(result, part)
    return result


def reduce_mod_3(f: SparsePoly) -> SparsePoly:
    """Coefficient-wise reduction of an integral polynomial to GF(3)."""
    if f.domain == ZZ:
        return f.change_domain(GF3)
    if f.domain == QQ:
        for _, c in f.items():
            if Fraction(c).denominator != 1:
                raise ValueError("polynomial has non-integral coefficients")
        return f.change_domain(GF3)
    raise DomainMismatch(f"reduce_mod_3 expects integer coefficients, got {f.domain!r}")


# ------------------------------------------------------------------------
# JSON serialisation
# ------------------------------------------------------------------------

def to_json_obj(f: SparsePoly) -> dict:
    obj = {"domain": f.domain.tag}
    if isinstance(f.domain, ExtensionField):
        obj["m"] = f.domain.m
    obj["vars"] = list(f.variables)
    enc = f.domain.encode
    obj["terms"] = [{"e": list(e), "c": enc(c)} for e, c in f.terms()]
    return obj


def serialize(f: SparsePoly) -> bytes:
    """Canonical UTF-8 JSON encoding (terms in monomial order, trailing newline)."""
    return (json.dumps(to_json_obj(f), separators=(",", ":")) + "\n").encode("utf-8")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _term_offsets(text: str) -> list:
    """Character offsets of the elements of the top-level "terms" array."""
    offsets = []
    i = text.find('"terms"')
    if i < 0:
        return offsets
    i = text.find("[", i)
    dec = json.JSONDecoder()
    i += 1
    while i < len(text):
        while i < len(text) and text[i] in " \t\r\n,":
            i += 1
        if i >= len(text) or text[i] == "]":
            break
        offsets.append(i)
        try:
            _, i = dec.raw_decode(text, i)
        except json.JSONDecodeError:
            break
    return offsets


def parse(data) -> SparsePoly:
    """Inverse of :func:`serialize`; raises :class:`ParseError` with a byte offset."""
    if isinstance(data, (bytes, bytearray)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(exc.start, "invalid UTF-8") from None
    else:
        text = data

    def byte_offset(ch):
        return len(text[:ch].encode("utf-8"))

    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(byte_offset(exc.pos), exc.msg) from None
    if not isinstance(obj, dict):
        raise ParseError(0, "top level must be an object")
    for key in ("domain", "vars", "terms"):
        if key not in obj:
            raise ParseError(0, f"missing key {key!r}")
    try:
        dom = domain_from_tag(obj["domain"], obj.get("m"))
    except (ValueError, TypeError) as exc:
        raise ParseError(byte_offset(max(text.find('"domain"'), 0)), str(exc)) from None
    variables = obj["vars"]
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ParseError(byte_offset(max(text.find('"vars"'), 0)), "vars must be a list of strings")
    if not isinstance(obj["terms"], list):
        raise ParseError(byte_offset(max(text.find('"terms"'), 0)), "terms must be a list")
    n = len(variables)
    offsets = None
    terms = {}
    for idx, t in enumerate(obj["terms"]):
        reason = None
        if not isinstance(t, dict) or set(t) != {"e", "c"}:
            reason = 'term must be an object with keys "e" and "c"'
        elif not isinstance(t["e"], list) or len(t["e"]) != n or not all(
            isinstance(x, int) and not isinstance(x, bool) and 0 <= x <= MAX_EXP for x in t["e"]
        ):
            reason = f"exponent vector must be {n} integers in [0, {MAX_EXP}]"
        elif not isinstance(t["c"], str):
            reason = "coefficient must be a string"
        else:
            try:
                c = dom.decode(t["c"])
            except (ValueError, ZeroDivisionError):
                reason = f"bad coefficient {t['c']!r}"
            else:
                if c == 0:
                    reason = "zero coefficient"
                elif tuple(t["e"]) in terms:
                    reason = "duplicate monomial"
        if reason:
            if offsets is None:
                offsets = _term_offsets(text)
            pos = offsets[idx] if idx < len(offsets) else 0
            raise ParseError(byte_offset(pos), f"term {idx}: {reason}")
        terms[tuple(t["e"])] = c
    return SparsePoly(variables, dom, terms)
