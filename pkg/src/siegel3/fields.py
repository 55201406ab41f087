"""Coefficient domains: the integers, the rationals, GF(p) and GF(3^m).

Elements are plain Python objects (``int`` or ``Fraction``).  Elements of an
extension field GF(p^m) are encoded as integers in ``[0, p^m)`` whose base-p
digits are the coefficients of the residue polynomial, lowest degree first;
in particular the prime subfield is embedded as ``0, 1, ..., p-1``.

Extension fields also carry table-driven vectorised kernels (numpy) used for
bulk evaluation and for linear algebra over GF(3^m).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np


class Domain:
    """Base class for coefficient domains."""

    tag: str = "?"
    characteristic: int = 0
    is_field: bool = False

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        return ()

    def __repr__(self):
        return self.tag

    # scalar arithmetic -------------------------------------------------
    def convert(self, x):
        raise NotImplementedError

    def add(self, x, y):
        return self.convert(x + y)

    def sub(self, x, y):
        return self.convert(x - y)

    def mul(self, x, y):
        return self.convert(x * y)

    def neg(self, x):
        return self.convert(-x)

    def inv(self, x):
        raise ZeroDivisionError("not a field")

    def is_one(self, x):
        return x == 1

    # text encoding used by the JSON schema -----------------------------
    def encode(self, x) -> str:
        return str(x)

    def decode(self, s: str):
        return self.convert(int(s))


class IntegerRing(Domain):
    tag = "Z"

    def convert(self, x):
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def neg(self, x):
        return -x


class RationalField(Domain):
    tag = "Q"
    is_field = True

    def convert(self, x):
        if isinstance(x, Fraction):
            return x.numerator if x.denominator == 1 else x
        return int(x)

    def add(self, x, y):
        return self.convert(x + y)

    def sub(self, x, y):
        return self.convert(x - y)

    def mul(self, x, y):
        return self.convert(x * y)

    def neg(self, x):
        return -x

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.convert(Fraction(1) / x)

    def encode(self, x) -> str:
        return str(Fraction(x))

    def decode(self, s: str):
        return self.convert(Fraction(s))


class PrimeField(Domain):
    is_field = True

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.tag = "GF3" if p == 3 else f"GF{p}"

    def _key(self):
        return (self.p,)

    def convert(self, x):
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return x * y % self.p

    def neg(self, x):
        return -x % self.p

    def inv(self, x):
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    # vectorised kernels over int64 arrays
    def vadd(self, x, y):
        return (x + y) % self.p

    def vsub(self, x, y):
        return (x - y) % self.p

    def vmul(self, x, y):
        return (x * y) % self.p

    def vinv(self, x):
        table = np.array([0] + [pow(i, -1, self.p) for i in range(1, self.p)], dtype=np.int64)
        return table[x]


ZZ = IntegerRing()
QQ = RationalField()
GF3 = PrimeField(3)


# --------------------------------------------------------------------------
# GF(p^m)
# --------------------------------------------------------------------------

def _polymulmod(a, b, mod, p):
    """Multiply digit lists ``a*b`` modulo the monic ``mod`` over GF(p)."""
    m = len(mod) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for k in range(len(out) - 1, m - 1, -1):
        c = out[k]
        if c:
            for j in range(m + 1):
                out[k - m + j] = (out[k - m + j] - c * mod[j]) % p
    return (out + [0] * m)[:m]


def _polymod(a, b, p):
    """Remainder of digit list ``a`` by monic ``b`` over GF(p)."""
    a = list(a)
    db = len(b) - 1
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            for j in range(db + 1):
                a[k - db + j] = (a[k - db + j] - c * b[j]) % p
    return a[:db]


def _monic_polys(deg, p):
    for n in range(p**deg):
        digits = [(n // p**i) % p for i in range(deg)]
        yield digits + [1]


def is_irreducible(mod, p=3) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= deg/2."""
    m = len(mod) - 1
    if m < 1 or mod[-1] != 1:
        raise ValueError("modulus must be monic of positive degree")
    for d in range(1, m // 2 + 1):
        for g in _monic_polys(d, p):
            if not any(_polymod(mod, g, p)):
                return False
    return True


def find_irreducible(m: int, p: int = 3, primitive: bool = True):
    """First monic irreducible (optionally primitive) polynomial of degree m.

    Enumeration order: the integer whose base-p digits are the low
    coefficients, counted upwards.
    """
    for mod in _monic_polys(m, p):
        if mod[0] == 0 or not is_irreducible(mod, p):
            continue
        if not primitive or _is_primitive_modulus(mod, p):
            return tuple(mod)
    raise ValueError("no irreducible polynomial found")


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _digits_pow(base, e, mod, p):
    m = len(mod) - 1
    result = [1] + [0] * (m - 1)
    b = list(base) + [0] * (m - len(base))
    while e:
        if e & 1:
            result = _polymulmod(result, b, mod, p)
        b = _polymulmod(b, b, mod, p)
        e >>= 1
    return result


def _is_primitive_modulus(mod, p):
    m = len(mod) - 1
    order = p**m - 1
    x = [0, 1] + [0] * (m - 2) if m > 1 else [0]
    one = [1] + [0] * (m - 1)
    return all(_digits_pow(x, order // q, mod, p) != one for q in _prime_factors(order))


# x^8 + x^3 + 2 (primitive), pinned; __init__ re-verifies irreducibility.
DEFAULT_MODULUS_3_8 = (2, 0, 0, 1, 0, 0, 0, 0, 1)


class ExtensionField(Domain):
    """GF(p^m) with a fixed irreducible modulus (coefficients low to high)."""

    is_field = True

    def __init__(self, m: int = 8, modulus=None, p: int = 3):
        if modulus is None:
            modulus = DEFAULT_MODULUS_3_8 if (p, m) == (3, 8) else find_irreducible(m, p)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != m + 1:
            raise ValueError("modulus degree does not match m")
        if not is_irreducible(list(modulus), p):
            raise ValueError(f"modulus {modulus} is reducible over GF({p})")
        self.p, self.m, self.modulus = p, m, modulus
        self.q = p**m
        self.characteristic = p
        self.tag = "GF3m" if p == 3 else f"GF{p}m"
        self._build_tables()

    def _key(self):
        return (self.p, self.m, self.modulus)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        mod = list(self.modulus)
        pw = [p**i for i in range(m)]

        def enc(d):
            return sum(c * w for c, w in zip(d, pw))

        # primitive element: smallest encoded element of full order
        order = q - 1
        factors = _prime_factors(order)
        one = [1] + [0] * (m - 1)
        gen = None
        for n in range(p, q):
            d = [(n // w) % p for w in pw]
            if all(_digits_pow(d, order // r, mod, p) != one for r in factors):
                gen = d
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        cur = one
        for i in range(order):
            v = enc(cur)
            exp[i] = v
            log[v] = i
            cur = _polymulmod(cur, gen, mod, p)
        exp[order:] = exp[:order]
        self.generator = enc(gen)
        self._exp = exp
        self._log = log
        self._exp_list = exp.tolist()
        self._log_list = log.tolist()
        digits = np.array([[(n // w) % p for w in pw] for n in range(q)], dtype=np.int64)
        self._digits = digits
        self._pw = np.array(pw, dtype=np.int64)
        self._neg = (((-digits) % p) @ self._pw).astype(np.int64)

    # scalars -----------------------------------------------------------
    def convert(self, x):
        if isinstance(x, Fraction):
            return self.mul(self.convert(x.numerator), self.inv(self.convert(x.denominator)))
        x = int(x)
        if 0 <= x < self.q:
            return x
        raise ValueError(f"{x} is not an encoded element of {self!r}")

    def from_int(self, n: int):
        """Image of the integer n (prime subfield)."""
        return n % self.p

    def add(self, x, y):
        d = self._digits
        return int(((d[x] + d[y]) % self.p) @ self._pw)

    def sub(self, x, y):
        d = self._digits
        return int(((d[x] - d[y]) % self.p) @ self._pw)

    def neg(self, x):
        return int(self._neg[x])

    def mul(self, x, y):
        if x == 0 or y == 0:
            return 0
        return self._exp_list[self._log_list[x] + self._log_list[y]]

    def inv(self, x):
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._exp_list[(self.q - 1 - self._log_list[x]) % (self.q - 1)]

    def pow(self, x, e: int):
        if e == 0:
            return 1
        if x == 0:
            return 0
        return self._exp_list[(self._log_list[x] * e) % (self.q - 1)]

    def decode(self, s: str):
        return self.convert(int(s))

    def in_prime_field(self, x) -> bool:
        return 0 <= x < self.p

    # vectorised kernels (int64 arrays of encoded elements) -------------
    def vadd(self, x, y):
        d = self._digits
        return ((d[x] + d[y]) % self.p) @ self._pw

    def vsub(self, x, y):
        d = self._digits
        return ((d[x] - d[y]) % self.p) @ self._pw

    def vneg(self, x):
        return self._neg[x]

    def vmul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        out = self._exp[self._log[x] + self._log[y]]
        return np.where((x == 0) | (y == 0), 0, out)

    def vinv(self, x):
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.q - 1 - self._log[x]) % (self.q - 1)]

    def vpow(self, x, e):
        """Elementwise ``x**e`` for integer arrays ``e >= 0`` (0**0 == 1)."""
        x = np.asarray(x, dtype=np.int64)
        e = np.asarray(e, dtype=np.int64)
        lg = self._log[x]
        out = self._exp[(lg * e) % (self.q - 1)]
        out = np.where(x == 0, 0, out)
        return np.where(e == 0, 1, out)

    def vsum(self, x, axis=0):
        """Sum of encoded elements along ``axis``."""
        d = self._digits[np.asarray(x, dtype=np.int64)]
        return (d.sum(axis=axis) % self.p) @ self._pw

    def random(self, rng, size):
        return rng.integers(0, self.q, size=size, dtype=np.int64)


@lru_cache(maxsize=None)
def gf3m(m: int = 8) -> ExtensionField:
    """Shared instance of GF(3^m) (tables are built once)."""
    return ExtensionField(m)


def domain_from_tag(tag: str, m=None) -> Domain:
    if tag == "Z":
        return ZZ
    if tag == "Q":
        return QQ
    if tag == "GF3":
        return GF3
    if tag == "GF3m":
        if m is None:
            raise ValueError("GF3m domain requires m")
        return gf3m(int(m))
    raise ValueError(f"unknown domain tag {tag!r}")
