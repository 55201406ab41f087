"""The generators A, B, C, D, E of the invariant ring of binary sextics over GF(3).

A, B, C, D come from characteristic-0 invariants built with transvectants
and reduced mod 3; E, the degree-15 skew invariant, is the unique (up to
scalar) invariant of degree 15 and is taken from the nullspace oracle.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .fields import GF3, QQ, ZZ
from .linalg import solve
from .polyring import (
    SEXTIC_VARS,
    SparsePoly,
    parse,
    reduce_mod_3,
    serialize,
    sha256,
)
from .sextic import (
    invariant_space_basis,
    is_invariant,
    isobaric_weight,
    swap_coefficients,
    transvectant,
    universal_sextic,
)

log = logging.getLogger(__name__)

CACHE_SCHEMA = 1
NAMES = ("A", "B", "C", "D", "E", "S")
DEGREES = {"A": 2, "B": 4, "C": 6, "D": 10, "E": 15, "S": 12}


def poly_from_string(text: str, domain=GF3, variables=SEXTIC_VARS) -> SparsePoly:
    """Parse sums like ``2*a0*a1*a5*a6 + a1*a3^2*a5`` (``**`` also accepted)."""
    terms = {}
    n = len(variables)
    for raw in text.replace(" ", "").replace("**", "^").split("+"):
        coef = 1
        exps = [0] * n
        for factor in filter(None, raw.split("*")):
            if factor.lstrip("-").isdigit():
                coef *= int(factor)
                continue
            name, _, power = factor.partition("^")
            exps[variables.index(name)] += int(power or 1)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coef
    return SparsePoly(variables, domain, terms)


PRINTED_A = "a1*a5 + 2*a2*a4"
PRINTED_B = (
    "2*a0*a1*a5*a6 + a0*a2*a4*a6 + 2*a0*a2*a5^2 + 2*a0*a4^3 + 2*a1^2*a4*a6"
    " + 2*a1*a2*a4*a5 + a1*a3^2*a5 + a1*a3*a4^2 + 2*a2^3*a6 + a2^2*a3*a5"
    " + a2^2*a4^2 + 2*a2*a3^2*a4"
)


def printed_A() -> SparsePoly:
    return poly_from_string(PRINTED_A)


def printed_B() -> SparsePoly:
    return poly_from_string(PRINTED_B)


# ------------------------------------------------------------------------
# characteristic 0
# ------------------------------------------------------------------------

@dataclass(frozen=True)
class Char0Invariants:
    J2: SparsePoly
    J4: SparsePoly
    J6: SparsePoly
    J10: SparsePoly
    intermediates: dict = field(default_factory=dict, compare=False, repr=False)


class GoldenMismatch(ArithmeticError):
    def __init__(self, name, expected, got):
        diff = got - expected
        shown = ", ".join(f"{c}*{e}" for e, c in diff.terms()[:8])
        super().__init__(f"{name}: {len(diff)} mismatching monomials ({shown})")
        self.diff = diff


def char0_invariants(check: bool = True) -> Char0Invariants:
    """Integral J2, J4, J6, J10 of the universal sextic.

    Built from the Clebsch transvectants; the scalar conventions are pinned
    by the two fully printed mod-3 reductions ``-J2 = A`` and ``-J4 = B``.
    """
    f = universal_sextic(QQ)
    i = transvectant(f, f, 4)
    delta = transvectant(i, i, 2)
    y1 = transvectant(f, i, 4)
    y2 = transvectant(i, y1, 2)
    y3 = transvectant(i, y2, 2)
    A_ = transvectant(f, f, 6).coeffs[0]
    B_ = transvectant(i, i, 4).coeffs[0]
    C_ = transvectant(i, delta, 4).coeffs[0]
    D_ = transvectant(y3, y1, 2).coeffs[0]

    I2 = A_ * -120
    I4 = A_**2 * -720 + B_ * 6750
    I6 = A_**3 * 8640 - A_ * B_ * 108000 + C_ * 202500
    I10 = (
        A_**5 * -62208
        + A_**3 * B_ * 972000
        + A_**2 * C_ * 1620000
        - A_ * B_**2 * 3037500
        - B_ * C_ * 6075000
        - D_ * 4556250
    )
    # normalisation for the model y^2 = 4f
    J2 = I2 * 2
    J4 = (I2**2 - I4 * 16).scale(Fraction(1, 6))
    J6 = (J2**3 * 8 - J2 * J4 * 160 - I6 * 4096).scale(Fraction(1, 576))
    J10 = I10 * 256
    Js = [x.change_domain(ZZ) for x in (J2, J4, J6, J10)]  # raises if not integral
    out = Char0Invariants(*Js, intermediates={"A'": A_, "B'": B_, "C'": C_, "D'": D_})
    if check:
        A = reduce_mod_3(-out.J2)
        if A != printed_A():
            raise GoldenMismatch("-J2 mod 3", printed_A(), A)
        B = reduce_mod_3(-out.J4)
        if B != printed_B():
            raise GoldenMismatch("-J4 mod 3", printed_B(), B)
    return out


# ------------------------------------------------------------------------
# characteristic 3
# ------------------------------------------------------------------------

@dataclass(frozen=True)
class NamedInvariants:
    A: SparsePoly
    B: SparsePoly
    C: SparsePoly
    D: SparsePoly
    E: SparsePoly
    S: SparsePoly

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in NAMES}


E_NORMALISING_MONOMIAL = (0, 3, 0, 6, 6, 0, 0)  # a1^3 a3^6 a4^6


def compute_E() -> SparsePoly:
    basis = invariant_space_basis(15)
    if len(basis) != 1:
        raise ArithmeticError(f"degree-15 invariants have dimension {len(basis)}, expected 1")
    E = basis[0]
    c = E.coefficient(E_NORMALISING_MONOMIAL)
    if c == 0:
        raise ArithmeticError("degree-15 invariant lacks the a1^3 a3^6 a4^6 term")
    return E.scale(GF3.inv(c))


def relation_S(A, B, C) -> SparsePoly:
    return B**3 + A**3 * C - A**2 * B**2


def generators_char3(validate: bool = True) -> NamedInvariants:
    J = char0_invariants()
    A = reduce_mod_3(-J.J2)
    B = reduce_mod_3(-J.J4)
    C = reduce_mod_3(-J.J6) - A**3
    D = reduce_mod_3(J.J10)
    E = compute_E()
    S = relation_S(A, B, C)
    inv = NamedInvariants(A, B, C, D, E, S)
    if validate:
        failed = [c for c in verify_golden(inv, membership=False) if not c["ok"]]
        if failed:
            raise ArithmeticError("generator validation failed: " + ", ".join(c["name"] for c in failed))
    return inv


# ------------------------------------------------------------------------
# golden checks
# ------------------------------------------------------------------------

def _a(i):
    return SparsePoly.variable(SEXTIC_VARS, GF3, f"a{i}")


def expected_slices() -> list:
    """``(name, invariant, a3 power, expected slice, expected a3 degree or None)``."""
    a1, a2, a4, a5 = _a(1), _a(2), _a(4), _a(5)
    one = SparsePoly.constant(SEXTIC_VARS, GF3, 1)
    u = a1 * a4**2 + a2**2 * a5
    v = a1 * a4**2 - a2**2 * a5
    return [
        ("C a3^6 coefficient is 2", "C", 6, one.scale(2), 6),
        ("C a3^4 slice is A", "C", 4, printed_A(), None),
        ("C a3^3 slice is 2(a1a4^2+a2^2a5)", "C", 3, u.scale(2), None),
        ("D a3^4 slice is (a1a5)^3", "D", 4, (a1 * a5) ** 3, 4),
        ("E a3^6 slice is (a1a4^2-a2^2a5)^3", "E", 6, v**3, 6),
        ("S a3^3 slice is (a1a4^2+a2^2a5)^3", "S", 3, u**3, 3),
    ]


def span_coordinates(P: SparsePoly, basis: list):
    """Coordinates of ``P`` in the span of ``basis`` (GF(3)), or ``None``."""
    if not basis:
        return [] if P.is_zero() else None
    monos = sorted({e for b in basis for e, _ in b.items()} | {e for e, _ in P.items()})
    index = {m: i for i, m in enumerate(monos)}
    M = np.zeros((len(monos), len(basis)), dtype=np.int64)
    for j, b in enumerate(basis):
        for e, c in b.items():
            M[index[e], j] = c
    rhs = np.zeros(len(monos), dtype=np.int64)
    for e, c in P.items():
        rhs[index[e]] = c
    x = solve(M, rhs, 3)
    return None if x is None else [int(v) for v in x]


def swap_sign(P: SparsePoly):
    """``s`` in {+1, -1} with ``swap(P) = s*P``, or ``None``."""
    Q = swap_coefficients(P)
    if Q == P:
        return 1
    if Q == -P:
        return -1
    return None


def verify_golden(inv: NamedInvariants, membership: bool = True) -> list:
    """Pass/fail records for every printed identity (and oracle membership)."""
    checks = []

    def add(name, ok, detail=""):
        checks.append({"name": name, "ok": bool(ok), "detail": detail})

    add("A equals a1a5 - a2a4", inv.A == printed_A(), f"{len(inv.A)} terms")
    add("B equals the printed 12-term polynomial", inv.B == printed_B(), f"{len(inv.B)} terms")
    for name, which, power, expected, top in expected_slices():
        P = getattr(inv, which)
        ok = P.slice("a3", power) == expected
        deg = P.degree_in("a3")
        if top is not None:
            ok = ok and deg == top
        add(name, ok, f"a3-degree {deg}")
    for n in NAMES:
        P = getattr(inv, n)
        w = isobaric_weight(P)
        add(f"{n} is invariant", is_invariant(P), f"degree {P.degree()}, weight {w}")
        add(f"{n} has weight 3*degree", w == 3 * DEGREES[n] and P.degree() == DEGREES[n], f"weight {w}")
    for n in ("A", "B", "D"):
        add(f"{n} is swap-symmetric up to sign", swap_sign(getattr(inv, n)) is not None,
            f"sign {swap_sign(getattr(inv, n))}")
    if membership:
        for n in ("A", "B", "C", "D"):
            P = getattr(inv, n)
            coords = span_coordinates(P, invariant_space_basis(DEGREES[n]))
            add(f"{n} lies in the degree-{DEGREES[n]} invariant space", coords is not None)
    return checks


# ------------------------------------------------------------------------
# disk cache
# ------------------------------------------------------------------------

def code_version() -> str:
    return f"{__version__}+cache{CACHE_SCHEMA}"


@dataclass
class CacheResult:
    invariants: NamedInvariants
    hits: list
    hashes: dict


def load_or_compute(cache_dir: str | os.PathLike | None = ".invariant-cache") -> CacheResult:
    """Named invariants, read from ``cache_dir`` when valid and written back otherwise.

    A cache file whose bytes do not match the recorded hash, or that fails to
    parse, is ignored with a warning and recomputed.
    """
    if cache_dir is None:
        inv = generators_char3()
        return CacheResult(inv, [], {n: sha256(serialize(getattr(inv, n))) for n in NAMES})
    path = Path(cache_dir)
    meta_path = path / "meta.json"
    meta = {}
    if meta_path.exists():
        try:
            meta = json.loads(meta_path.read_text())
        except (OSError, ValueError):
            log.warning("cache metadata %s is unreadable; recomputing", meta_path)
            meta = {}
    polys, hits = {}, []
    if meta.get("version") == code_version():
        for n in NAMES:
            fp = path / f"{n}.json"
            want = meta.get("sha256", {}).get(n)
            try:
                data = fp.read_bytes()
            except OSError:
                continue
            if sha256(data) != want:
                log.warning("cache file %s does not match its recorded hash; recomputing", fp)
                continue
            try:
                polys[n] = parse(data)
            except ValueError as exc:
                log.warning("cache file %s is corrupt (%s); recomputing", fp, exc)
                continue
            hits.append(n)
    if len(polys) == len(NAMES):
        inv = NamedInvariants(**polys)
    else:
        inv = generators_char3()
    hashes = {}
    path.mkdir(parents=True, exist_ok=True)
    for n in NAMES:
        data = serialize(getattr(inv, n))
        hashes[n] = sha256(data)
        if n not in hits:
            (path / f"{n}.json").write_bytes(data)
    meta_path.write_text(json.dumps({"version": code_version(), "sha256": hashes}, indent=1, sort_keys=True) + "\n")
    return CacheResult(inv, hits, hashes)
