"""The graded ring F3[psi2, chi10, psi12, chi14, chi36] / (relation) and its invariant images.

Generators map to invariants of the sextic by

    psi2 -> A, chi10 -> D, psi12 -> S, chi14 -> B*D, chi36 -> C*D^3, chi35 -> E*D^2.

Expressing an invariant in the generators is done by interpolation: evaluate
both sides at random points of GF(3^8)^7 and solve a small linear system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .fields import GF3, ExtensionField, gf3m
from .linalg import rank, solve_unique
from .polyring import SEXTIC_VARS, SparsePoly, evaluate_many, exact_divide
from .sextic import count_isobaric, invariance_defect

GENS = ("psi2", "chi10", "psi12", "chi14", "chi36")
GEN_WEIGHTS = (2, 10, 12, 14, 36)
CHI35_WEIGHT = 35
RELATION_WEIGHT = 42
DEFAULT_SEED = 0x5EED
OVERSAMPLE = 64
MAX_RETRIES = 8
EXTRA_CHECKS = 256
EXACT_TERM_CAP = 40_000


class NotInvariant(ValueError):
    def __init__(self, defect):
        which, k, H = defect
        if which == "weight":
            msg = "not invariant: polynomial is not isobaric of weight 3*degree"
        else:
            msg = f"not invariant: {which} unipotent action has nonzero t^{k} coefficient {H}"
        super().__init__(msg)
        self.defect = defect


class Underdetermined(ArithmeticError):
    pass


class Inconsistency(ArithmeticError):
    """Internal contradiction, e.g. a basis size disagreeing with the Hilbert series."""


# ------------------------------------------------------------------------
# Hilbert series and bases
# ------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _free_counts(K: int) -> tuple:
    """Number of monomials of each weight 0..K in the five free generators."""
    c = [0] * (K + 1)
    c[0] = 1
    for d in GEN_WEIGHTS:
        for k in range(d, K + 1):
            c[k] += c[k - d]
    return tuple(c)


def hilbert_r(k: int) -> int:
    """Coefficient of t^k in (1-t^42) / prod (1-t^d), d in (2, 10, 12, 14, 36)."""
    if k % 2:
        raise ValueError("hilbert_r is defined for even weights")
    if k < 0:
        return 0
    c = _free_counts(max(k, 64))
    return c[k] - (c[k - RELATION_WEIGHT] if k >= RELATION_WEIGHT else 0)


def hilbert_odd(k: int) -> int:
    """Odd weights: multiplication by chi35, r(k) = hilbert_r(k - 35)."""
    if k % 2 == 0:
        raise ValueError("hilbert_odd is defined for odd weights")
    return hilbert_r(k - CHI35_WEIGHT) if k >= CHI35_WEIGHT else 0


def dimension(k: int) -> int:
    return hilbert_r(k) if k % 2 == 0 else hilbert_odd(k)


def gen_weight(e) -> int:
    return sum(x * w for x, w in zip(e, GEN_WEIGHTS))


def _all_monomials(k: int) -> list:
    out = []
    e = [0] * 5

    def rec(i, left):
        if i == 4:
            if left % GEN_WEIGHTS[4] == 0:
                e[4] = left // GEN_WEIGHTS[4]
                out.append(tuple(e))
            return
        for x in range(left // GEN_WEIGHTS[i], -1, -1):
            e[i] = x
            rec(i + 1, left - x * GEN_WEIGHTS[i])
        e[i] = 0

    if k >= 0:
        rec(0, k)
    return out


NORMAL_FORMS = ("standard", "relation")


def basis_monomials(k: int, normal_form: str = "standard") -> list:
    """Monomials of weight ``k`` spanning R_k, lexicographically descending.

    ``standard`` keeps those with chi14-exponent at most 2.  ``relation``
    keeps those not divisible by psi12*chi10^3, the other side of the
    weight-42 relation; both are bases of R_k.
    """
    if k % 2:
        raise ValueError("basis_monomials is defined for even weights")
    mons = _all_monomials(k)
    if normal_form == "standard":
        mons = [m for m in mons if m[3] <= 2]
    elif normal_form == "relation":
        mons = [m for m in mons if not (m[1] >= 3 and m[2] >= 1)]
    else:
        raise ValueError(f"unknown normal form {normal_form!r}")
    if len(mons) != hilbert_r(k):
        raise Inconsistency(f"weight {k}: {len(mons)} basis monomials but hilbert_r = {hilbert_r(k)}")
    return mons


def dim_level1(k: int) -> int:
    if k < 0 or k % 2:
        raise ValueError("dim_level1 expects an even weight >= 0")
    return k // 12 + 1


def counting_bound(k: int) -> int:
    c = dim_level1(k)
    return (hilbert_r(k - 10) if k >= 10 else 0) + c * (c + 1) // 2


def recurrence_applies(k: int) -> bool:
    return k % 12 not in (0, 2)


def verify_counting(K: int) -> dict:
    """Counting checks for every even ``k <= K``; failures are collected, not raised."""
    if K < 14 or K % 2:
        raise ValueError("verify_counting expects an even bound >= 14")
    rows, failures = [], []
    for k in range(0, K + 1, 2):
        r = hilbert_r(k)
        prev = hilbert_r(k - 10) if k >= 10 else 0
        c = dim_level1(k)
        bound = counting_bound(k)
        row = {"k": k, "r": r, "c": c, "bound": bound}
        if r > bound:
            failures.append(f"k={k}: r={r} exceeds bound {bound}")
        if recurrence_applies(k):
            ok = r - prev == c * (c + 1) // 2
            row["recurrence"] = "holds" if ok else "fails"
            if not ok:
                failures.append(f"k={k}: r(k)-r(k-10)={r - prev} != {c * (c + 1) // 2}")
        else:
            row["recurrence"] = "exempt"
        if k + 2 <= K:
            step = hilbert_r(k + 2) - r
            if step < 0:
                failures.append(f"k={k}: r(k+2) < r(k)")
            n_new = sum(1 for m in basis_monomials(k + 2) if m[0] == 0)
            if n_new != step:
                failures.append(f"k={k}: {n_new} psi2-free monomials at k+2 but step {step}")
            row["N_next"] = n_new
        row["r_odd"] = hilbert_odd(k + CHI35_WEIGHT)
        rows.append(row)
    return {"K": K, "rows": rows, "failures": failures}


def series_constant() -> Fraction:
    return Fraction(RELATION_WEIGHT, int(np.prod(GEN_WEIGHTS)))


def leading_coefficient() -> dict:
    """Leading cubic behaviour of r(k) from the series, against the stated 1/1080."""
    # r(k) ~ 42 / prod(d) * k^3 / 3! * 2 (only even k occur)
    in_k = series_constant() * 2 / 6
    in_half = in_k * 8                    # in terms of n = k/2
    K = 20_000
    return {
        "coefficient_of_k3": in_k,
        "coefficient_of_(k/2)^3": in_half,
        "stated": Fraction(1, 1080),
        "numeric_r(K)/K^3": hilbert_r(K) / K**3,
        "K": K,
    }


# ------------------------------------------------------------------------
# form polynomials
# ------------------------------------------------------------------------

def _render_mono(e, chi35=False):
    parts = [(g if x == 1 else f"{g}^{x}") for g, x in zip(GENS, e) if x]
    if chi35:
        parts.append("chi35")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class FormPoly:
    """GF(3)-combination of generator monomials (optionally times chi35)."""

    terms: tuple = ()          # ((e1..e5), c) with c in {1, 2}, lexicographically descending
    chi35: bool = False

    @classmethod
    def from_dict(cls, d, chi35=False):
        items = sorted(((tuple(e), int(c) % 3) for e, c in d.items()), reverse=True)
        return cls(tuple((e, c) for e, c in items if c), chi35)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def weights(self) -> set:
        extra = CHI35_WEIGHT if self.chi35 else 0
        return {gen_weight(e) + extra for e, _ in self.terms}

    @property
    def weight(self):
        w = self.weights()
        return w.pop() if len(w) == 1 else None

    def __add__(self, other):
        if self.chi35 != other.chi35:
            raise ValueError("cannot add forms of different parity")
        d = self.as_dict()
        for e, c in other.terms:
            d[e] = (d.get(e, 0) + c) % 3
        return FormPoly.from_dict(d, self.chi35)

    def __sub__(self, other):
        return self + other.scale(2)

    def scale(self, s):
        return FormPoly.from_dict({e: c * s for e, c in self.terms}, self.chi35)

    def __mul__(self, other):
        if self.chi35 and other.chi35:
            raise ValueError("chi35^2 is not a monomial; substitute P first")
        d = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = (d.get(e, 0) + c1 * c2) % 3
        return FormPoly.from_dict(d, self.chi35 or other.chi35)

    @classmethod
    def monomial(cls, e, c=1, chi35=False):
        return cls.from_dict({tuple(e): c}, chi35)

    def max_chi14(self) -> int:
        return max((e[3] for e, _ in self.terms), default=0)

    def reduce_relation(self) -> "FormPoly":
        """Rewrite chi14^3 -> psi12 chi10^3 - psi2^3 chi36 + psi2^2 chi10 chi14^2 until e4 <= 2."""
        d = self.as_dict()
        while True:
            hit = next((e for e in sorted(d, reverse=True) if e[3] >= 3 and d[e]), None)
            if hit is None:
                return FormPoly.from_dict(d, self.chi35)
            c = d.pop(hit)
            b = list(hit)
            b[3] -= 3
            for shift, s in (((0, 3, 1, 0, 0), 1), ((3, 0, 0, 0, 1), -1), ((2, 1, 0, 2, 0), 1)):
                e = tuple(x + y for x, y in zip(b, shift))
                d[e] = (d.get(e, 0) + s * c) % 3

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.terms):
            mono = _render_mono(e, self.chi35)
            if c == 1:
                out.append(mono if i == 0 else f"+ {mono}")
            else:
                out.append(f"-{mono}" if i == 0 else f"- {mono}")
        return " ".join(out)

    def __str__(self):
        return self.render()

    def to_json_obj(self) -> dict:
        obj = {"gens": list(GENS), "terms": [{"e": list(e), "c": int(c)} for e, c in self.terms]}
        if self.chi35:
            obj["times"] = "chi35"
        return obj

    def to_json(self) -> bytes:
        return (json.dumps(self.to_json_obj(), separators=(",", ":")) + "\n").encode()

    @classmethod
    def from_json(cls, data) -> "FormPoly":
        obj = json.loads(data)
        if obj.get("gens") != list(GENS):
            raise ValueError("unexpected generator list")
        return cls.from_dict({tuple(t["e"]): t["c"] for t in obj["terms"]}, obj.get("times") == "chi35")


# ------------------------------------------------------------------------
# invariant images
# ------------------------------------------------------------------------

def generator_images(inv) -> list:
    D = inv.D
    return [inv.A, D, inv.S, inv.B * D, inv.C * D**3]


def monomial_to_invariant(e, inv, with_chi35: bool = False) -> SparsePoly:
    """``A^e1 D^e2 S^e3 (BD)^e4 (CD^3)^e5``, times ``E D^2`` if requested."""
    A, B, C, D, S = inv.A, inv.B, inv.C, inv.D, inv.S
    out = A ** e[0] * S ** e[2] * B ** e[3] * C ** e[4]
    dpow = e[1] + e[3] + 3 * e[4]
    if with_chi35:
        out = out * inv.E
        dpow += 2
    return out * D**dpow


def invariant_image(F: FormPoly, inv) -> SparsePoly:
    acc = SparsePoly.zero(SEXTIC_VARS, GF3)
    for e, c in F.terms:
        acc = acc + monomial_to_invariant(e, inv, F.chi35).scale(c)
    return acc


ABCD = ("A", "B", "C", "D")


def abcd_image(F: FormPoly) -> SparsePoly:
    """Image in the free polynomial ring GF(3)[A, B, C, D] (chi35 excluded)."""
    if F.chi35:
        raise ValueError("abcd_image is for even forms")
    A, B, C, D = SparsePoly.gens(ABCD, GF3)
    imgs = [A, D, B**3 + A**3 * C - A**2 * B**2, B * D, C * D**3]
    acc = SparsePoly.zero(ABCD, GF3)
    for e, c in F.terms:
        term = SparsePoly.constant(ABCD, GF3, c)
        for g, x in zip(imgs, e):
            if x:
                term = term * g**x
        acc = acc + term
    return acc


@dataclass(frozen=True)
class InvariantProduct:
    """Lazy product of powers of invariants, e.g. E^2 D^4."""

    factors: tuple                  # ((SparsePoly, exponent), ...)
    label: str = ""

    def degree(self) -> int:
        return sum(P.degree() * k for P, k in self.factors)

    def expand(self) -> SparsePoly:
        acc = SparsePoly.constant(SEXTIC_VARS, GF3, 1)
        for P, k in self.factors:
            acc = acc * P**k
        return acc

    def evaluate_many(self, points, F) -> np.ndarray:
        out = np.ones(len(points), dtype=np.int64)
        for P, k in self.factors:
            out = F.vmul(out, F.vpow(evaluate_many(P, points, F), k))
        return out


class GeneratorValues:
    """Values of the generator images at a batch of points."""

    def __init__(self, inv, points, F: ExtensionField):
        self.F = F
        self.points = points
        self.val = {n: evaluate_many(getattr(inv, n), points, F) for n in ("A", "B", "C", "D", "E", "S")}
        v = self.val
        D = v["D"]
        self.gens = [v["A"], D, v["S"], F.vmul(v["B"], D), F.vmul(v["C"], F.vpow(D, 3))]
        self.chi35 = F.vmul(v["E"], F.vpow(D, 2))

    def monomial(self, e, chi35=False):
        F = self.F
        out = np.ones(len(self.points), dtype=np.int64)
        for g, x in zip(self.gens, e):
            if x:
                out = F.vmul(out, F.vpow(g, x))
        if chi35:
            out = F.vmul(out, self.chi35)
        return out

    def form(self, Fp: FormPoly):
        F = self.F
        out = np.zeros(len(self.points), dtype=np.int64)
        for e, c in Fp.terms:
            out = F.vadd(out, F.vmul(self.monomial(e, Fp.chi35), np.int64(c)))
        return out


def random_points(seed: int, tag, n: int, F: ExtensionField) -> np.ndarray:
    ss = np.random.SeedSequence([int(seed)] + [int(x) for x in tag])
    return F.random(np.random.default_rng(ss), (n, 7))


@dataclass
class Expression:
    form: FormPoly | None
    attempts: int
    verification: str
    seed: int
    points: int
    details: dict = field(default_factory=dict)


def _target_values(T, points, F):
    if isinstance(T, InvariantProduct):
        return T.evaluate_many(points, F)
    return evaluate_many(T, points, F)


def express_in_generators(
    T,
    k: int,
    inv,
    seed: int = DEFAULT_SEED,
    normal_form: str = "standard",
    field_degree: int = 8,
    exact_cap: int = EXACT_TERM_CAP,
    check_invariance: bool = True,
    report: bool = False,
):
    """The unique FormPoly of weight ``k`` whose invariant image is ``T``, or ``None``.

    Odd ``k`` is handled as chi35 times an even form of weight ``k - 35``.
    With ``report=True`` an :class:`Expression` record is returned instead.
    """
    if isinstance(T, SparsePoly):
        if check_invariance:
            defect = invariance_defect(T)
            if defect is not None:
                raise NotInvariant(defect)
        deg = T.degree() if not T.is_zero() else k
    else:
        deg = T.degree()
    if deg != k:
        raise ValueError(f"an invariant of degree {deg} cannot have weight {k}")
    chi35 = k % 2 == 1
    k_even = k - CHI35_WEIGHT if chi35 else k
    basis = basis_monomials(k_even, normal_form) if k_even >= 0 else []
    F = gf3m(field_degree)
    n = len(basis) + OVERSAMPLE
    result = None
    for attempt in range(MAX_RETRIES):
        pts = random_points(seed, (k, attempt, 1), n, F)
        gv = GeneratorValues(inv, pts, F)
        M = np.stack([gv.monomial(e, chi35) for e in basis], axis=1) if basis else np.zeros((n, 0), np.int64)
        b = _target_values(T, pts, F)
        x, full = solve_unique(M, b, F)
        if not full and x is not None:
            continue
        if x is None:
            result = Expression(None, attempt + 1, "inconsistent", seed, n)
            break
        if not all(F.in_prime_field(int(v)) for v in x):
            result = Expression(None, attempt + 1, "not defined over GF(3)", seed, n)
            break
        form = FormPoly.from_dict({e: int(c) for e, c in zip(basis, x)}, chi35)
        result = Expression(form, attempt + 1, "", seed, n)
        break
    else:
        raise Underdetermined(f"weight {k}: evaluation matrix rank-deficient after {MAX_RETRIES} attempts")
    if result.form is not None:
        result.verification = _verify_expression(result.form, T, k, inv, seed, F, exact_cap)
        if result.verification == "failed":
            result = Expression(None, result.attempts, "failed", seed, n)
    return result if report else result.form


def _verify_expression(form, T, k, inv, seed, F, exact_cap):
    if count_isobaric(k, 3 * k) <= exact_cap:
        target = T.expand() if isinstance(T, InvariantProduct) else T
        return "exact" if invariant_image(form, inv) == target else "failed"
    pts = random_points(seed, (k, 99, 2), EXTRA_CHECKS, F)
    gv = GeneratorValues(inv, pts, F)
    same = np.array_equal(gv.form(form), _target_values(T, pts, F))
    return f"{EXTRA_CHECKS} evaluations" if same else "failed"


# ------------------------------------------------------------------------
# relation, P, independence
# ------------------------------------------------------------------------

RELATION_RHS = FormPoly.from_dict({(0, 0, 0, 3, 0): 1, (3, 0, 0, 0, 1): 1, (2, 1, 0, 2, 0): -1})
RELATION_LHS = FormPoly.from_dict({(0, 3, 1, 0, 0): 1})


def verify_relation6(inv, seed: int = DEFAULT_SEED, points: int = 100) -> dict:
    """``S D^3 = (BD)^3 + A^3 (C D^3) - A^2 D (BD)^2`` exactly and at random points."""
    A, B, C, D, S = inv.A, inv.B, inv.C, inv.D, inv.S
    BD = B * D
    D3 = D**3
    lhs = S * D3
    rhs = BD**3 + A**3 * (C * D3) - A**2 * D * BD**2
    exact = lhs == rhs
    F = gf3m(8)
    pts = random_points(seed, (42, 6), points, F)
    gv = GeneratorValues(inv, pts, F)
    sampled = np.array_equal(gv.form(RELATION_LHS), gv.form(RELATION_RHS))
    return {"exact": exact, "sampled": sampled, "points": points, "terms": len(lhs)}


def compute_P(inv, seed: int = DEFAULT_SEED) -> Expression:
    """P with chi35^2 = P, from the weight-70 invariant E^2 D^4."""
    target = InvariantProduct(((inv.E, 2), (inv.D, 4)), "E^2 D^4")
    res = express_in_generators(target, 70, inv, seed=seed, report=True)
    if res.form is None:
        raise Inconsistency(f"E^2 D^4 is not in the span of weight-70 monomials ({res.verification})")
    return res


def abcd_monomials(d: int) -> list:
    """Exponents (i, j, k, l) with 2i + 4j + 6k + 10l = d."""
    out = []
    for l in range(d // 10, -1, -1):
        for k in range((d - 10 * l) // 6, -1, -1):
            for j in range((d - 10 * l - 6 * k) // 4, -1, -1):
                rest = d - 10 * l - 6 * k - 4 * j
                if rest % 2 == 0:
                    out.append((rest // 2, j, k, l))
    return out


def express_in_abcd(T: SparsePoly, inv):
    """Exact expression of ``T`` as a polynomial in A, B, C, D over GF(3), or ``None``."""
    from .invariants import span_coordinates

    mons = abcd_monomials(T.degree())
    prods = [inv.A**i * inv.B**j * inv.C**k * inv.D**l for i, j, k, l in mons]
    coords = span_coordinates(T, prods)
    if coords is None:
        return None
    return SparsePoly(ABCD, GF3, {m: c for m, c in zip(mons, coords) if c})


def verify_P_exact(P: FormPoly, inv, Q: SparsePoly | None = None) -> dict:
    """Exact certificate that the invariant image of ``P`` is ``E^2 D^4``.

    E^2 is written exactly as Q(A, B, C, D) in degree 30.  Since the image map
    factors through GF(3)[A, B, C, D], the identity image(P) = Q * D^4 in that
    ring implies the identity of invariants, and divisibility by D there
    implies divisibility by D in the invariant ring.
    """
    if Q is None:
        Q = express_in_abcd(inv.E**2, inv)
    img = abcd_image(P)
    Dv = SparsePoly.variable(ABCD, GF3, "D")
    ok = Q is not None and img == Q * Dv**4
    divisible = exact_divide(img, Dv) is not None
    return {"E2_in_ABCD": Q is not None, "Q_terms": 0 if Q is None else len(Q),
            "image_equals_Q_D4": bool(ok), "image_divisible_by_D": divisible}


def verify_P_by_expansion(P: FormPoly, inv) -> bool:
    """Full expansion of both sides in a0..a6 (slow, memory hungry)."""
    return invariant_image(P, inv) == InvariantProduct(((inv.E, 2), (inv.D, 4))).expand()


def verify_P_sampled(P: FormPoly, inv, seed: int = DEFAULT_SEED, points: int = 100) -> bool:
    F = gf3m(8)
    pts = random_points(seed, (70, 9), points, F)
    gv = GeneratorValues(inv, pts, F)
    target = InvariantProduct(((inv.E, 2), (inv.D, 4))).evaluate_many(pts, F)
    return bool(np.array_equal(gv.form(P), target))


INDEPENDENCE_CAP = 24
_IND_WEIGHTS = (2, 10, 12, 14)


def independence_rank(W: int, inv, cap: int = INDEPENDENCE_CAP) -> dict:
    """Rank of the monomials in A, D, S, BD at each even weight ``w <= W``."""
    if W > cap:
        raise ValueError(f"weight bound {W} exceeds the cap {cap}")
    imgs = [inv.A, inv.D, inv.S, inv.B * inv.D]
    rows = []
    for w in range(0, W + 1, 2):
        mons = [m[:4] for m in _all_monomials(w) if m[4] == 0]
        polys = []
        for m in mons:
            P = SparsePoly.constant(SEXTIC_VARS, GF3, 1)
            for g, x in zip(imgs, m):
                if x:
                    P = P * g**x
            polys.append(P)
        index = {}
        for P in polys:
            for e, _ in P.items():
                index.setdefault(e, len(index))
        M = np.zeros((len(index), len(polys)), dtype=np.int64)
        for j, P in enumerate(polys):
            for e, c in P.items():
                M[index[e], j] = c
        r = rank(M, 3) if polys else 0
        rows.append({"w": w, "count": len(mons), "rank": r, "full": r == len(mons)})
    return {"W": W, "rows": rows, "full": all(r["full"] for r in rows)}
