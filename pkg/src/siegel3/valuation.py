"""Orders along the product locus H1 and regularity of rational forms.

A rational modular form is stored as ``(T, m)`` meaning ``nu(T) * chi10^m``
for an invariant ``T``.  Along H1 the coefficient ``a_i`` has order given by
:data:`WEIGHTS` (positions 0 and 6 are lower bounds, taken at their bound),
so the minimum over monomials is a sound lower bound for the order of
``nu(T)``; ``chi10`` vanishes there to order exactly 2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .polyring import SEXTIC_VARS, SparsePoly, exact_divide
from .sextic import is_invariant

WEIGHTS = (2, 1, 0, -1, 0, 1, 2)
EXACT_POSITIONS = (1, 2, 3, 4, 5)
CHI10_ORDER = 2


def h1_lower_bound(T: SparsePoly) -> int:
    """``min over monomials of sum_i WEIGHTS[i] * e_i``."""
    if T.is_zero():
        raise ValueError("the zero polynomial has no order")
    idx = [T.variables.index(v) for v in SEXTIC_VARS]
    return min(sum(w * e[j] for w, j in zip(WEIGHTS, idx)) for e, _ in T.items())


@dataclass(frozen=True)
class RationalForm:
    T: SparsePoly
    m: int = 0
    name: str = ""

    def __post_init__(self):
        if not is_invariant(self.T):
            raise ValueError("T must be an SL(2)-invariant")

    @property
    def weight(self) -> int:
        return self.T.degree() + 10 * self.m

    @property
    def h1_bound(self) -> int:
        return h1_lower_bound(self.T) + CHI10_ORDER * self.m


def is_regular(phi: RationalForm) -> bool:
    """Sufficient condition: the H1 lower bound is non-negative."""
    return phi.h1_bound >= 0


def mu_image(phi: RationalForm, D: SparsePoly) -> SparsePoly:
    """The invariant ``T * D^m`` attached to a regular form."""
    if not is_regular(phi):
        raise ValueError(f"{phi.name or 'form'} is not certified regular")
    if phi.m < 0:
        raise ValueError("negative powers of chi10 have no invariant image")
    return phi.T * D**phi.m


def is_cusp(phi: RationalForm, D: SparsePoly) -> bool:
    return exact_divide(mu_image(phi, D), D) is not None


# (invariant name, power of chi10); chi35 is nu(E D^2)
GENERATOR_DATA = {
    "psi2": ("A", 0),
    "chi10": ("D", 0),
    "psi12": ("S", 0),
    "chi14": ("B", 1),
    "chi35": ("E", 2),
    "chi36": ("C", 3),
}
GENERATOR_WEIGHTS = {"psi2": 2, "chi10": 10, "psi12": 12, "chi14": 14, "chi35": 35, "chi36": 36}
CUSP_GENERATORS = frozenset({"chi10", "chi14", "chi35", "chi36"})
EXPECTED_BOUNDS = {"A": 0, "B": -2, "C": -6, "D": 2, "E": -3, "S": 0}


def generator_forms(inv) -> dict:
    return {g: RationalForm(getattr(inv, T), m, g) for g, (T, m) in GENERATOR_DATA.items()}
