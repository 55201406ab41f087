"""
Invariants of the binary sextic over GF(3)
==========================================

Builds A, B, C, D, E and S, looks at their top a3-slices and checks that
they are fixed by both unipotent substitutions.
"""

from siegel3.invariants import generators_char3, swap_sign
from siegel3.polyring import SEXTIC_VARS, SparsePoly
from siegel3.fields import GF3
from siegel3.sextic import invariant_space_basis, is_invariant, unipotent_action

inv = generators_char3()
for name, P in inv.as_dict().items():
    print(f"{name}: degree {P.degree():2d}, {len(P):4d} terms")

# %% the two small ones print in full
print("A =", inv.A)
print("B =", inv.B)

# %% C, D, E, S are pinned by their highest power of a3
print("C, a3^6 coefficient:", inv.C.slice("a3", 6))
print("C, a3^4 slice:      ", inv.C.slice("a3", 4))
print("D, a3^4 slice:      ", inv.D.slice("a3", 4))
print("E, a3^6 slice:      ", inv.E.slice("a3", 6))
print("S, a3^3 slice:      ", inv.S.slice("a3", 3))

# %% invariance: sigma_t(P) - P vanishes identically in t
a3 = SparsePoly.variable(SEXTIC_VARS, GF3, "a3")
print("lower(a3) =", unipotent_action("lower", a3))
for name, P in inv.as_dict().items():
    print(name, "invariant:", is_invariant(P, method="hasse"))

# %% swapping x1 and x2 sends a_i to a_(6-i); E is the only odd one
print({n: swap_sign(P) for n, P in inv.as_dict().items()})

# %% the degree-15 invariants form a line, spanned by E
line = invariant_space_basis(15)
print(len(line), line[0] in (inv.E, -inv.E))
