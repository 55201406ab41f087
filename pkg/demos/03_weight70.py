"""
The weight-70 square
====================

Checks the weight-42 relation, then writes E^2 D^4 in the generators
to get the polynomial P with chi35^2 = P, and certifies it exactly.
"""

from siegel3.invariants import generators_char3
from siegel3.ring import (
    compute_P,
    express_in_abcd,
    express_in_generators,
    verify_P_exact,
    verify_P_sampled,
    verify_relation6,
)
from siegel3.valuation import generator_forms, h1_lower_bound, is_cusp

inv = generators_char3()

# %% orders along H1 decide which quotients by chi10 are regular
for name, P in inv.as_dict().items():
    print(name, h1_lower_bound(P))
for g, phi in generator_forms(inv).items():
    print(f"{g:6s} weight {phi.weight:2d} bound {phi.h1_bound:2d} cusp {is_cusp(phi, inv.D)}")

# %% weight 42
print(verify_relation6(inv))
SD3 = inv.S * inv.D**3
print(express_in_generators(SD3, 42, inv))
print(express_in_generators(SD3, 42, inv, normal_form="relation"))

# %% weight 70: interpolation over GF(3^8), then the exact check
res = compute_P(inv)
P = res.form
print(f"{len(P.terms)} terms, weight {P.weight}, attempts {res.attempts}")
print("P =", P)

Q = express_in_abcd(inv.E**2, inv)
print("E^2 as a polynomial in A, B, C, D:", len(Q), "terms")
print(verify_P_exact(P, inv, Q))
print("100 random points agree:", verify_P_sampled(P, inv))
