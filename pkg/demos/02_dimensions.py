"""
Dimensions of the graded ring
=============================

Compares the nullspace computation of invariant spaces with monomial
counts, then tabulates r(k) for the ring generated in weights
2, 10, 12, 14, 36 with one relation in weight 42.
"""

from siegel3.ring import basis_monomials, hilbert_odd, hilbert_r, leading_coefficient, verify_counting
from siegel3.sextic import invariant_space_basis

# invariants of degree d against monomials in A, B, C, D (degrees 2, 4, 6, 10)
counts = [1] + [0] * 10
for d in (2, 4, 6, 10):
    for k in range(d, 11):
        counts[k] += counts[k - d]
for d in range(0, 11, 2):
    print(f"degree {d:2d}: nullspace {len(invariant_space_basis(d))}, monomials {counts[d]}")

# %% the table
print(" k  r(k)  basis")
for k in range(0, 44, 2):
    print(f"{k:2d}  {hilbert_r(k):4d}  {len(basis_monomials(k)):5d}")

# weight 42 is where chi14^3 drops out of the basis
print(sorted(basis_monomials(42)))

# %% odd weights start at 35
print([hilbert_odd(k) for k in range(35, 60, 2)])

# %% counting argument up to 200
res = verify_counting(200)
print("failures:", res["failures"])
for row in res["rows"][:10]:
    print(row)

lc = leading_coefficient()
print("r(k) ~", lc["coefficient_of_k3"], "k^3, i.e.", lc["coefficient_of_(k/2)^3"], "(k/2)^3")
