import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel3.fields import GF3, QQ, gf3m
from siegel3.linalg import nullspace
from siegel3.polyring import SEXTIC_VARS, SparsePoly, evaluate, substitute
from siegel3.sextic import (
    BinaryForm,
    act_on_points,
    count_isobaric,
    hasse_expansion,
    invariance_defect,
    invariant_space_basis,
    is_invariant,
    isobaric_monomials,
    isobaric_weight,
    swap_coefficients,
    transvectant,
    unipotent_action,
    unipotent_images,
    universal_sextic,
)

VT = SEXTIC_VARS + ("t",)


def test_unipotent_fixed_coefficients(a):
    assert unipotent_action("upper", a[6]) == a[6].embed(VT)
    assert unipotent_action("lower", a[0]) == a[0].embed(VT)
    assert unipotent_action("upper", a[0]) != a[0].embed(VT)
    assert unipotent_action("lower", a[6]) != a[6].embed(VT)
    assert unipotent_action("lower", a[3]) - a[3].embed(VT) != SparsePoly.zero(VT, GF3)


monomials = st.tuples(*[st.integers(0, 2)] * 7)
gf3_polys = st.dictionaries(monomials, st.integers(1, 2), min_size=1, max_size=4).map(
    lambda d: SparsePoly(SEXTIC_VARS, GF3, d)
)


@settings(max_examples=60, deadline=None)
@given(gf3_polys, st.sampled_from(["upper", "lower"]))
def test_hasse_matches_direct(P, which):
    assert unipotent_action(which, P, "hasse") == unipotent_action(which, P, "direct")


@settings(max_examples=30, deadline=None)
@given(gf3_polys, st.sampled_from(["upper", "lower"]))
def test_action_composes_additively(P, which):
    # sigma_s(sigma_t(P)) == sigma_{t+s}(P)
    Pt = unipotent_action(which, P, "direct")
    imgs_s = unipotent_images(which, GF3, "s")
    lhs = substitute(Pt, dict(zip(SEXTIC_VARS, imgs_s)))
    names = lhs.variables
    ts = SparsePoly.gens(("t", "s"), GF3)
    rhs = substitute(Pt, {"t": ts[0] + ts[1]}).embed(names)
    assert lhs == rhs


def test_hasse_terms_sum_to_action(a):
    P = a[1] * a[5] - a[2] * a[4] + a[0] * a[3] ** 2
    H = hasse_expansion("upper", P)
    t = SparsePoly.variable(VT, GF3, "t")
    total = SparsePoly.zero(VT, GF3)
    for k, Hk in enumerate(H):
        total = total + Hk.embed(VT) * t**k
    assert total == unipotent_action("upper", P, "direct")


def test_act_on_points_matches_symbolic(a):
    F = gf3m(8)
    rng = np.random.default_rng(9)
    pts = F.random(rng, (8, 7))
    ts = F.random(rng, 8)
    for which in ("upper", "lower"):
        imgs = unipotent_images(which, GF3)
        moved = act_on_points(which, pts, ts, F)
        for r in range(8):
            point = dict(zip(SEXTIC_VARS, (int(x) for x in pts[r])))
            point["t"] = int(ts[r])
            assert [evaluate(im, point, F) for im in imgs] == moved[r].tolist()


def test_invariance_examples(a):
    A = a[1] * a[5] - a[2] * a[4]
    assert is_invariant(A)
    assert not is_invariant(a[3])
    which, k, H = invariance_defect(a[3] ** 2)
    assert k >= 1 and not H.is_zero()
    assert invariance_defect(A) is None


def test_isobaric_weight(a):
    assert isobaric_weight(a[1] * a[5] + a[2] * a[4]) == 6
    assert isobaric_weight(a[1] + a[2]) is None


@pytest.mark.parametrize("d", range(0, 7))
def test_isobaric_count_brute_force(d):
    w = 3 * d
    brute = [e for e in itertools.product(range(d + 1), repeat=7)
             if sum(e) == d and sum(i * x for i, x in enumerate(e)) == w]
    assert sorted(isobaric_monomials(d, w)) == sorted(brute)
    assert count_isobaric(d, w) == len(brute)


def _oracle_dimension(d):
    # both subgroups on the full isobaric space, literal substitution
    mons = isobaric_monomials(d, 3 * d)
    rows = {}
    for c, m in enumerate(mons):
        P = SparsePoly.monomial(SEXTIC_VARS, GF3, m)
        for which in ("upper", "lower"):
            Q = unipotent_action(which, P, "direct")
            for e, v in Q.items():
                if e[-1]:
                    rows.setdefault((which, e), {})[c] = v
    M = np.zeros((len(rows), len(mons)), dtype=np.int64)
    for r, cols in enumerate(rows.values()):
        for c, v in cols.items():
            M[r, c] = v
    return len(nullspace(M, 3)) if len(rows) else len(mons)


@pytest.mark.parametrize("d", range(0, 7))
def test_invariant_dimension_against_oracle(d):
    assert len(invariant_space_basis(d)) == _oracle_dimension(d)


def test_invariant_dimensions_small_degrees():
    dims = [len(invariant_space_basis(d)) for d in range(11)]
    assert dims == [1, 0, 1, 0, 2, 0, 3, 0, 4, 0, 6]


def test_transvectant_examples():
    u = BinaryForm.from_constants([1, 0, 0])   # x1^2
    v = BinaryForm.from_constants([0, 0, 1])   # x2^2
    assert transvectant(u, v, 2) == BinaryForm.from_constants([1])
    f = universal_sextic(QQ)
    for k in (1, 3, 5):
        assert transvectant(f, f, k).is_zero()
    g = BinaryForm.from_constants([1, 2, 3], QQ, SEXTIC_VARS)
    assert transvectant(f, g, 0) == f * g


def test_transvectant_rejects_char3():
    f = universal_sextic(GF3)
    with pytest.raises(ValueError):
        transvectant(f, f, 2)
    with pytest.raises(ValueError):
        transvectant(universal_sextic(QQ), universal_sextic(QQ), 7)


def test_swap_coefficients(a):
    assert swap_coefficients(a[0] * a[5] ** 2) == a[6] * a[1] ** 2
