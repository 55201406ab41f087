import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from siegel3.fields import GF3, QQ, ZZ, gf3m
from siegel3.polyring import (
    MAX_EXP,
    NUMPY_THRESHOLD,
    SEXTIC_VARS,
    DomainMismatch,
    ExponentOverflow,
    ParseError,
    SparsePoly,
    evaluate,
    evaluate_many,
    exact_divide,
    parse,
    reduce_mod_3,
    serialize,
    substitute,
)

V3 = ("x", "y", "z")


def polys(domain=GF3, variables=V3, max_exp=4, max_terms=6):
    n = len(variables)
    exps = st.tuples(*[st.integers(0, max_exp)] * n)
    if domain == ZZ:
        coeff = st.integers(-20, 20)
    else:
        coeff = st.integers(0, domain.p - 1)
    return st.dictionaries(exps, coeff, max_size=max_terms).map(
        lambda d: SparsePoly(variables, domain, d)
    )


LAWS = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@LAWS
@given(polys(), polys(), polys())
def test_ring_laws(f, g, h):
    zero = SparsePoly.zero(V3, GF3)
    one = SparsePoly.constant(V3, GF3, 1)
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + zero == f and f * one == f
    assert f - f == zero


@settings(max_examples=300, deadline=None)
@given(polys(), polys())
def test_exact_divide_recovers_factor(f, g):
    if g.is_zero():
        return
    assert exact_divide(f * g, g) == f


@settings(max_examples=300, deadline=None)
@given(polys(), polys(max_terms=3))
def test_exact_divide_sound(f, g):
    if g.is_zero():
        return
    q = exact_divide(f, g)
    if q is not None:
        assert q * g == f


def test_exact_divide_rejects():
    x, y = SparsePoly.gens(("x", "y"), GF3)
    assert exact_divide(x * x + y, x) is None
    assert exact_divide(x**3 - y**3, x - y) == x * x + x * y + y * y


@settings(max_examples=200, deadline=None)
@given(polys(), polys(), st.tuples(*[st.integers(0, 6560)] * 3))
def test_evaluate_homomorphism(f, g, pt):
    F = gf3m(8)
    point = dict(zip(V3, pt))
    fv, gv = evaluate(f, point, F), evaluate(g, point, F)
    assert evaluate(f * g, point, F) == F.mul(fv, gv)
    assert evaluate(f + g, point, F) == F.add(fv, gv)


@settings(max_examples=200, deadline=None)
@given(polys(max_exp=3, max_terms=4), polys(max_exp=3, max_terms=4), polys(variables=("u", "v"), max_exp=2, max_terms=3))
def test_substitute_homomorphism(f, g, img):
    b = {"x": img}
    assert substitute(f * g, b) == substitute(f, b) * substitute(g, b)
    assert substitute(f + g, b) == substitute(f, b) + substitute(g, b)


@settings(max_examples=300, deadline=None)
@given(polys(ZZ), polys(ZZ))
def test_reduce_mod_3_homomorphism(f, g):
    assert reduce_mod_3(f * g) == reduce_mod_3(f) * reduce_mod_3(g)
    assert reduce_mod_3(f - g) == reduce_mod_3(f) - reduce_mod_3(g)


def test_reduce_mod_3_rejects_fractions():
    f = SparsePoly(("x",), QQ, {(1,): Fraction(1, 2)})
    with pytest.raises(ValueError):
        reduce_mod_3(f)
    with pytest.raises(DomainMismatch):
        reduce_mod_3(SparsePoly.variable(("x",), GF3, "x"))


def test_numpy_multiply_matches_integer_product():
    rng = np.random.default_rng(3)
    def rand(k):
        return {tuple(int(v) for v in rng.integers(0, 10, 7)): int(rng.integers(1, 3)) for _ in range(k)}
    fz = SparsePoly(SEXTIC_VARS, ZZ, rand(260))
    gz = SparsePoly(SEXTIC_VARS, ZZ, rand(240))
    assert len(fz) * len(gz) >= NUMPY_THRESHOLD
    assert reduce_mod_3(fz) * reduce_mod_3(gz) == reduce_mod_3(fz * gz)


def test_power_matches_repeated_multiplication(a):
    A = a[1] * a[5] - a[2] * a[4]
    g = A + a[0] * a[6]
    acc = SparsePoly.constant(SEXTIC_VARS, GF3, 1)
    for _ in range(11):
        acc = acc * g
    assert g**11 == acc
    assert g**9 == substitute(g, {})**9


def test_grevlex_order(a):
    # total degree first, then smaller exponent in the last variable wins
    f = a[0] * a[6] + a[1] * a[5] + a[2] * a[4] + a[3] ** 3
    assert [e for e, _ in f.terms()] == [
        (0, 0, 0, 3, 0, 0, 0),
        (0, 0, 1, 0, 1, 0, 0),
        (0, 1, 0, 0, 0, 1, 0),
        (1, 0, 0, 0, 0, 0, 1),
    ]
    assert str(a[1] * a[5] - a[2] * a[4]) == "2*a2*a4 + a1*a5"


def test_queries(a):
    f = a[3] ** 4 * a[1] + 2 * a[3] * a[0] * a[6]
    assert f.degree() == 5
    assert f.degree_in("a3") == 4
    assert f.slice("a3", 4) == a[1]
    assert f.slice("a3", 1) == 2 * a[0] * a[6]
    assert not f.is_homogeneous()
    assert SparsePoly.zero(SEXTIC_VARS, GF3).degree() == -1


def test_exponent_overflow():
    x = SparsePoly.variable(("x",), GF3, "x")
    with pytest.raises(ExponentOverflow):
        x ** (MAX_EXP + 1)
    with pytest.raises(ExponentOverflow):
        (x ** 100) * (x ** 28)
    assert (x ** 100 * x ** 27).degree() == MAX_EXP


def test_domain_mismatch():
    x = SparsePoly.variable(("x",), GF3, "x")
    y = SparsePoly.variable(("x",), ZZ, "x")
    with pytest.raises(DomainMismatch):
        x + y


@settings(max_examples=200, deadline=None)
@given(polys(ZZ))
def test_serialize_round_trip(f):
    data = serialize(f)
    assert parse(data) == f
    assert serialize(parse(data)) == data
    assert data.endswith(b"\n")


def test_serialize_extension_field():
    F = gf3m(8)
    f = SparsePoly(("x",), F, {(2,): 5000, (0,): 1})
    assert parse(serialize(f)) == f
    assert json.loads(serialize(f))["m"] == 8


def test_parse_errors_carry_offsets():
    good = serialize(SparsePoly(("x",), GF3, {(1,): 1, (0,): 2})).decode()
    with pytest.raises(ParseError) as ei:
        parse(good[:-5])
    assert ei.value.offset > 0
    zero_coeff = '{"domain":"GF3","vars":["x"],"terms":[{"e":[1],"c":"0"}]}'
    with pytest.raises(ParseError) as ei:
        parse(zero_coeff)
    assert ei.value.offset == zero_coeff.index('{"e"')
    dup = '{"domain":"GF3","vars":["x"],"terms":[{"e":[1],"c":"1"},{"e":[1],"c":"2"}]}'
    with pytest.raises(ParseError) as ei:
        parse(dup)
    assert ei.value.offset == dup.rindex('{"e"')
    with pytest.raises(ParseError):
        parse('{"domain":"GF7","vars":[],"terms":[]}')


def test_evaluate_many_matches_scalar(a):
    F = gf3m(8)
    f = a[1] * a[5] ** 2 - a[2] * a[4] + a[3] ** 5 + 1
    pts = F.random(np.random.default_rng(5), (50, 7))
    vals = evaluate_many(f, pts, F)
    for row, v in zip(pts, vals):
        assert evaluate(f, dict(zip(SEXTIC_VARS, (int(x) for x in row))), F) == v
