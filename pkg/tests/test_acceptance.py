"""One check per acceptance criterion; each prints a PASS/FAIL line."""
import json
from fractions import Fraction

import pytest

from siegel3.invariants import NAMES, expected_slices, printed_A, printed_B
from siegel3.ring import (
    RELATION_RHS,
    basis_monomials,
    compute_P,
    express_in_generators,
    hilbert_r,
    independence_rank,
    series_constant,
    verify_counting,
    verify_P_exact,
    verify_P_sampled,
    verify_relation6,
)
from siegel3.sextic import invariant_space_basis, is_invariant
from siegel3.valuation import generator_forms, h1_lower_bound, is_cusp, is_regular

from conftest import run_cli


@pytest.fixture
def criterion(capsys):
    def emit(n, label, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {label}" + (f" ({detail})" if detail else ""))
        assert ok, f"criterion {n}: {label} {detail}"
    return emit


def test_criterion_01_golden(inv, criterion):
    ok = inv.A == printed_A() and inv.B == printed_B() and len(inv.B) == 12
    criterion(1, "A and B equal the printed polynomials", ok, f"{len(inv.A)} and {len(inv.B)} terms")


def test_criterion_02_slices(inv, criterion):
    bad = []
    for name, which, power, expected, top in expected_slices():
        P = getattr(inv, which)
        if P.slice("a3", power) != expected or (top is not None and P.degree_in("a3") != top):
            bad.append(name)
    criterion(2, "leading a3-slices of C, D, E, S", not bad, ", ".join(bad) or "6 slices")


def test_criterion_03_invariance(inv, criterion):
    bad = [n for n in NAMES if not is_invariant(getattr(inv, n), method="hasse")]
    criterion(3, "A..E and S are exact unipotent invariants", not bad, ", ".join(bad) or "exact t-identities")


def _generator_degree_counts(K):
    c = [1] + [0] * K
    for d in (2, 4, 6, 10):
        for k in range(d, K + 1):
            c[k] += c[k - d]
    return c


def test_criterion_04_oracle_dimensions(criterion):
    counts = _generator_degree_counts(10)
    dims = {d: len(invariant_space_basis(d)) for d in (0, 2, 4, 6, 8, 10, 15)}
    ok = (tuple(dims[d] for d in (0, 2, 4, 6, 8, 10)) == (1, 1, 2, 3, 4, 6)
          and all(dims[d] == counts[d] for d in (0, 2, 4, 6, 8, 10))
          and dims[15] == 1)
    criterion(4, "nullspace dimensions match generator-degree counts", ok, str(dims))


def test_criterion_05_valuation(inv, criterion):
    bounds = tuple(h1_lower_bound(getattr(inv, n)) for n in NAMES)
    forms = generator_forms(inv)
    weights = {g: f.weight for g, f in forms.items()}
    ok = (bounds == (0, -2, -6, 2, -3, 0)
          and all(is_regular(f) for f in forms.values())
          and weights == {"psi2": 2, "chi10": 10, "psi12": 12, "chi14": 14, "chi35": 35, "chi36": 36})
    criterion(5, "H1 bounds, regularity and weights", ok, f"bounds {bounds}")


def test_criterion_06_relation(inv, criterion):
    rel = verify_relation6(inv)
    got = express_in_generators(inv.S * inv.D**3, 42, inv, normal_form="relation")
    ok = rel["exact"] and got == RELATION_RHS
    criterion(6, "S D^3 relation and its expression in generators", ok, str(got))


def test_criterion_07_dimension_table(criterion):
    table = tuple(hilbert_r(k) for k in range(0, 15, 2))
    res = verify_counting(200)
    ok = table == (1, 1, 1, 1, 1, 2, 3, 4) and not res["failures"] and series_constant() == Fraction(1, 2880)
    criterion(7, "dimension table, counting to 200, series constant", ok,
              f"r = {table}, failures {len(res['failures'])}, constant {series_constant()}")


def test_criterion_08_basis_counts(criterion):
    bad = [k for k in range(0, 201, 2) if len(basis_monomials(k)) != hilbert_r(k)]
    criterion(8, "basis size equals hilbert_r for even k <= 200", not bad, f"mismatches {bad}")


def test_criterion_09_P(inv, criterion):
    P = compute_P(inv).form
    cert = verify_P_exact(P, inv)
    ok = (P.weights() == {70}
          and verify_P_sampled(P, inv, points=100)
          and cert["image_divisible_by_D"] and cert["image_equals_Q_D4"])
    criterion(9, "P of weight 70 with image E^2 D^4, divisible by D", ok, f"{len(P.terms)} terms")


def test_criterion_10_cusp_ideal(inv, criterion):
    cusp = {g for g, f in generator_forms(inv).items() if is_cusp(f, inv.D)}
    criterion(10, "cusp generators are chi10, chi14, chi35, chi36",
              cusp == {"chi10", "chi14", "chi35", "chi36"}, ", ".join(sorted(cusp)))


def test_criterion_11_determinism(verify_runs, tmp_path, criterion):
    (p1, d1), (p2, d2) = verify_runs
    same_report = p1.returncode == p2.returncode == 0 and (
        (d1 / "report.json").read_bytes() == (d2 / "report.json").read_bytes())
    cache = tmp_path / "cache"
    for out in ("o1", "o2"):
        run_cli("invariants", "--out", tmp_path / out, "--cache-dir", cache)
    same_files = all((tmp_path / "o1" / f"{n}.json").read_bytes() == (tmp_path / "o2" / f"{n}.json").read_bytes()
                     for n in NAMES)
    hits = json.loads((d2 / "timings.json").read_text())["cache_hits"]
    criterion(11, "identical reports and warm-cache polynomial files", same_report and same_files,
              f"warm cache hits {len(hits)}")


def test_criterion_12_independence(inv, criterion):
    res = independence_rank(24, inv)
    criterion(12, "full rank at every even weight <= 24", res["full"],
              ", ".join(f"{r['w']}:{r['rank']}/{r['count']}" for r in res["rows"]))
