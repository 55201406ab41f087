import json

from conftest import run_cli

from siegel3.fields import GF3
from siegel3.invariants import NAMES
from siegel3.polyring import SEXTIC_VARS, SparsePoly, serialize
from siegel3.ring import FormPoly


def test_verify_twice_is_byte_identical(verify_runs):
    (p1, d1), (p2, d2) = verify_runs
    assert p1.returncode == 0, p1.stdout + p1.stderr
    assert p2.returncode == 0, p2.stdout + p2.stderr
    assert (d1 / "report.json").read_bytes() == (d2 / "report.json").read_bytes()
    assert (d1 / "report.md").read_bytes() == (d2 / "report.md").read_bytes()
    assert (d1 / "p-weight70.json").read_bytes() == (d2 / "p-weight70.json").read_bytes()


def test_report_schema(verify_runs):
    _, out = verify_runs[0]
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 7
    assert len(report["checks"]) == 12
    for c in report["checks"]:
        assert set(c) == {"name", "anchor", "status", "details"}
        assert c["status"] == "pass"
    timings = json.loads((out / "timings.json").read_text())
    assert sorted(json.loads((verify_runs[1][1] / "timings.json").read_text())["cache_hits"]) == sorted(NAMES)
    assert "phases_ms" in timings


def test_verify_usage_error():
    proc = run_cli("verify", "--max-weight", 13)
    assert proc.returncode == 2
    assert "max-weight" in proc.stderr


def test_unknown_command():
    assert run_cli("frobnicate").returncode == 2


def test_dims_rows():
    proc = run_cli("dims", "--max-weight", 14, "--format", "json")
    assert proc.returncode == 0
    rows = {r["k"]: r for r in json.loads(proc.stdout)}
    assert rows[0]["r"] == 1 and rows[10]["r"] == 2 and rows[12]["r"] == 3
    table = run_cli("dims", "--max-weight", 20)
    assert table.returncode == 0 and "recurrence" in table.stdout


def test_invariants_warm_cache_identical(tmp_path):
    cache = tmp_path / "cache"
    for out in ("o1", "o2"):
        proc = run_cli("invariants", "--out", tmp_path / out, "--cache-dir", cache)
        assert proc.returncode == 0, proc.stderr
    for n in NAMES:
        assert (tmp_path / "o1" / f"{n}.json").read_bytes() == (tmp_path / "o2" / f"{n}.json").read_bytes()


def test_express_cli(tmp_path, inv):
    target = tmp_path / "ad.json"
    target.write_bytes(serialize(inv.A * inv.D))
    out = tmp_path / "ad-out.json"
    proc = run_cli("express", "--target", target, "--out", out, "--cache-dir", tmp_path / "c")
    assert proc.returncode == 0, proc.stderr
    assert "psi2*chi10" in proc.stdout
    assert FormPoly.from_json(out.read_bytes()) == FormPoly.monomial((1, 1, 0, 0, 0))

    a3 = tmp_path / "a3.json"
    a3.write_bytes(serialize(SparsePoly.variable(SEXTIC_VARS, GF3, "a3")))
    proc = run_cli("express", "--target", a3, "--cache-dir", tmp_path / "c")
    assert proc.returncode == 1
    assert "not invariant" in proc.stdout

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("express", "--target", bad, "--cache-dir", "none").returncode == 2


def test_express_E2D4(tmp_path):
    out = tmp_path / "p.json"
    proc = run_cli("express", "--target", "E2D4", "--out", out, "--cache-dir", tmp_path / "c")
    assert proc.returncode == 0, proc.stderr
    assert len(FormPoly.from_json(out.read_bytes()).terms) == 12
