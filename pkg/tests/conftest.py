import pytest

from siegel3.fields import GF3, gf3m
from siegel3.invariants import generators_char3
from siegel3.polyring import SEXTIC_VARS, SparsePoly


@pytest.fixture(scope="session")
def inv():
    return generators_char3()


@pytest.fixture(scope="session")
def F8():
    return gf3m(8)


@pytest.fixture(scope="session")
def a():
    return SparsePoly.gens(SEXTIC_VARS, GF3)


def run_cli(*args, cwd=None):
    import subprocess
    import sys

    return subprocess.run([sys.executable, "-m", "siegel3", *map(str, args)],
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    """Two ``verify --seed 7`` runs sharing a cache: cold then warm."""
    root = tmp_path_factory.mktemp("verify")
    cache = root / "cache"
    runs = []
    for name in ("cold", "warm"):
        out = root / name
        proc = run_cli("verify", "--seed", 7, "--out", out, "--cache-dir", cache)
        runs.append((proc, out))
    return runs
