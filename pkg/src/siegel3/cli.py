"""Command-line entry point: ``siegel3 {invariants,verify,dims,express}``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .invariants import NAMES, load_or_compute, swap_sign, verify_golden
from .polyring import parse, serialize, sha256
from .ring import (
    DEFAULT_SEED,
    Inconsistency,
    InvariantProduct,
    NotInvariant,
    RELATION_RHS,
    abcd_monomials,
    basis_monomials,
    compute_P,
    dim_level1,
    express_in_generators,
    hilbert_odd,
    hilbert_r,
    independence_rank,
    leading_coefficient,
    series_constant,
    verify_counting,
    verify_P_by_expansion,
    verify_P_exact,
    verify_P_sampled,
    verify_relation6,
)
from .sextic import invariant_space_basis
from .valuation import (
    CUSP_GENERATORS,
    EXPECTED_BOUNDS,
    GENERATOR_WEIGHTS,
    generator_forms,
    h1_lower_bound,
    is_cusp,
    is_regular,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
COUNTING_FLOOR = 200
EXPECTED_DIMS = {0: 1, 2: 1, 4: 2, 6: 3, 8: 4, 10: 6, 15: 1}

log = logging.getLogger("siegel3")


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None


def _fraction(x) -> str:
    return str(Fraction(x))


class Timer:
    def __init__(self):
        self.phases = {}

    def __call__(self, name):
        timer = self

        class _Phase:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                timer.phases[name] = round((time.perf_counter() - self.t) * 1000, 1)

        return _Phase()


# ------------------------------------------------------------------------
# invariants
# ------------------------------------------------------------------------

def cmd_invariants(args) -> int:
    res = load_or_compute(args.cache_dir)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in NAMES:
        (out / f"{n}.json").write_bytes(serialize(getattr(res.invariants, n)))
    checks = verify_golden(res.invariants)
    for n in NAMES:
        P = getattr(res.invariants, n)
        print(f"{n}: degree {P.degree():2d}, {len(P):4d} terms, sha256 {res.hashes[n][:16]}")
    bad = [c for c in checks if not c["ok"]]
    print(f"golden checks: {len(checks) - len(bad)}/{len(checks)} pass"
          + (f"; cache hits: {', '.join(res.hits)}" if res.hits else ""))
    for c in bad:
        print(f"FAIL {c['name']} {c['detail']}")
    return EXIT_FAIL if bad else EXIT_OK


# ------------------------------------------------------------------------
# verify
# ------------------------------------------------------------------------

def _check(records, key, anchor, ok, details):
    records.append({"name": key, "anchor": anchor, "status": "pass" if ok else "fail", "details": details})


def run_verification(max_weight: int, seed: int, cache_dir, exact_verify: bool = False):
    """All acceptance checks; returns ``(report, timings, P expression)``."""
    timer = Timer()
    records = []
    with timer("invariants"):
        res = load_or_compute(cache_dir)
    inv = res.invariants

    with timer("golden"):
        golden = verify_golden(inv)
    by_name = {c["name"]: c for c in golden}
    g1 = [by_name["A equals a1a5 - a2a4"], by_name["B equals the printed 12-term polynomial"]]
    _check(records, "golden-polynomials", "A and B as printed", all(c["ok"] for c in g1),
           {c["name"]: c["ok"] for c in g1})
    g2 = [c for c in golden if "slice" in c["name"] or "coefficient is" in c["name"]]
    _check(records, "leading-slices", "a3-slices of C, D, E, S", all(c["ok"] for c in g2),
           {c["name"]: c["ok"] for c in g2})
    g3 = [c for c in golden if c["name"].endswith("is invariant") or "weight 3*degree" in c["name"]]
    _check(records, "invariance", "unipotent identities in t for A, B, C, D, E, S",
           all(c["ok"] for c in g3), {c["name"]: c["ok"] for c in g3})

    with timer("oracle"):
        dims = {d: len(invariant_space_basis(d)) for d in (0, 2, 4, 6, 8, 10, 15, 17)}
        members = {c["name"]: c["ok"] for c in golden if "invariant space" in c["name"]}
        # odd degrees: E times the even part, so dim = #monomials in A, B, C, D of degree d - 15
        odd = {d: [dims[d], len(abcd_monomials(d - 15))] for d in (15, 17)}
    ok4 = (all(dims[d] == v for d, v in EXPECTED_DIMS.items()) and all(members.values())
           and all(a == b for a, b in odd.values()))
    _check(records, "oracle-dimensions", "invariant space dimensions by degree", ok4,
           {"dims": {str(d): v for d, v in dims.items()}, "expected": {str(d): v for d, v in EXPECTED_DIMS.items()},
            "membership": members, "odd_shadow": {str(d): v for d, v in odd.items()}})

    with timer("valuation"):
        bounds = {n: h1_lower_bound(getattr(inv, n)) for n in NAMES}
        forms = generator_forms(inv)
        reg = {g: {"regular": is_regular(f), "weight": f.weight, "bound": f.h1_bound} for g, f in forms.items()}
        cusp = {g: is_cusp(f, inv.D) for g, f in forms.items()}
    ok5 = bounds == EXPECTED_BOUNDS and all(
        r["regular"] and r["weight"] == GENERATOR_WEIGHTS[g] for g, r in reg.items())
    _check(records, "valuation", "H1 orders and regularity of the generators", ok5,
           {"bounds": bounds, "forms": reg})

    with timer("relation"):
        rel = verify_relation6(inv, seed)
        SD3 = inv.S * inv.D**3
        expr = express_in_generators(SD3, 42, inv, seed=seed, normal_form="relation", report=True)
        std = express_in_generators(SD3, 42, inv, seed=seed, report=True)
    ok6 = rel["exact"] and rel["sampled"] and expr.form == RELATION_RHS
    _check(records, "relation-42", "S D^3 = (BD)^3 + A^3 CD^3 - A^2 D (BD)^2", ok6,
           {"exact_identity": rel["exact"], "sampled_points": rel["points"], "sampled": rel["sampled"],
            "expressed": expr.form.render() if expr.form else None,
            "expressed_standard_basis": std.form.render() if std.form else None,
            "verification": expr.verification})

    K = max(max_weight, COUNTING_FLOOR)
    with timer("counting"):
        counting = verify_counting(K)
        first = [hilbert_r(k) for k in range(0, 16, 2)]
        const_ok = series_constant() == Fraction(1, 2880)
    ok7 = first == [1, 1, 1, 1, 1, 2, 3, 4] and not counting["failures"] and const_ok
    lead = leading_coefficient()
    _check(records, "dimension-table", "Hilbert series, counting bounds, 1/2880", ok7,
           {"r(0..14)": first, "K": K, "failures": counting["failures"],
            "constant": _fraction(series_constant()),
            "leading_coefficient_k3": _fraction(lead["coefficient_of_k3"]),
            "leading_coefficient_(k/2)^3": _fraction(lead["coefficient_of_(k/2)^3"]),
            "stated_leading_coefficient": _fraction(lead["stated"])})

    with timer("basis"):
        mismatch = [k for k in range(0, K + 1, 2) if len(basis_monomials(k)) != hilbert_r(k)]
    _check(records, "basis-count", "basis monomials against the series", not mismatch,
           {"K": K, "mismatches": mismatch})

    with timer("P"):
        Pexp = compute_P(inv, seed)
        P = Pexp.form
        cert = verify_P_exact(P, inv)
        sampled = verify_P_sampled(P, inv, seed, 100)
        full = verify_P_by_expansion(P, inv) if exact_verify else None
    ok9 = (P.weight == 70 and sampled and cert["image_equals_Q_D4"] and cert["image_divisible_by_D"]
           and full is not False)
    _check(records, "P-exists", "chi35^2 = P in weight 70", ok9,
           {"P": P.render(), "terms": len(P.terms), "weight": P.weight, "verification": Pexp.verification,
            "sampled_points": 100, "sampled": sampled, **cert,
            "full_expansion": "skipped" if full is None else full})

    ok10 = {g for g, c in cusp.items() if c} == CUSP_GENERATORS
    _check(records, "cusp-ideal", "cusp generators chi10, chi14, chi35, chi36", ok10, cusp)

    with timer("determinism"):
        again = compute_P(inv, seed).form
        warm = load_or_compute(cache_dir)
    same_p = again.to_json() == P.to_json()
    same_cache = warm.hashes == res.hashes and (cache_dir is None or set(warm.hits) == set(NAMES))
    _check(records, "determinism", "repeat runs are byte-identical", same_p and same_cache,
           {"P_sha256": sha256(P.to_json()), "invariant_sha256": res.hashes})

    with timer("independence"):
        ind = independence_rank(24, inv)
    _check(records, "independence", "A, D, S, BD independent up to weight 24", ind["full"],
           {str(r["w"]): [r["rank"], r["count"]] for r in ind["rows"]})

    report = {
        "tool": "siegel3",
        "version": __version__,
        "seed": seed,
        "max_weight": max_weight,
        "checks": records,
        "swap_signs": {n: swap_sign(getattr(inv, n)) for n in NAMES},
        "odd_dimensions": {"15": dims[15], "17": dims[17], "r(35)": hilbert_odd(35), "r(37)": hilbert_odd(37)},
    }
    timings = {"phases_ms": timer.phases, "cache_hits": res.hits}
    return report, timings, Pexp, counting


def _report_md(report, counting) -> str:
    lines = ["# siegel3 verification report", "",
             f"version {report['version']}, seed {report['seed']:#x}, max weight {report['max_weight']}", "",
             "| check | claim | status |", "|---|---|---|"]
    for c in report["checks"]:
        lines.append(f"| {c['name']} | {c['anchor']} | {c['status']} |")
    by = {c["name"]: c for c in report["checks"]}
    d = by["P-exists"]["details"]
    lines += ["", "## P", "", f"chi35^2 = {d['P']}", ""]
    d = by["dimension-table"]["details"]
    lines += ["## Leading coefficient of r(k)", "",
              f"series: {d['leading_coefficient_k3']} k^3 = {d['leading_coefficient_(k/2)^3']} (k/2)^3;"
              f" stated: {d['stated_leading_coefficient']} k^3", "",
              "## Dimensions", "", "| k | r(k) | c(k) | bound | recurrence | r(k+35) |", "|---|---|---|---|---|---|"]
    for row in counting["rows"]:
        if row["k"] > report["max_weight"]:
            break
        lines.append(f"| {row['k']} | {row['r']} | {row['c']} | {row['bound']} | {row['recurrence']} | {row['r_odd']} |")
    return "\n".join(lines) + "\n"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def cmd_verify(args) -> int:
    report, timings, Pexp, counting = run_verification(args.max_weight, args.seed, args.cache_dir, args.exact_verify)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(_dumps(report))
    (out / "report.md").write_text(_report_md(report, counting))
    (out / "timings.json").write_text(_dumps(timings))
    (out / "p-weight70.json").write_bytes(Pexp.form.to_json())
    failed = [c for c in report["checks"] if c["status"] != "pass"]
    for c in report["checks"]:
        print(f"{c['status'].upper():4s}  {c['name']}")
    if failed:
        print("failing: " + ", ".join(f"{c['name']} ({c['anchor']})" for c in failed))
        return EXIT_FAIL
    return EXIT_OK


# ------------------------------------------------------------------------
# dims
# ------------------------------------------------------------------------

def dims_rows(K: int) -> list:
    rows = []
    for k in range(0, K + 1, 2):
        c = dim_level1(k)
        rec = "exempt" if k % 12 in (0, 2) else (
            "holds" if hilbert_r(k) - (hilbert_r(k - 10) if k >= 10 else 0) == c * (c + 1) // 2 else "fails")
        rows.append({"k": k, "r": hilbert_r(k), "c": c,
                     "bound": (hilbert_r(k - 10) if k >= 10 else 0) + c * (c + 1) // 2,
                     "recurrence": rec, "odd_k": k + 35, "r_odd": hilbert_odd(k + 35)})
    return rows


def cmd_dims(args) -> int:
    rows = dims_rows(args.max_weight)
    if args.format == "json":
        sys.stdout.write(_dumps(rows))
    else:
        print(f"{'k':>4} {'r(k)':>6} {'c(k)':>5} {'bound':>6} {'recurrence':>10} {'k+35':>5} {'r(k+35)':>8}")
        for r in rows:
            print(f"{r['k']:>4} {r['r']:>6} {r['c']:>5} {r['bound']:>6} {r['recurrence']:>10}"
                  f" {r['odd_k']:>5} {r['r_odd']:>8}")
    return EXIT_FAIL if any(r["r"] > r["bound"] or r["recurrence"] == "fails" for r in rows) else EXIT_OK


# ------------------------------------------------------------------------
# express
# ------------------------------------------------------------------------

def cmd_express(args) -> int:
    inv = load_or_compute(args.cache_dir).invariants
    if args.target.upper() == "E2D4":
        target = InvariantProduct(((inv.E, 2), (inv.D, 4)), "E^2 D^4")
        k = 70 if args.weight is None else args.weight
        default_out = "p-weight70.json"
    else:
        try:
            target = parse(Path(args.target).read_bytes())
        except OSError as exc:
            print(f"cannot read {args.target}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        except ValueError as exc:
            print(f"cannot parse {args.target}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        k = target.degree() if args.weight is None else args.weight
        default_out = f"express-weight{k}.json"
    try:
        res = express_in_generators(target, k, inv, seed=args.seed, normal_form=args.normal_form, report=True)
    except NotInvariant as exc:
        print(f"rejected: {exc}")
        return EXIT_FAIL
    except ValueError as exc:
        print(f"rejected: {exc}")
        return EXIT_FAIL
    if res.form is None:
        print(f"not in the span of weight-{k} generator monomials ({res.verification})")
        return EXIT_FAIL
    out = Path(args.out or default_out)
    out.write_bytes(res.form.to_json())
    print(f"weight {k}: {res.form.render()}")
    print(f"verified by {res.verification}; written to {out}")
    return EXIT_OK


# ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="siegel3", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"siegel3 {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", default=".invariant-cache",
                        help="invariant cache directory, 'none' to disable (default %(default)s)")
    common.add_argument("-v", "--verbose", action="store_true")

    s = sub.add_parser("invariants", parents=[common], help="compute, cache and write A, B, C, D, E, S")
    s.add_argument("--out", default="invariants", help="output directory")
    s.set_defaults(func=cmd_invariants)

    s = sub.add_parser("verify", parents=[common], help="run every check and write report.json / report.md")
    s.add_argument("--max-weight", type=int, default=100)
    s.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    s.add_argument("--exact-verify", action="store_true", help="also expand the image of P in full")
    s.add_argument("--out", default=".", help="output directory")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("dims", parents=[common], help="dimension table")
    s.add_argument("--max-weight", type=int, default=100)
    s.add_argument("--format", choices=("table", "json"), default="table")
    s.set_defaults(func=cmd_dims)

    s = sub.add_parser("express", parents=[common], help="express an invariant in the generators")
    s.add_argument("--target", default="E2D4", help="E2D4 or a polynomial JSON file")
    s.add_argument("--weight", type=int)
    s.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    s.add_argument("--normal-form", choices=("standard", "relation"), default="standard")
    s.add_argument("--out")
    s.set_defaults(func=cmd_express)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if args.command == "verify" and (args.max_weight < 14 or args.max_weight % 2):
        parser.error("--max-weight must be an even integer >= 14")
    if args.command == "dims" and (args.max_weight < 0 or args.max_weight % 2):
        parser.error("--max-weight must be an even non-negative integer")
    if getattr(args, "cache_dir", None) in ("", "none"):
        args.cache_dir = None
    try:
        return args.func(args)
    except Inconsistency as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
