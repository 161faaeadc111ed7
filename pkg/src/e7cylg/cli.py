"""Command-line front end: series generation, individual checks, reconstruction,
dumps, and the aggregate report.

Exit status: 0 when every check passes, 1 when a mathematical check fails,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from . import catalog, fjrw, halphen, numerics, qmodular, reconstruct
from .cohft import Potential, wdvv_residual
from .report import CheckReport
from .store import FixtureMissing, read_fixture, set_fixture_dir

__all__ = ["main", "run", "report_all", "TASKS", "CATEGORIES"]

GROUPS = ("g1", "g2", "g3")
EXPECTED_SEEDS = {"g1": 1, "g2": 2, "g3": 3}
EXPECTED_SURVIVORS = {"g1": 1, "g2": 2, "g3": 1}


class UsageError(Exception):
    pass


# ---- individual checks -------------------------------------------------------------------


def _identity_report(name: str, rep: qmodular.IdentityReport) -> CheckReport:
    out = CheckReport(name, rep.passed, rep.to_json())
    out.details.pop("passed", None)
    out.failures = [{"slot": r.name, "expected": "0", "got": r.residual.to_json()} for r in rep.results if not r.passed]
    return out


def check_fixture_triple() -> CheckReport:
    """Stored Taylor table of X^(tau0, omega0) against the recursive solver."""
    data = read_fixture("halphen", "x_tau0_omega0")
    stored = halphen.HalphenTriple.from_json(data)
    prec = int(stored.X2.prec)
    solved = halphen.x_tau0_omega0(prec)
    rep = CheckReport("fixture:x_tau0_omega0", True, {"prec": prec, "source": data.get("source", "")})
    for name, a, b in zip(("X2", "X3", "X4"), stored, solved):
        for n in range(prec):
            if a[n] != b[n]:
                rep.failures.append({"slot": f"{name}[t^{n}]", "expected": str(b[n]), "got": str(a[n])})
    if not halphen.is_solution(stored):
        rep.failures.append({"slot": "triple", "expected": "Halphen solution", "got": "nonzero residual"})
    rep.passed = not rep.failures
    return rep


def check_halphen(triple: str, order: int) -> CheckReport:
    if triple == "psi":
        T = halphen.psi_triple(order)
        rep = CheckReport("halphen:psi", True, {"mode": T.mode, "order": order})
    elif triple == "fixture":
        T = halphen.HalphenTriple.from_json(read_fixture("halphen", "x_tau0_omega0"))
        rep = CheckReport("halphen:fixture", True, {"mode": T.mode, "prec": str(T.X2.prec)})
    else:
        raise UsageError(f"unknown triple {triple!r}; use psi or fixture")
    for k, r in zip((2, 3, 4), halphen.residual(T)):
        if not r.is_zero():
            rep.failures.append({"slot": f"X{k}'", "expected": "0", "got": r.to_json()})
    rep.passed = not rep.failures
    return rep


def check_wdvv(potential: str, order: int) -> CheckReport:
    """A catalog entry by name, or a JSON file holding a potential (bare or as dumped)."""
    if potential in catalog.ENTRY_NAMES:
        return catalog.wdvv_check(potential, order)
    path = Path(potential)
    if not path.is_file():
        raise UsageError(f"{potential!r} is neither a catalog entry ({', '.join(catalog.ENTRY_NAMES)}) nor a file")
    try:
        data = json.loads(path.read_text())
        P = Potential.from_json(data.get("potential", data))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"cannot read a potential from {potential}: {exc}") from exc
    wd = wdvv_residual(P, order)
    rep = CheckReport(f"wdvv:{path.name}", wd.passed, wd.to_json())
    rep.failures = wd.failures
    return rep


def check_reconstruct(group: str, order: int) -> CheckReport:
    seeds = reconstruct.enumerate_branches(group)
    sols = [reconstruct.solve(group, s, order) for s in seeds]
    diffs = [reconstruct.catalog_diff(s) for s in sols]
    survivors = reconstruct.parity_filter(sols)
    rep = CheckReport(f"reconstruct:{group}", True, {
        "order": order,
        "seeds": len(seeds),
        "solutions": [{"entry": d["entry"], "matches": d["matches"]} for d in diffs],
        "parity_survivors": [reconstruct.catalog_diff(s)["entry"] for s in survivors],
        "gauge": reconstruct.GAUGES[group].to_json(),
    })
    if len(seeds) != EXPECTED_SEEDS[group]:
        rep.failures.append({"slot": "seeds", "expected": EXPECTED_SEEDS[group], "got": len(seeds)})
    if len(survivors) != EXPECTED_SURVIVORS[group]:
        rep.failures.append({"slot": "parity_filter", "expected": EXPECTED_SURVIVORS[group], "got": len(survivors)})
    for d in diffs:
        if not d["matches"]:
            rep.failures.append({"slot": d["entry"], "expected": "catalog coefficients", "got": d["differences"]})
    rep.passed = not rep.failures
    return rep


def check_numeric(digits: int) -> CheckReport:
    rep = numerics.constants_check(digits)
    samples = {"identity at 2i": (((1, 0), (0, 1)), 2j),
               "A^(i, omega0) at i/10": (numerics.a_tau_omega(1j, numerics.omega0(digits), digits), 0.1j)}
    rows = []
    for label, (A, tau) in samples.items():
        sub = numerics.double_argument_check_numeric(A, [tau], digits)
        rows.append({"name": f"double argument, {label}", "passed": sub.passed})
        rep.failures.extend(sub.failures)
    rep.details["double_argument"] = rows
    rep.passed = not rep.failures
    return rep


def check_givental(digits: int) -> CheckReport:
    data = catalog.givental_data(digits)
    rep = CheckReport("givental", True, {"matrices": [m.name for m in data]})
    for m in data:
        if m.size == 2:
            det = m.det()
            if not det.close_to(1, max(digits - 10, 1)):
                rep.failures.append({"slot": f"det {m.name}", "expected": "1", "got": str(det)})
    rep.passed = not rep.failures
    return rep


# ---- the aggregate report ------------------------------------------------------------------

# name -> (category, runner(order, digits, numeric))
TASKS: dict[str, tuple[str, Callable[[int, int, bool], CheckReport]]] = {
    "fixture:x_tau0_omega0": ("fixture", lambda o, d, n: check_fixture_triple()),
    "qmodular:q_identities": ("qmodular", lambda o, d, n: _identity_report("qmodular:q_identities",
                                                                        qmodular.check_q_identities(5 * o))),
    "qmodular:xyzw_odes": ("qmodular", lambda o, d, n: _identity_report("qmodular:xyzw_odes",
                                                                        qmodular.check_xyzw_odes(5 * o))),
    "halphen:psi": ("halphen", lambda o, d, n: check_halphen("psi", 5 * o)),
    "halphen:fixture": ("halphen", lambda o, d, n: check_halphen("fixture", o)),
    **{f"wdvv:{name}": ("wdvv", (lambda name: lambda o, d, n: catalog.wdvv_check(name, o))(name))
       for name in catalog.ENTRY_NAMES},
    "wdvv:perturbed_template": ("wdvv", lambda o, d, n: catalog.perturbed_template_check(o)),
    **{f"concave:{g}": ("cylg", (lambda g: lambda o, d, n: catalog.concave_restriction_check(g, o))(g))
       for g in GROUPS},
    **{f"cylg:{g}": ("cylg", (lambda g: lambda o, d, n: catalog.cylg_check(g, o, d, numeric=n))(g))
       for g in GROUPS},
    "g2_branch_relation": ("cylg", lambda o, d, n: catalog.g2_branch_relation_check(o)),
    **{f"reconstruct:{g}": ("reconstruct", (lambda g: lambda o, d, n: check_reconstruct(g, o))(g))
       for g in GROUPS},
    "g3_irrationality": ("irrationality", lambda o, d, n: catalog.g3_irrationality_check(o)),
    **{f"ansatz:{g}": ("ansatz", (lambda g: lambda o, d, n: fjrw.ansatz_check(g))(g)) for g in GROUPS},
    **{f"chiodo:{g}": ("ansatz", (lambda g: lambda o, d, n: catalog.chiodo_selection_check(g, o))(g))
       for g in (*GROUPS, "gmax")},
    "numeric:constants": ("numeric", lambda o, d, n: check_numeric(d)),
    "numeric:givental": ("numeric", lambda o, d, n: check_givental(d)),
}

CATEGORIES = tuple(dict.fromkeys(cat for cat, _ in TASKS.values()))


def _run_task(name: str, order: int, digits: int, numeric: bool) -> tuple[dict, float]:
    start = time.perf_counter()
    try:
        rep = TASKS[name][1](order, digits, numeric)
    except Exception as exc:  # a crashing check is a failed check, not a crashed report
        rep = CheckReport(name, False, failures=[{"slot": "exception", "expected": "a report",
                                                   "got": f"{type(exc).__name__}: {exc}"}])
    out = rep.to_json()
    out["name"] = name
    return out, time.perf_counter() - start


def report_all(order: int = 8, digits: int = numerics.DEFAULT_DIGITS, skip: Sequence[str] = (), jobs: int = 1,
               timings: bool = False, fixtures: str | None = None) -> dict:
    """Run every check in dependency order and aggregate the results."""
    unknown = set(skip) - set(CATEGORIES)
    if unknown:
        raise UsageError(f"unknown categories {sorted(unknown)}; choose from {list(CATEGORIES)}")
    numeric = "numeric" not in skip
    names = [n for n, (cat, _) in TASKS.items() if cat not in skip]
    if jobs > 1:
        with ProcessPoolExecutor(jobs, initializer=set_fixture_dir, initargs=(fixtures,)) as pool:
            results = list(pool.map(_run_task, names, [order] * len(names), [digits] * len(names),
                                    [numeric] * len(names)))
    else:
        results = [_run_task(n, order, digits, numeric) for n in names]
    checks = []
    for (rep, seconds) in results:
        if timings:
            rep["seconds"] = round(seconds, 3)
        checks.append(rep)
    out = {
        "tool": "e7cylg",
        "version": __version__,
        "order": order,
        "digits": digits,
        "skipped": sorted(skip),
        "passed": all(c["status"] == "pass" for c in checks),
        "checks": checks,
    }
    if timings:
        out["seconds"] = round(sum(s for _, s in results), 3)
    return out


# ---- output --------------------------------------------------------------------------------


def _md_value(v) -> str:
    return v if isinstance(v, str) else json.dumps(v, sort_keys=True)


def to_markdown(payload: dict) -> str:
    lines = []
    if "checks" in payload:
        head = {k: v for k, v in payload.items() if k != "checks"}
        lines += [f"- **{k}**: {_md_value(v)}" for k, v in head.items()]
        lines += ["", "| check | status | failures |", "| --- | --- | --- |"]
        for c in payload["checks"]:
            lines.append(f"| {c['name']} | {c['status']} | {len(c.get('failures', []))} |")
    elif "status" in payload:
        lines += ["| check | status |", "| --- | --- |", f"| {payload.get('name', '')} | {payload['status']} |", ""]
        lines += [f"- **{k}**: {_md_value(v)}" for k, v in payload.items() if k not in ("name", "status")]
    else:
        lines += ["```json", json.dumps(payload, indent=2, sort_keys=True), "```"]
    return "\n".join(lines)


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "md":
        print(to_markdown(payload))
    else:
        print(json.dumps(payload, indent=2))


# ---- argument parsing ----------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", type=_positive, default=8, help="series truncation (default 8)")
    common.add_argument("--digits", type=_positive, default=numerics.DEFAULT_DIGITS,
                        help="numeric precision in decimal digits (default 40)")
    common.add_argument("--format", choices=("json", "md"), default="json")
    common.add_argument("--fixtures", metavar="PATH", help="directory shadowing the packaged fixtures")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for the report")

    p = argparse.ArgumentParser(prog="e7cylg", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate series")
    gen_sub = gen.add_subparsers(dest="what", required=True)
    series = gen_sub.add_parser("series", parents=[common], help="a q-series or a component of the rational triple")
    series.add_argument("--which", required=True,
                        help="theta2..4, psi2..4, f, x, y, z, w (q-series) or X2, X3, X4 (t-series)")

    check = sub.add_parser("check", help="run one family of checks")
    check_sub = check.add_subparsers(dest="what", required=True)
    c = check_sub.add_parser("wdvv", parents=[common])
    c.add_argument("--potential", required=True, help="catalog entry name or Potential JSON file")
    c = check_sub.add_parser("cylg", parents=[common])
    c.add_argument("--group", required=True, choices=GROUPS)
    c = check_sub.add_parser("halphen", parents=[common])
    c.add_argument("--triple", required=True, choices=("psi", "fixture"))
    c = check_sub.add_parser("ansatz", parents=[common])
    c.add_argument("--group", required=True, choices=GROUPS)
    check_sub.add_parser("numeric", parents=[common])

    r = sub.add_parser("reconstruct", parents=[common], help="solve WDVV order by order over an ansatz")
    r.add_argument("--group", required=True, choices=GROUPS)
    r.add_argument("--seed", metavar="FILE", help="JSON seed (or list of seeds) instead of enumeration")

    d = sub.add_parser("dump", help="print stored or computed data")
    d_sub = d.add_subparsers(dest="what", required=True)
    dp = d_sub.add_parser("potential", parents=[common])
    dp.add_argument("name", choices=catalog.ENTRY_NAMES)
    d_sub.add_parser("givental", parents=[common])
    d_sub.add_parser("fixtures", parents=[common])

    rep = sub.add_parser("report", parents=[common], help="run every check")
    rep.add_argument("--skip", action="append", default=[], metavar="CATEGORY",
                     help=f"skip a category ({', '.join(CATEGORIES)}); repeatable or comma separated")
    rep.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identity)")
    return p


def _gen_series(which: str, order: int) -> dict:
    if which in ("X2", "X3", "X4"):
        T = halphen.x_tau0_omega0(order + 1)
        s = T[int(which[1])]
        return {"which": which, "variable": "t", "series": s.to_json()}
    table = qmodular.qseries_table(Fraction(order))
    if which not in table.entries:
        raise UsageError(f"unknown series {which!r}; choose from {', '.join(table.entries)}, X2, X3, X4")
    return {"which": which, "variable": "q", "series": table[which].to_json()}


def _load_seeds(path: str, group: str) -> list[reconstruct.BranchSeed]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read seed file {path}: {exc}") from exc
    items = data if isinstance(data, list) else [data]
    seeds = []
    for item in items:
        item = {"group": group, "provenance": "user-supplied", **item}
        if item["group"] != group:
            raise UsageError(f"seed for {item['group']} given to --group {group}")
        seeds.append(reconstruct.BranchSeed.from_json(item))
    return seeds


def _reconstruct(group: str, order: int, seed_file: str | None) -> dict:
    if seed_file is None:
        seeds = reconstruct.enumerate_branches(group)
    else:
        seeds = _load_seeds(seed_file, group)
    solutions = []
    ok = True
    for seed in seeds:
        try:
            sol = reconstruct.solve(group, seed, order)
        except (reconstruct.Inconsistent, reconstruct.GaugeAmbiguity, reconstruct.NonTriangular) as exc:
            ok = False
            solutions.append({"seed": seed.to_json(), "error": type(exc).__name__, "message": str(exc)})
            continue
        diff = reconstruct.catalog_diff(sol)
        ok = ok and diff["matches"]
        solutions.append({**sol.to_json(), "catalog": diff})
    survivors = sum(1 for s in solutions if "error" not in s)
    return {"name": f"reconstruct:{group}", "status": "pass" if ok else "fail", "group": group, "order": order,
            "seeds": len(seeds), "solved": survivors, "solutions": solutions}


def run(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    set_fixture_dir(args.fixtures)
    try:
        payload, status = _dispatch(args)
    except (UsageError, catalog.UnknownName, FixtureMissing, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"e7cylg: error: {exc}", file=sys.stderr)
        return 2
    finally:
        set_fixture_dir(None)
    _emit(payload, args.format)
    return status


def _dispatch(args) -> tuple[dict, int]:
    if args.command == "gen":
        return _gen_series(args.which, args.order), 0
    if args.command == "check":
        if args.what == "wdvv":
            rep = check_wdvv(args.potential, args.order)
        elif args.what == "cylg":
            rep = catalog.cylg_check(args.group, args.order, args.digits)
        elif args.what == "halphen":
            rep = check_halphen(args.triple, 5 * args.order if args.triple == "psi" else args.order)
        elif args.what == "ansatz":
            rep = fjrw.ansatz_check(args.group)
        else:
            rep = check_numeric(args.digits)
        return rep.to_json(), 0 if rep.passed else 1
    if args.command == "reconstruct":
        out = _reconstruct(args.group, args.order, args.seed)
        return out, 0 if out["status"] == "pass" else 1
    if args.command == "dump":
        if args.what == "potential":
            entry = catalog.build(args.name, args.order)
            return entry.to_json(), 0
        if args.what == "givental":
            return {"matrices": [m.to_json() for m in catalog.givental_data(args.digits)]}, 0
        from .store import list_fixtures

        return {"fixtures": [{"module": m, "name": n, "source": read_fixture(m, n).get("source", "")}
                             for m, n in list_fixtures()]}, 0
    skip = [s for item in args.skip for s in item.split(",") if s]
    out = report_all(args.order, args.digits, skip, args.jobs, args.timings, args.fixtures)
    return out, 0 if out["passed"] else 1


def main() -> None:
    sys.exit(run())
