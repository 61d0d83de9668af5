"""Command-line front end.

Exit codes: 0 success, 1 an invariant check failed, 2 bad configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .badset import ConstructionError, build_stages, verify_conditions
from .convergence import (
    MODES,
    ClassifyConfig,
    InvariantViolation,
    Probe,
    classify,
)
from .dyadic import ClopenSet, DepthError, check_depth
from .fence import (
    FenceError,
    FenceInstance,
    brute_force_oracle,
    distinguish,
    is_feasible,
    solve_exact,
    solve_guarantee,
    tight_instance,
    tight_report,
)
from .hamming import CodeError, code_ratio_table, minimal_code, perfect_code, verify_perfect
from .homomorphism import HomFamily, PointMap, identity, make_flip, example_families

log = logging.getLogger("boolconv")

# verdicts the five example families are known to have; None = not pinned
EXPECTED = {
    "pointEval": {"pointwiseMetric": "holds", "algebraic": "holds", "borelProbe": "fails", "uniform": "fails"},
    "agreeFlip": {"pointwiseMetric": "holds", "algebraic": "fails", "borelProbe": "holds", "uniform": "holds"},
    "pair": {"pointwiseMetric": "holds", "algebraic": "fails", "borelProbe": "fails", "uniform": "fails"},
    "flip": {"pointwiseMetric": "holds", "algebraic": "fails", "borelProbe": "holds", "uniform": "fails"},
    "restriction": {"pointwiseMetric": "holds", "algebraic": "holds", "borelProbe": None, "uniform": "fails"},
}


class ConfigError(ValueError):
    pass


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def parse_window(text: str) -> tuple[int, int]:
    """``48`` means ``[0, 48)``; ``lo:hi`` is explicit."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":", 1))
        else:
            lo, hi = 0, int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad window {text!r}") from exc
    if not 0 <= lo < hi:
        raise argparse.ArgumentTypeError(f"empty window {text!r}")
    return lo, hi


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    return json.loads(Path(path).read_text())


def _dump(obj, out):
    out.write(json.dumps(obj, indent=2) + "\n")


def _write_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


# subcommands

def cmd_hamming(args, out) -> int:
    if args.n is not None:
        size, code = minimal_code(args.n)
        report = {"n": args.n, "minimalSize": size, "ratio": str(code.ratio()),
                  "words": code.to_json().get("words", [])}
        _dump(report, out)
        return 0
    m = 3 if args.m is None else args.m
    code = perfect_code(m)
    report = {"n": code.n, "m": m, "size": len(code)}
    ok = True
    if args.verify:
        check = verify_perfect(code)
        report.update(check)
        ok = check["disjoint"] and check["covering"] and len(code) == 1 << (code.n - m)
    if "words" in code.to_json():
        report["words"] = code.to_json()["words"]
    if args.ratio:
        report["ratioTable"] = [
            {"n": r["n"], "bound": str(r["bound"]), "source": r["source"],
             "exact": None if r["exact"] is None else str(r["exact"])}
            for r in code_ratio_table(m)
        ]
    if args.format == "csv":
        _write_csv(["n", "m", "size", "disjoint", "covering"],
                   [[code.n, m, len(code), report.get("disjoint", ""), report.get("covering", "")]], out)
    else:
        _dump(report, out)
    if not ok:
        log.error("perfect code check failed for m=%d", m)
        return 1
    return 0


def cmd_badset(args, out) -> int:
    limit = args.depth if args.depth is not None else None
    con = build_stages(args.target, num_stages=args.stages, depth_limit=limit)
    conds = verify_conditions(con)
    report = con.to_json()
    report["conditions"] = conds
    measures_ok = all(s.bad.measure() > con.target for s in con.stages)
    report["measuresAboveTarget"] = measures_ok
    if args.emit_clopen is not None:
        clopen = {**con.bad_set().to_json(), "name": f"B_{len(con.stages) - 1}"}
        if len(con.stages) >= 2:
            clopen["horizon"] = con.stages[-2].depth
        if args.emit_clopen == "-":
            report["clopen"] = clopen
        else:
            Path(args.emit_clopen).write_text(json.dumps(clopen) + "\n")
    if args.format == "csv":
        _write_csv(["stage", "depth", "codeSize", "blockLength", "measure"],
                   [[r["stage"], r["depth"], r["codeSize"], r["blockLength"] or "", r["measureExact"]]
                    for r in report["stages"]], out)
    else:
        _dump(report, out)
    if not measures_ok or not all(c["ok"] for c in conds.values()):
        log.error("bad-set construction failed its checks")
        return 1
    return 0


def _fence_instance(args) -> FenceInstance:
    if args.input:
        return FenceInstance.from_json(_read_json(args.input))
    n = args.tight_n if args.tight_n is not None else args.n
    if n is None:
        raise ConfigError("fence needs --input or --tight-n")
    return tight_instance(n)


def cmd_fence(args, out) -> int:
    if args.action == "tight":
        n = args.tight_n if args.tight_n is not None else args.n
        if n is None:
            raise ConfigError("fence tight needs --n")
        report = tight_report(n)
        report["solution"] = solve_exact(tight_instance(n)).to_json()
        _dump(report, out)
        if not report["matchesClosedForm"] or report.get("oracle", report["optimum"]) != report["optimum"]:
            return 1
        return 0
    inst = _fence_instance(args)
    solver = {"solve": solve_exact, "approx": solve_guarantee, "oracle": brute_force_oracle}[args.action]
    sol = solver(inst)
    report = sol.to_json()
    report["total"] = str(inst.total)
    report["feasible"] = is_feasible(inst, sol.items)
    ok = report["feasible"]
    if args.action == "approx":
        report["quarterOfTotal"] = str(inst.total / 4)
        ok = ok and sol.value >= inst.total / 4
    if args.format == "csv":
        _write_csv(["item", "w", "f", "g"],
                   [[i, str(inst.items[i].weight), inst.items[i].f, inst.items[i].g] for i in sol.items], out)
    else:
        _dump(report, out)
    return 0 if ok else 1


def cmd_distinguish(args, out) -> int:
    if args.input:
        data = _read_json(args.input)
        phi, psi = PointMap.from_json(data["phi"]), PointMap.from_json(data["psi"])
    else:
        depth = check_depth(args.depth if args.depth is not None else 4)
        k = 0 if args.n is None else args.n
        phi, psi = identity(depth), make_flip(k, depth)
    res = distinguish(phi, psi)
    inclusion = res.chosen <= (phi.apply(res.clopen) - psi.apply(res.clopen))
    bound = (1 - res.agreement_weight.to_fraction()) / 4
    report = res.to_json()
    report["inclusionHolds"] = inclusion
    report["bound"] = str(bound)
    report["boundHolds"] = res.separated >= bound
    _dump(report, out)
    return 0 if inclusion and report["boundHolds"] else 1


def _load_probes(paths) -> list[Probe]:
    probes = []
    for path in paths or []:
        data = _read_json(path)
        horizon = data.get("horizon")
        probes.append(Probe(data.get("name", Path(path).stem), ClopenSet.from_json(data),
                            horizon, "badset" if horizon is not None else "clopen"))
    return probes


def _config(args) -> ClassifyConfig:
    depth = check_depth(args.depth)
    return ClassifyConfig(depth=depth, window=args.window, seed=args.seed, parallel=args.parallel)


def cmd_converge(args, out) -> int:
    if args.input:
        family = HomFamily.from_json(_read_json(args.input))
        name = Path(args.input).stem if args.input != "-" else family.kind
    elif args.family:
        fams = example_families(args.depth)
        if args.family not in fams:
            raise ConfigError(f"unknown family {args.family!r}; choose from {sorted(fams)}")
        family, name = fams[args.family], args.family
    else:
        raise ConfigError("converge needs --input or --family")
    report = classify(family, _config(args), name, _load_probes(args.probe))
    if args.format == "csv":
        _write_csv(["family", "mode", "probe", "n", "value"], report.csv_rows(), out)
    else:
        _dump(report.to_json(), out)
    return 0


def cmd_diagram(args, out) -> int:
    config = _config(args)
    rows, reports, matches = [], {}, True
    for name, family in example_families(config.depth).items():
        report = classify(family, config, name)
        reports[name] = report.to_json()
        for mode in MODES:
            r = report.modes[mode]
            want = EXPECTED[name][mode]
            ok = want is None or want == r.verdict
            matches &= ok
            rows.append([name, mode, r.verdict, "" if r.value is None else str(r.value),
                         want or "", "yes" if ok else "no"])
    if args.format == "csv":
        _write_csv(["family", "mode", "verdict", "value", "expected", "match"], rows, out)
    else:
        table = [dict(zip(["family", "mode", "verdict", "value", "expected", "match"], r)) for r in rows]
        _dump({"depth": config.depth, "window": list(config.window), "matchesExpected": matches,
               "table": table, "reports": reports}, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallel", action="store_true")
    common.add_argument("--verbose", "-v", action="store_true")

    conv = argparse.ArgumentParser(add_help=False)
    conv.add_argument("--depth", type=int, default=12)
    conv.add_argument("--window", type=parse_window, default=(0, 48))

    p = argparse.ArgumentParser(prog="boolconv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("converge", parents=[common, conv], help="classify one family")
    s.add_argument("--input", help="family descriptor JSON ('-' for stdin)")
    s.add_argument("--family", help="one of the built-in example families")
    s.add_argument("--probe", action="append", help="extra probe clopen JSON (repeatable)")
    s.set_defaults(func=cmd_converge)

    s = sub.add_parser("diagram", parents=[common, conv], help="classify the five example families")
    s.set_defaults(func=cmd_diagram)

    s = sub.add_parser("hamming", parents=[common], help="perfect codes and minimal codes")
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int, help="exhaustive minimal code of length n (n <= 4)")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--ratio", action="store_true", help="include the code-ratio table up to 2**m - 1")
    s.set_defaults(func=cmd_hamming)

    s = sub.add_parser("badset", parents=[common], help="staged bad-set construction")
    s.add_argument("--target", type=parse_fraction, default=Fraction(1, 2))
    s.add_argument("--stages", type=int)
    s.add_argument("--depth", type=int, help="depth limit (default: the global cap)")
    s.add_argument("--emit-clopen", nargs="?", const="-", metavar="PATH",
                   help="serialize the last bad set (inline, or to PATH)")
    s.set_defaults(func=cmd_badset)

    s = sub.add_parser("fence", parents=[common], help="fence-painting solvers")
    s.add_argument("action", choices=("solve", "approx", "tight", "oracle"))
    s.add_argument("--input")
    s.add_argument("--tight-n", type=int)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_fence)

    s = sub.add_parser("distinguish", parents=[common], help="separating clopen for two point maps")
    s.add_argument("--input", help='JSON {"phi": PointMap, "psi": PointMap}')
    s.add_argument("--depth", type=int)
    s.add_argument("--n", type=int, help="without --input: identity against flip_n")
    s.set_defaults(func=cmd_distinguish)
    return p


CONFIG_ERRORS = (ConfigError, DepthError, ConstructionError, CodeError, FenceError,
                 ValueError, KeyError, OSError, IndexError)


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except InvariantViolation as exc:
        print(f"boolconv: invariant violated: {exc}", file=sys.stderr)
        return 1
    except CONFIG_ERRORS as exc:
        print(f"boolconv: {exc}", file=sys.stderr)
        return 2
    out.write(buf.getvalue())
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
