"""Command-line entry point: ``bcadual {eval,verify,demo,list-suites}``."""
from __future__ import annotations

import argparse
import json
import sys

from ..errors import BcaError
from ..suites import A1_FORMS, SCHEMA, SUITES, a1_residue_functional, run_suite
from .evaluate import evaluate


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0, help="case seed (default 0)")
    p.add_argument("--cases", type=int, default=None, help="number of cases (default: the suite's own)")
    p.add_argument("--window", type=int, default=None, help="precision window for expansions and inverses")
    p.add_argument("--json", action="store_true", help="print a JSON report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bcadual", description="Exact residue, trace and duality computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an expression or command")
    p.add_argument("expr", nargs="+", help="e.g. 'res (t^-1 + t)*dt over Q((t))'")
    _common(p)

    p = sub.add_parser("verify", help="run a seeded property suite")
    p.add_argument("suite", help="suite name, or 'all'")
    _common(p)

    p = sub.add_parser("demo", help="worked examples")
    p.add_argument("name", choices=["a1-residue"])
    _common(p)

    p = sub.add_parser("list-suites", help="list the property suites")
    _common(p)
    return parser


def cmd_eval(args) -> int:
    text = " ".join(args.expr)
    try:
        result = evaluate(text, args.window)
    except (BcaError, ZeroDivisionError) as exc:
        if args.json:
            print(_dump({"schema": SCHEMA, "input": text, "error": f"{type(exc).__name__}: {exc}"}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(_dump(dict(result.to_json(), schema=SCHEMA, input=text)))
    else:
        print(result.text())
    return 0


def _print_report(report):
    status = "pass" if report["ok"] else "FAIL"
    print(f"{report['suite']}: {status} {report['passed']}/{report['cases']} (seed {report['seed']})")
    for r in report["results"]:
        if r["verdict"] != "pass":
            w = r["witness"]
            print(f"  case {r['index']}:")
            for key in ("error", "inputs", "lhs", "rhs", "eval"):
                if key in w:
                    print(f"    {key}: {w[key]}")


def cmd_verify(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            print(f"error: unknown suite {name!r}; see list-suites", file=sys.stderr)
            return 2
    reports = [run_suite(name, args.seed, args.cases, args.window) for name in names]
    if args.json:
        out = reports[0] if len(reports) == 1 else {"schema": SCHEMA, "ok": all(r["ok"] for r in reports),
                                                    "reports": reports}
        print(_dump(out))
    else:
        for r in reports:
            _print_report(r)
    return 0 if all(r["ok"] for r in reports) else 1


def cmd_demo(args) -> int:
    window = args.window or 12
    levels = 4
    rows = {f: a1_residue_functional(f, levels, window) for f in A1_FORMS}
    if args.json:
        print(_dump({
            "schema": SCHEMA,
            "demo": "a1-residue",
            "window": window,
            "basis": [f"t^{k}" for k in range(levels)],
            "functionals": {f: [str(c) for c in v] for f, v in rows.items()},
        }))
        return 0
    print("X = A^1 over Q: generic point Q(t), local field Q((t)) at t = 0, closed point Q[t]/(t^n)")
    print(f"q expands a form of Q(t) into Q((t)) (window {window}); Tr pairs it with t^k through the residue")
    for f, v in rows.items():
        vals = ", ".join(f"<t^{k}> = {c}" for k, c in enumerate(v))
        print(f"  {f:8} -> {vals}")
    return 0


def cmd_list(args) -> int:
    if args.json:
        print(_dump({"schema": SCHEMA, "suites": [
            {"name": s.name, "cases": s.default_cases, "summary": s.summary} for s in SUITES.values()]}))
    else:
        width = max(len(n) for n in SUITES)
        for s in SUITES.values():
            print(f"{s.name:{width}}  {s.default_cases:4}  {s.summary}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"eval": cmd_eval, "verify": cmd_verify, "demo": cmd_demo, "list-suites": cmd_list}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
