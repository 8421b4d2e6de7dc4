"""``gvn`` command line: analyze, available, diff, fuzz, dot.

Exit status: 0 on success, 1 when the run produced findings (a non-empty
diff under ``--expect-equal``, or fuzz violations), 2 on errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .analyses import ALGOS
from .dataflow import DivergenceError
from .fuzz import Shape, run_fuzz
from .kildall import UnknownTermError
from .lang import ParseError, parse_term
from .report import UnknownPointError, available, default_points, diff, load_program, run_report, state_at
from .sed import SED
from .terms import CapacityError

OK, FINDINGS, ERROR = 0, 1, 2


def _emit(args, payload, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text)


def cmd_analyze(args) -> int:
    p = load_program(args.file)
    rep = run_report(p, args.algo, args.max_term_size)
    points = args.point or default_points(rep.run)
    for pt in points:
        state_at(rep.run, pt)  # fail before printing anything
    _emit(args, [rep.point(pt) for pt in points], "\n".join(rep.render_point(pt) for pt in points))
    for w in rep.run.result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return OK


def cmd_available(args) -> int:
    p = load_program(args.file)
    t = parse_term(args.expr)
    rep = run_report(p, args.algo, args.max_term_size, extra=(t,))
    ans = available(rep, args.point[0], t)
    _emit(args, ans.to_dict(), ans.render())
    return OK


def cmd_diff(args) -> int:
    algos = [a.strip() for a in args.algos.split(",")]
    if len(algos) != 2:
        raise ValueError("--algos takes exactly two comma-separated analyses")
    p = load_program(args.file)
    reports = [diff(p, algos[0], algos[1], pt, args.max_term_size) for pt in args.point]
    _emit(args, [r.to_dict() for r in reports], "\n".join(r.render() for r in reports))
    if args.expect_equal and not all(r.empty for r in reports):
        return FINDINGS
    return OK


def cmd_fuzz(args) -> int:
    shape = Shape(n_vars=args.vars, n_stmts=args.stmts, n_joins=args.joins,
                  max_term_size=args.max_term_size if args.max_term_size is not None else 3,
                  loops=args.loops, window=args.window)
    summary = run_fuzz(args.seed, args.count, shape)
    d = summary.to_dict()
    bad = summary.violations + summary.intersect_bound_violations + summary.recursion_depth_violations
    bad += summary.node_bound_violations + len(summary.diverged)
    text = "\n".join(
        [f"{k}: {v}" for k, v in d.items() if k not in ("reproducers", "shape")]
        + [f"--- {r['kind']} at {r['point']}\n{r['source']}" for r in d["reproducers"]]
    )
    _emit(args, d, text)
    return FINDINGS if bad else OK


def cmd_dot(args) -> int:
    if args.algo == "kildall":
        raise ValueError("kildall is not a DAG-producing analysis; choose an sed-* algorithm")
    p = load_program(args.file)
    rep = run_report(p, args.algo, args.max_term_size)
    g = state_at(rep.run, args.point[0])
    assert isinstance(g, SED)
    sys.stdout.write(g.to_dot())
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gvn", description="Global value numbering analyses over a toy language.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, needs_file=True, algo=True):
        if needs_file:
            sp.add_argument("file", help="program file (fig1.gvn / fig3.gvn resolve to bundled fixtures)")
        if algo:
            sp.add_argument("--algo", choices=ALGOS, default="sed-modified")
        sp.add_argument("--max-term-size", type=int, default=None,
                        help="term-size bound of the universe (default: largest right-hand side)")
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    sp = sub.add_parser("analyze", help="print the analysis state at program points")
    common(sp)
    sp.add_argument("--point", action="append", help="program point (repeatable; default: all labels)")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("available", help="is an expression available at a point?")
    common(sp)
    sp.add_argument("--point", action="append", required=True)
    sp.add_argument("--expr", required=True)
    sp.set_defaults(func=cmd_available)

    sp = sub.add_parser("diff", help="term pairs equivalent under one analysis but not the other")
    common(sp, algo=False)
    sp.add_argument("--algos", default="sed-original,sed-modified", help="two analyses, comma-separated")
    sp.add_argument("--point", action="append", required=True)
    sp.add_argument("--expect-equal", action="store_true", help="exit 1 if any difference is found")
    sp.set_defaults(func=cmd_diff)

    sp = sub.add_parser("fuzz", help="differential check on random programs")
    common(sp, needs_file=False, algo=False)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--vars", type=int, default=4)
    sp.add_argument("--stmts", type=int, default=12)
    sp.add_argument("--joins", type=int, default=3)
    sp.add_argument("--loops", action="store_true", help="also generate while loops")
    sp.add_argument("--window", type=int, default=2, help="term size the relations are compared on")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("dot", help="Graphviz rendering of an SED")
    common(sp)
    sp.add_argument("--point", action="append", required=True)
    sp.set_defaults(func=cmd_dot)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fuzz" and args.count < 1:
        print("error: --count must be at least 1", file=sys.stderr)
        return ERROR
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
    except (UnknownPointError, UnknownTermError, CapacityError, DivergenceError, ValueError,
            FileNotFoundError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and not isinstance(exc, UnknownPointError) else exc
        print(f"error: {msg}", file=sys.stderr)
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
