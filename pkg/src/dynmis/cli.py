"""Command line front end: generate workloads, run structures, verify traces."""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import ExitStack

from . import bench
from .geometry import ShapeClass


def _workload(args) -> bench.Workload:
    return bench.Workload(seed=args.seed, shape_class=ShapeClass.parse(args.shape),
                          n_target=args.n, length=args.len, pattern=bench.Pattern.parse(args.pattern))


def _add_workload_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shape", default="squares", help="squares | disks | hypercubes:D")
    p.add_argument("--pattern", default="churn:0.3", help="insert | churn:P | hashtag | growshrink")
    p.add_argument("--n", type=int, default=1000, help="target live size")
    p.add_argument("--len", type=int, default=1000, help="number of updates")
    p.add_argument("--seed", type=int, default=0)


def cmd_generate(args) -> int:
    with open(args.out, "w") as fp:
        bench.write_updates(bench.generate(_workload(args)), fp)
    return 0


def cmd_run(args) -> int:
    w = _workload(args)
    updates = None
    if args.input:
        with open(args.input) as fp:
            updates = bench.read_updates(fp)
    with ExitStack() as stack:
        trace = stack.enter_context(open(args.trace, "w")) if args.trace else None
        events = stack.enter_context(open(args.events, "w")) if args.events else None
        report = bench.run(args.structure, w, args.eps, updates=updates, trace=trace,
                           oracle_prefix=args.oracle_prefix, event_log=events)
    with open(args.out, "w", newline="") as fp:
        report.write_csv(fp)
    print(json.dumps(report.summary))
    for v in report.violations[:20]:
        print(v, file=sys.stderr)
    return 0 if report.ok else 1


def cmd_verify(args) -> int:
    with open(args.trace) as fp:
        problems = bench.verify(fp, oracle_prefix=args.oracle_prefix)
    for p in problems[:50]:
        print(p, file=sys.stderr)
    print(f"{len(problems)} violation(s)")
    return 1 if problems else 0


def cmd_scaling(args) -> int:
    ns = [2 ** k for k in range(args.min_exp, args.max_exp + 1, args.step)]
    report = bench.scaling_report(ns, ShapeClass.parse(args.shape), seed=args.seed)
    with open(args.out, "w", newline="") as fp:
        bench.write_scaling_csv(report, fp)
    print(f"exponent {report['exponent']:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynmis", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an update sequence as JSONL")
    _add_workload_args(g)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="feed a workload through a structure")
    r.add_argument("--structure", choices=["amortized", "deamortized"], default="amortized")
    _add_workload_args(r)
    r.add_argument("--eps", type=float, default=0.25)
    r.add_argument("--out", required=True, help="per-update CSV report")
    r.add_argument("--trace", help="JSONL trace for offline verification")
    r.add_argument("--events", help="JSONL event log of the deamortized structure")
    r.add_argument("--input", help="read updates from JSONL instead of generating")
    r.add_argument("--oracle-prefix", type=int, default=40)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="re-check a trace offline")
    v.add_argument("--trace", required=True)
    v.add_argument("--oracle-prefix", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scaling", help="ARQS query work against n")
    s.add_argument("--shape", default="squares")
    s.add_argument("--min-exp", type=int, default=10)
    s.add_argument("--max-exp", type=int, default=16)
    s.add_argument("--step", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scaling)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
