"""Command line: ``ptrie gen | diff | bench | analyze``.

Exit codes: 0 pass, 1 mismatch or violation, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict

from ptrie.analysis import empirical_profile, profile_table
from ptrie.codec import InvalidConfigError, PatternConfig
from ptrie.harness.bench import BACKENDS, IncompatibleWorkload, bench, rows_to_csv
from ptrie.harness.runner import _jsonable, diff_run
from ptrie.harness.workload import (
    DISTRIBUTIONS,
    MIXES,
    Workload,
    WorkloadError,
    format_workload,
    gen_workload,
    read_workload,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    w = gen_workload(args.mode, args.ops, args.dist, seed=args.seed, k=args.k, mix=args.mix)
    _emit(format_workload(w), args.out)
    return EXIT_OK


def cmd_diff(args) -> int:
    w = read_workload(args.workload)
    report = diff_run(w, paranoid=args.paranoid)
    if args.json:
        summary = {
            "mismatches": report.mismatches,
            "max_layer_visits": report.max_layer_visits,
            "max_bst_comparisons": report.max_bst_comparisons,
            "depth_max": report.depth_max,
            "layers_per_level": report.layers_per_level,
            "timings": report.timings,
            "violations": report.violations,
            "minimized": report.minimized,
            "passed": report.passed,
        }
        print(json.dumps(summary, default=_jsonable, indent=2))
    else:
        status = "PASS" if report.passed else "FAIL"
        print(f"{status} {w.name or args.workload}: {len(w.ops)} ops, depth_max={report.depth_max}, "
              f"max_layer_visits={report.max_layer_visits}, max_bst_comparisons={report.max_bst_comparisons}")
        for m in report.mismatches:
            print(f"  mismatch at op {m['index']} {m['op']!r}: ptrie={m['ptrie']!r} oracle={m['oracle']!r}")
        for v in report.violations[:20]:
            print(f"  violation: {v}")
        if report.minimized:
            print("  minimized failing sequence:")
            text = format_workload(Workload(mode=w.mode, k=w.k, ops=report.minimized))
            print("    " + text.rstrip().replace("\n", "\n    "))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_bench(args) -> int:
    w = read_workload(args.workload)
    backends = BACKENDS if args.backend == "both" else (args.backend,)
    try:
        rows = [bench(w, b, repeat=args.repeat) for b in backends]
    except IncompatibleWorkload as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out and args.out.endswith(".json"):
        text = json.dumps([{k: v for k, v in asdict(r).items() if k != "drain"} for r in rows], indent=2) + "\n"
    else:
        text = rows_to_csv(rows)
    _emit(text, args.out)
    if len(rows) == 2 and rows[0].drain != rows[1].drain:
        print("error: backends produced different drain sequences", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_analyze(args) -> int:
    k = int(round(math.log2(args.p)))
    if args.p < 2 or 1 << k != args.p:
        print("error: --p must be a power of two >= 2", file=sys.stderr)
        return EXIT_USAGE
    cfg = PatternConfig(k, args.m)
    profile = empirical_profile(args.trials, args.n, cfg, seed=args.seed)
    rows = profile_table(profile)
    if args.out and args.out.endswith(".json"):
        text = json.dumps(rows, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ptrie", description="Priority trie harness")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a workload file")
    g.add_argument("--mode", required=True, help="u8|u16|u32|u<m>|i64|f64|str")
    g.add_argument("--ops", type=int, required=True)
    g.add_argument("--dist", choices=DISTRIBUTIONS, default="uniform")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--mix", choices=MIXES, default="mixed")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("diff", help="run a workload against the oracle")
    d.add_argument("--workload", required=True)
    d.add_argument("--paranoid", action="store_true", help="validate after every mutating op")
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_diff)

    b = sub.add_parser("bench", help="time a priority-queue workload")
    b.add_argument("--workload", required=True)
    b.add_argument("--backend", choices=BACKENDS + ("both",), default="both")
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    a = sub.add_parser("analyze", help="layer counts: formula against simulation")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--p", type=int, default=4)
    a.add_argument("--m", type=int, default=16)
    a.add_argument("--trials", type=int, default=200)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (WorkloadError, InvalidConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
