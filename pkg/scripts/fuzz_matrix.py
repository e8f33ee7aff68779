"""Differential fuzz over modes x distributions x digit widths.

    python scripts/fuzz_matrix.py --ops 100000 --out fuzz.json
"""
import argparse
import json
import time

from ptrie.harness.runner import run_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", nargs="+", default=["u16", "u32", "i64", "f64"])
    ap.add_argument("--dists", nargs="+", default=["uniform", "clustered", "duplicate-heavy"])
    ap.add_argument("--ks", nargs="+", type=int, default=[1, 2, 4, 8])
    ap.add_argument("--ops", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", help="write per-config reports as JSON")
    args = ap.parse_args()

    t0 = time.perf_counter()
    cells = run_matrix(args.modes, args.dists, args.ks, args.ops, seed=args.seed, workers=args.workers)
    total = time.perf_counter() - t0
    print(f"{'mode':5} {'dist':16} {'k':>2} {'ok':>4} {'depth':>5} {'visits':>6} {'cmps':>5} {'secs':>6}")
    for (mode, dist, k), r, secs in cells:
        print(f"{mode:5} {dist:16} {k:>2} {'yes' if r.passed else 'NO':>4} {r.depth_max:>5} "
              f"{r.max_layer_visits:>6} {r.max_bst_comparisons:>5} {secs:>6.1f}")
    failed = sum(not r.passed for _, r, _ in cells)
    print(f"{len(cells)} configs, {failed} failed, {total:.1f} s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([{"cell": c, "seconds": s, **json.loads(r.to_json())} for c, r, s in cells], fh, indent=1)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
