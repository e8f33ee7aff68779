"""Per-level layer counts: simulation against the unbounded and finite-width formulas.

    python scripts/formula_profile.py --n 1024 --p 4 --m 16 --trials 200
"""
import argparse
import math

from ptrie.analysis import empirical_profile, profile_table
from ptrie.codec import PatternConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--p", type=int, default=4)
    ap.add_argument("--m", type=int, default=16)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = PatternConfig(int(math.log2(args.p)), args.m)
    rows = profile_table(empirical_profile(args.trials, args.n, cfg, seed=args.seed))
    floor = 1.0 / args.trials
    print(f"{'level':>5} {'unbounded':>10} {'finite':>10} {'mean':>10} {'se':>7} {'z_unb':>8} {'z_fin':>8}")
    for r in rows:
        se = r["standard_error"] or floor
        z_unb = (r["empirical_mean"] - r["formula"]) / se
        z_fin = (r["empirical_mean"] - r["finite_formula"]) / se
        print(f"{r['level']:>5} {r['formula']:>10.4f} {r['finite_formula']:>10.4f} {r['empirical_mean']:>10.4f} "
              f"{r['standard_error']:>7.4f} {z_unb:>8.1f} {z_fin:>8.1f}")


if __name__ == "__main__":
    main()
