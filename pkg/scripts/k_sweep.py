"""Worst-case step counts and slot memory for each digit width at m=32.

    python scripts/k_sweep.py --n 20000
"""
import argparse
import sys

from ptrie.harness.bench import k_sweep, sweep_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ks", nargs="+", type=int, default=[1, 2, 4, 8])
    ap.add_argument("--m", type=int, default=32)
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sys.stdout.write(sweep_to_csv(k_sweep(tuple(args.ks), args.m, args.n, args.seed)))


if __name__ == "__main__":
    main()
