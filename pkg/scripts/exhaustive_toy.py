"""Every op sequence up to a given length over 2-bit keys, checked against the oracle.

    python scripts/exhaustive_toy.py --length 8
"""
import argparse
import time

from ptrie.harness.exhaustive import exhaustive_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=8)
    ap.add_argument("--no-memo", action="store_true", help="replay every prefix (slow beyond length 5)")
    args = ap.parse_args()
    t0 = time.perf_counter()
    r = exhaustive_check(args.length, memo=not args.no_memo)
    print(f"{'PASS' if r.passed else 'FAIL'}: {r.sequences} sequences, {r.states} states, "
          f"{r.prefixes} replays, {time.perf_counter() - t0:.1f} s")
    for m in r.mismatches[:10]:
        print("  ", m)
    return 0 if r.passed else 1


if __name__ == "__main__":
    raise SystemExit(main())
