"""Scan deg Q2 over 2 <= m1 <= m2 <= mmax and print one row per pair.

The defaults cover r = 2 up to m = 8 (about two minutes) and r = 3 up to
m = 6 (about thirty seconds).
"""

import argparse
import time

from permoments.verify import degree_claim_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--mmax", type=int, nargs="+", default=[8, 6], help="one per r")
    args = ap.parse_args()
    for r, mmax in zip(args.r, args.mmax):
        t0 = time.perf_counter()
        rep = degree_claim_scan(r, mmax)
        print(f"r={r} mmax={mmax}: {rep.verdict} ({time.perf_counter() - t0:.1f}s)")
        print("  m1 m2  deg  expected  leading")
        for row in rep.evidence["pairs"]:
            if "error" in row:
                print(f"  {row['m'][0]:2d} {row['m'][1]:2d}  {row['error']}")
                continue
            print(f"  {row['m'][0]:2d} {row['m'][1]:2d}  {row['degree']:3d}  {row['expected']:8d}  {row['leading']}")


if __name__ == "__main__":
    main()
