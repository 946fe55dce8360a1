"""Reconstruct Q1 = E1(perm_m1 perm_m2) and Q2 = Q1 - E1(perm_m1) E1(perm_m2) exactly.

    python scripts/reproduce_q1_q2.py                 # r = 2, (5, 3)
    python scripts/reproduce_q1_q2.py --r 3 --m 3,3   # rational functions
"""

import argparse
import time

from permoments.verify import KNOWN_Q1_R2_5_3, KNOWN_Q2_R2_5_3, NodePolicy, reconstruct_q1_q2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--m", default="5,3")
    ap.add_argument("--start", type=int, default=None)
    args = ap.parse_args()
    m1, m2 = (int(x) for x in args.m.split(","))
    t0 = time.perf_counter()
    q1, q2 = reconstruct_q1_q2(args.r, m1, m2, NodePolicy(start=args.start))
    print(f"r={args.r} m=({m1},{m2}) nodes {q1.nodes_used[0]}..{q1.nodes_used[-1]} "
          f"({time.perf_counter() - t0:.1f}s)")
    print("Q1 =", q1.model)
    print("Q2 =", q2.model)
    print("deg Q2 =", q2.degree, " expected", m1 + m2 - 4)
    if (args.r, {m1, m2}) == (2, {5, 3}):
        print("Q1 matches reference:", q1.model == KNOWN_Q1_R2_5_3)
        print("Q2 matches reference:", q2.model == KNOWN_Q2_R2_5_3)


if __name__ == "__main__":
    main()
