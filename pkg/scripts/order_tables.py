"""CSV tables of factorization and cancellation remainders on n-doubling grids.

Columns: kind, measure, r, m_list, n, remainder, n^k * remainder (k = the
expected order). Pipe into any plotting tool.
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from permoments.ensembles import eb_expectation_single, eb_product_exact
from permoments.ensembles import MomentSpec
from permoments.verify import cancellation_remainder, pair_moments


@dataclass(frozen=True)
class Case:
    kind: str
    measure: str
    r: int
    m_list: tuple[int, ...]
    order: int


CASES = (
    Case("factorization", "e1", 2, (2, 2), 4),
    Case("factorization", "e1", 2, (3, 3), 4),
    Case("factorization", "e1", 3, (2, 2), 4),
    Case("factorization", "e1", 3, (3, 2), 4),
    Case("factorization", "eb", 2, (2, 2), 1),
    Case("cancellation", "formulas", 2, (2, 2), 2),
    Case("cancellation", "formulas", 3, (2, 1), 2),
    Case("cancellation", "formulas", 2, (3, 2), 2),
)


def remainder(case: Case, n: int):
    if case.kind == "cancellation":
        return cancellation_remainder(MomentSpec(n, case.r, case.m_list))
    m1, m2 = case.m_list
    if case.measure == "e1":
        both, a, b = pair_moments(n, case.r, m1, m2)
    else:
        both = eb_product_exact(n, case.r, m1, m2)
        a, b = eb_expectation_single(n, case.r, m1), eb_expectation_single(n, case.r, m2)
    return both / (a * b) - 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", default="8,16,32,64,128")
    args = ap.parse_args()
    grid = [int(x) for x in args.grid.split(",")]
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["kind", "measure", "r", "m_list", "n", "remainder", "scaled"])
    for case in CASES:
        for n in grid:
            rem = remainder(case, n)
            w.writerow([case.kind, case.measure, case.r, "-".join(map(str, case.m_list)), n,
                        f"{float(rem):.10g}", f"{float(rem * n**case.order):.10g}"])


if __name__ == "__main__":
    main()
