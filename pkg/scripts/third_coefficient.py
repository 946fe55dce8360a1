"""Third coefficient of the exact E1(perm_m) polynomial against the uniform-ensemble series.

For r = 2 the exact moment is a polynomial in n; its top two coefficients
agree with a and b, the third does not agree with c. This prints both.
"""

import argparse

from permoments.arith import format_rational
from permoments.formulas import series_coeffs
from permoments.verify import single_moment_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--mmax", type=int, default=8)
    args = ap.parse_args()
    print("m  a  b  c(uniform)  c(E1)  difference")
    for m in range(2, args.mmax + 1):
        model = single_moment_model(args.r, m)
        top = dict(model.descending(3))
        sc = series_coeffs(args.r, m)
        third = top.get(m - 2, 0)
        print(m, format_rational(top[m]), format_rational(top.get(m - 1, 0)),
              format_rational(sc.c), format_rational(third), format_rational(third - sc.c))


if __name__ == "__main__":
    main()
