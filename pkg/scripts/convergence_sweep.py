#!/usr/bin/env python3
"""Relative error of the scaled approximant against the closed form over a grid of N.

Prints one row per (x, N). The x=1/2 column shows that the error is not
monotone in N: it tracks the fractional position of sqrt(N) within its
integer band rather than N itself.
"""

import argparse
from fractions import Fraction

from radgaps.core import parse_rational
from radgaps.engine import SequenceSpec, convergence_series, relative_error


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--x", default="1/2,1/3,2/5,3/8")
    ap.add_argument("--alpha", type=int, default=2)
    ap.add_argument("--a", type=int, default=1)
    ap.add_argument("--decades", type=int, default=6)
    ap.add_argument("--per-decade", type=int, default=4)
    args = ap.parse_args()

    schedule = sorted({int(round(10 ** (3 + i / args.per_decade))) for i in range(args.per_decade * (args.decades - 2) + 1)})
    template = SequenceSpec(schedule[0], alpha=args.alpha, a=args.a)
    print("x\tN\tscaled\trel_err\tsqrtN_frac")
    for token in args.x.split(","):
        x: Fraction = parse_rational(token)
        for N, approx in zip(schedule, convergence_series(template, x, schedule)):
            err = relative_error(approx, x, template.with_n(N))
            frac = N**0.5 % 1
            print(f"{x}\t{N}\t{float(approx.scaled_width):.6f}\t{err:.2e}\t{frac:.3f}")


if __name__ == "__main__":
    main()
