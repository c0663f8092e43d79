"""Regenerate e1_reference.csv: E1 on logspace[1e-8, 700], 200 points.

Values come from the power series -gamma - ln x - sum (-x)^n/(n n!) summed
in arbitrary precision (the working precision grows with x to absorb the
cancellation), and are cross-checked against mpmath.e1.
"""

import csv
import math

import mpmath


def e1_series(x):
    x = mpmath.mpf(x)
    total = mpmath.mpf(0)
    term = mpmath.mpf(1)
    n = 0
    while True:
        n += 1
        term *= -x / n
        contrib = term / n
        total += contrib
        if n > x and abs(contrib) < mpmath.mpf(10) ** (-mpmath.mp.dps):
            break
    return -mpmath.euler - mpmath.log(x) - total


def main():
    count, lo, hi = 200, 1e-8, 700.0
    rows = []
    for i in range(count):
        x = lo if i == 0 else hi if i == count - 1 else float(
            10 ** (math.log10(lo) + (math.log10(hi) - math.log10(lo)) * i / (count - 1))
        )
        # Terms peak near e^x while E1 ~ e^-x, so ~2x/ln(10) digits cancel.
        mpmath.mp.dps = int(x / 1.15) + 40
        v = e1_series(x)
        check = mpmath.e1(x)
        assert abs(v - check) <= abs(check) * mpmath.mpf(10) ** -30, x
        rows.append((repr(x), mpmath.nstr(v, 25, min_fixed=1, max_fixed=0)))
    with open("e1_reference.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["x", "e1"])
        w.writerows(rows)


if __name__ == "__main__":
    main()
