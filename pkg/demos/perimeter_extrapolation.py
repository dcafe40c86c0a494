"""Perimeter mean and variance per cell from exact enumeration, extrapolated
in 1/n, next to the values from the chain.

The corrections are a series in 1/n, so a five point Lagrange fit at x = 1/n
removes the first four of them. Exact sums come from perimeter_moments, which
reaches areas far beyond the histogram cap.

    python3 demos/perimeter_extrapolation.py
"""

from fractions import Fraction

from polyostat import enumerate as en
from polyostat import joint_stats


GRID = {"dcc": (40, 45, 50, 55, 60), "cc": (40, 45, 50, 55, 60), "wa": (40, 45, 50, 55, 60),
        "dc": (60, 70, 80, 90, 100), "st": (60, 70, 80, 90, 100),
        "es": (100, 140, 180, 220, 260)}


def moments(f, n):
    N, S1, S2 = en.perimeter_moments(f, n)
    m = Fraction(S1, N)
    v = Fraction(S2, N) - m * m
    return m / n, v / n


def at_zero(xs, ys):
    tot = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = Fraction(1)
        for k, xk in enumerate(xs):
            if k != i:
                w *= -xk / (xi - xk)
        tot += w * yi
    return tot


def main():
    print(f"{'family':6} {'mu4 (exact, n->oo)':>20} {'mu4':>14} {'s4^2 (exact)':>14} {'s4^2':>14}")
    for f, ns in GRID.items():
        xs = [Fraction(1, n) for n in ns]
        ms, vs = zip(*(moments(f, n) for n in ns))
        ps = joint_stats(f)
        print(f"{f:6} {float(at_zero(xs, ms)):20.12f} {float(ps.mu4):14.12f} "
              f"{float(at_zero(xs, vs)):14.10f} {float(ps.sigma4_sq):14.10f}")


if __name__ == "__main__":
    main()
