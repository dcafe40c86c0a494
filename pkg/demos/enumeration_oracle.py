"""Exact counts as a check on the asymptotics.

Counts grow like C1/rho^n; successive ratios approach rho, and the perimeter
histograms drift toward mu4 per unit area.

    python3 demos/enumeration_oracle.py
"""

from polyostat import enumerate as en
from polyostat import bender_width_constants, joint_stats


def main():
    t = en.count_table("dcc", 40)
    print("dcc totals:", t.totals()[:10], "...")
    print(f"growth estimate at n = 40: {en.growth_estimate(t):.12f}")
    print(f"rho from the kernel:       {float(bender_width_constants('dcc').rho):.12f}")

    # Two independent paths agree on every area.
    for f in ("cc", "st", "es"):
        table = en.count_table(f, 10).totals()
        brute = [en.exact_perimeter_histogram(f, n).total for n in range(1, 11)]
        print(f"{f}: slice DP == geometric enumeration: {table == brute}")

    mu4 = float(joint_stats("cc").mu4)
    print(f"\ncc perimeter mean per cell (target {mu4:.6f}):")
    for n in range(6, 15, 2):
        h = en.exact_perimeter_histogram("cc", n)
        print(f"  n = {n:2d}: {h.mean() / n:.6f}  ({h.total} polyominoes)")

    print("\nlocal limit residuals (dcc):")
    for n in (10, 20, 30, 40):
        print(f"  n = {n}: {en.llt_residual('dcc', n, t):.4f}")


if __name__ == "__main__":
    main()
