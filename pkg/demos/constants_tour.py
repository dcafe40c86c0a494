"""Walk through the constants of every family, from the dominant root to the
perimeter mean and variance per unit area.

    python3 demos/constants_tour.py
"""

from polyostat import FAMILIES, bender_width_constants, joint_stats
from polyostat.spectral import verify_dominant_root


def main():
    print(f"{'family':6} {'rho':>12} {'mu1':>12} {'sigma1^2':>12} {'mu4':>12} {'sigma4^2':>12}")
    for f in FAMILIES:
        sc = bender_width_constants(f)
        ps = joint_stats(f)
        print(f"{f.value:6} {float(sc.rho):12.9f} {float(sc.mu1):12.9f} "
              f"{float(sc.sigma1_sq):12.9f} {float(ps.mu4):12.9f} {float(ps.sigma4_sq):12.9f}")

    # The root is only useful if nothing else sits on the disk |z| <= rho.
    print()
    for f in FAMILIES:
        print(f"{f.value}: zeros of h(1, z) inside 1.1 rho = {verify_dominant_root(f, 1.1)}")

    # Width and column size are reciprocal: mu1 * mu2 = 1.
    sc = bender_width_constants("cc")
    print(f"\ncc: mu1 * mu2 = {float(sc.mu1 * sc.mu2):.15f}")

    ps = joint_stats("cc")
    print(f"cc: Corr(X, Q) = {float(ps.rho_XQ):.10f}, gamma = {float(ps.gamma):.10f}")


if __name__ == "__main__":
    main()
