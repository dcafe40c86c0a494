"""The Monte Carlo protocol: chains of m columns resized to area m/mu1.

With --long, also runs 200 chains of 10^6 columns per family and compares
Var(Q(m))/m and Corr(X(m), Q(m)) with sigma_Q^2 and rho_XQ (a few minutes).

    python3 demos/simulation_protocol.py [--long]
"""

import argparse
import math

import numpy as np

from polyostat import FAMILIES, joint_stats
from polyostat.simulate import gaussian_check, terminal_sums


def protocol():
    print(f"{'family':6} {'z_mu2':>7} {'z_var2':>7} {'z_mu4*':>7} {'z_var4*':>7} {'KS p':>6}")
    for i, f in enumerate(FAMILIES):
        r = gaussian_check(f, 400, 400, seed=100 + i)
        print(f"{f.value:6} {r.z_mu2:7.2f} {r.z_var2:7.2f} {r.z_mu4s:7.2f} "
              f"{r.z_var4s:7.2f} {r.ks_pvalue:6.3f}")


def long_run(m=1_000_000, trials=200):
    print(f"\nlong chains: m = {m}, {trials} trials")
    for i, f in enumerate(FAMILIES):
        X, Q = terminal_sums(f, m, trials, seed=900 + i)
        ps = joint_stats(f)
        v = Q.astype(float).var(ddof=1) / m
        se = float(ps.sigmaQ_sq) * math.sqrt(2 / (trials - 1))
        r = np.corrcoef(X.astype(float), Q.astype(float))[0, 1]
        print(f"  {f.value}: Var(Q)/m = {v:.4f} vs {float(ps.sigmaQ_sq):.4f} (se {se:.3f}), "
              f"corr = {r:.4f} vs {float(ps.rho_XQ):.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--long", action="store_true")
    args = ap.parse_args()
    protocol()
    if args.long:
        long_run()
