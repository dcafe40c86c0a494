"""Vertical perimeter along the column chain and the final perimeter law.

Each glued column adds a vertical boundary contribution T whose law depends
on the sizes (k, j) of the two columns involved. With X the area and Q the
vertical perimeter accumulated over m columns, the pair (X, Q) is jointly
Gaussian per column with variances sigma_X^2, sigma_Q^2 and covariance C_XQ.
Conditioning on the area gives the perimeter per unit area:

    mu4 = mu1 (mu3 + hinc),    sigma4^2 = gamma mu1 + sigma1^2 beta^2.

Long-range covariances of chain functionals are summed exactly through the
theta-expansion of the width generating function (``xi5``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._numeric import working_dtype
from .families import FamilyId, as_family, gluing_count, horizontal_increment
from .markov import ChainModel, build_chain
from .qseries import KernelModel, default_model, theta_phi


@dataclass(frozen=True)
class PerimeterStats:
    family: FamilyId
    mu3: float
    sigma3_sq: float
    sigmaQ_sq: float
    C_XQ: float
    rho_XQ: float
    alpha: float
    beta: float
    gamma: float
    mu4: float
    sigma4_sq: float
    mu4_star: float
    sigma4_star_sq: float
    sigma_x_sq: float
    sigma_X_sq: float
    route: str


# step laws -----------------------------------------------------------------

def step_moments(family, k: int, j: int):
    """(E[T], E[T^2]) of the vertical contribution when j is glued after k."""
    f = as_family(family)
    if gluing_count(f, k, j) == 0:
        raise ValueError(f"{f.value}: a column of size {j} cannot follow size {k}")
    if f is FamilyId.DCC:
        # T = |j - u| + (j - v), u uniform on 1..k, v uniform on 1..j
        if j >= k:
            ea = Fraction(2 * j - k - 1, 2)
        else:
            ea = Fraction(j * (j - 1) + (k - j) * (k - j + 1), 2 * k)
        ea2 = Fraction(j * j) - j * (k + 1) + Fraction((k + 1) * (2 * k + 1), 6)
        ez = Fraction(j - 1, 2)
        ez2 = Fraction((j - 1) * (2 * j - 1), 6)
        return ea + ez, ea2 + 2 * ea * ez + ez2
    if f is FamilyId.CC:
        # z uniform on -(k-1)..(j-1), w = z + k - j, T = |w| + |z|
        n = k + j - 1
        d = k - j
        a1 = Fraction((j - 1) * j - (k - 1) * k, 2)
        a2 = Fraction((k - 1) * k * (2 * k - 1) + (j - 1) * j * (2 * j - 1), 6)
        ad = abs(d)
        s = a2 + d * a1 + Fraction((ad - 1) * ad * (ad + 1), 3)
        ez = Fraction(k * k + j * j - k - j, 2 * n)
        return 2 * ez, (2 * a2 + 2 * s) / n
    if f is FamilyId.DC:
        n = k - j + 2
        if n == 1:
            return Fraction(4), Fraction(16)
        return Fraction(4, n), Fraction(8, n)
    if f is FamilyId.ST:
        # T = 2w + |k - j| with w uniform on 0..min(k, j)-1
        n = min(k, j)
        d = abs(k - j)
        ew = Fraction(n - 1, 2)
        ew2 = Fraction((n - 1) * (2 * n - 1), 6)
        return 2 * ew + d, 4 * ew2 + 4 * d * ew + d * d
    d = abs(j - k)
    return Fraction(d), Fraction(d * d)


@lru_cache(maxsize=None)
def _step_tables(family: FamilyId, K: int, dtname: str):
    dt = working_dtype()
    e1 = np.zeros((K, K), dtype=dt)
    e2 = np.zeros((K, K), dtype=dt)
    for k in range(1, K + 1):
        for j in range(1, K + 1):
            if gluing_count(family, k, j):
                a, b = step_moments(family, k, j)
                e1[k - 1, j - 1] = dt(a.numerator) / dt(a.denominator)
                e2[k - 1, j - 1] = dt(b.numerator) / dt(b.denominator)
    e1.setflags(write=False)
    e2.setflags(write=False)
    return e1, e2


def step_tables(family, K: int):
    """K x K arrays of E_T(k, j) and E_T2(k, j) (zero where U = 0)."""
    return _step_tables(as_family(family), int(K), np.dtype(working_dtype()).name)


def vertical_stats(family, chain: ChainModel | None = None):
    """(mu3, sigma3^2): stationary mean and variance of one vertical step."""
    f = as_family(family)
    c = chain or build_chain(f)
    e1, e2 = step_tables(f, c.K_max)
    P = c.P
    mu3 = (P * e1).sum()
    return mu3, (P * e2).sum() - mu3 * mu3


# long-range covariances --------------------------------------------------------

@lru_cache(maxsize=None)
def _lag_kernel(family: FamilyId, J: int, L: int, K: int, dtname: str):
    """(M1 + M2)(j, l): constant term at w = 1 of [theta^l] phi(w, theta, rho, j)/w."""
    m = KernelModel(family, J, L)
    c = build_chain(family, m, K)
    sc = c.spectral
    hw, hww = sc.h_w, sc.h_ww
    n = min(L, K)
    out = np.zeros((K, n), dtype=working_dtype())
    for j in range(1, K + 1):
        tp = theta_phi(family, sc.rho, j, m, order=n)
        row = (tp.regular.coefficients + tp.phi_w.coefficients / hw
               - tp.phi.coefficients * hww / (2 * hw * hw))
        out[j - 1] = row[1:]
    out.setflags(write=False)
    return out


def _as_table(F, K, dt):
    if callable(F):
        k = np.arange(1, K + 1)[:, None]
        j = np.arange(1, K + 1)[None, :]
        return np.broadcast_to(np.asarray(F(k, j), dtype=dt), (K, K))
    return np.asarray(F, dtype=dt)[:K, :K]


def xi5(family, F1, F2, chain: ChainModel | None = None,
        model: KernelModel | None = None):
    """Sum over l >= 2 of Cov(F1(x_0, x_1), F2(x_{l-1}, x_l)) in stationarity.

    F1, F2 are functions of consecutive column sizes (callables on broadcast
    integer arrays, or K x K tables). The lag sum is read off the width
    generating function: its 1/(1-w) divergence cancels against the product of
    means, leaving the theta-coefficients of phi_w/h_w - phi h_ww/(2 h_w^2)
    plus the pole-free part.
    """
    f = as_family(family)
    if f is FamilyId.DCC:
        raise ValueError("dcc steps share the offset u between neighbours; "
                         "use joint_stats, which sums its covariances directly")
    m = model or default_model(f)
    c = chain or build_chain(f, m)
    dt = working_dtype()
    K = c.K_max
    f1 = _as_table(F1, K, dt)
    f2 = _as_table(F2, K, dt)
    M = _lag_kernel(f, m.J_max, m.L_max, K, np.dtype(dt).name)
    n = M.shape[1]
    U = c.U.astype(dt)
    # pi2(u) Pi(u, j)/C2(j) = pi(u) U(u, j)/norm, free of small C2 divisions
    a = (c.pi[:, None] * U * f1).sum(axis=0) / c.P_norm
    b = (U * c.c2[None, :] * f2).sum(axis=1)[:n]
    return a @ M @ b


# assembly ----------------------------------------------------------------------

def _finish(f, sc, mu3, s3, sQ, C, sx, sX, route):
    dt = working_dtype()
    hinc = horizontal_increment(f)
    mu1, mu2, s1, s2 = sc.mu1, sc.mu2, sc.sigma1_sq, sc.sigma2_sq
    sig2, sigQ = np.sqrt(s2), np.sqrt(sQ)
    rho = C / (sig2 * sigQ)
    alpha = sigQ * rho / sig2
    beta = mu3 + hinc - rho * mu2 * sigQ / sig2
    gamma = sQ * (1 - rho * rho)
    beta_s = mu3 - rho * mu2 * sigQ / sig2
    return PerimeterStats(
        family=f, mu3=dt(mu3), sigma3_sq=dt(s3), sigmaQ_sq=dt(sQ), C_XQ=dt(C),
        rho_XQ=dt(rho), alpha=alpha, beta=beta, gamma=gamma,
        mu4=alpha + beta * mu1, sigma4_sq=gamma * mu1 + s1 * beta * beta,
        mu4_star=mu1 * mu3, sigma4_star_sq=gamma * mu1 + s1 * beta_s * beta_s,
        sigma_x_sq=dt(sx), sigma_X_sq=dt(sX), route=route)


def _general(f, m, c):
    sc = c.spectral
    K = c.K_max
    e1, e2 = step_tables(f, K)
    P = c.P
    ks = c.sizes.astype(e1.dtype)
    mu2 = (c.pi2 * ks).sum()
    sx = (c.pi2 * ks * ks).sum() - mu2 * mu2
    mu3, s3 = vertical_stats(f, c)
    J = np.broadcast_to(ks[None, :], (K, K))
    sX = sx + 2 * xi5(f, J, J, c, m)
    sQ = s3 + 2 * xi5(f, e1, e1, c, m)
    C = ((P * J * e1).sum() - mu2 * mu3
         + xi5(f, J, e1, c, m) + xi5(f, e1, J, c, m))
    return _finish(f, sc, mu3, s3, sQ, C, sx, sX, "chain")


def _dcc(c):
    sc = c.spectral
    dt = working_dtype()
    K = c.K_max
    p = c.pi2
    ks = c.sizes.astype(dt)
    pu = np.cumsum((p / ks)[::-1])[::-1]  # law of u, uniform below a column
    A = np.abs(ks[None, :] - ks[:, None])  # |j - r|, rows r
    Ez = (p * (ks - 1)).sum() / 2
    Ew = pu @ A @ p
    mu3 = Ew + Ez
    S1 = pu @ (A * A) @ p
    S2 = pu @ A @ (p * (ks - 1) / 2)
    S3 = (p * (ks - 1) * (2 * ks - 1)).sum() / 6
    s3 = S1 + 2 * S2 + S3 - mu3 * mu3
    g = A @ p  # E|x - v| for fixed v
    G1 = np.cumsum(g) / ks
    G2 = np.array([((ks[i] - ks[:i + 1]) * g[:i + 1]).sum() for i in range(K)]) / ks
    S4 = pu @ A @ (p * G1)
    S7 = (p * G2).sum()
    ETT = S4 + Ew * Ez + Ez * Ez + S7
    sQ = s3 + 2 * (ETT - mu3 * mu3)
    mu2 = (p * ks).sum()
    S8 = pu @ A @ (p * ks) + (p * ks * (ks - 1)).sum() / 2
    S9 = (p * ks * G1).sum() + mu2 * Ez
    C = S8 + S9 - 2 * mu2 * mu3
    sx = (p * ks * ks).sum() - mu2 * mu2
    return _finish(FamilyId.DCC, sc, mu3, s3, sQ, C, sx, sx, "iid sums")


def wall_closed_forms(p=Fraction(1, 2)):
    """Exact per-column constants of walls with Geometric(p) column sizes."""
    p = Fraction(p)
    q = 1 - p
    mu2 = 1 / p
    s2 = q / p ** 2
    mu3 = 2 * q / (p * (2 - p))
    s3 = 2 * q * (p * p - 2 * p + 2) / (p * p * (2 - p) ** 2)
    sQ = (4 * q * (p ** 4 + 9 * p * p - 4 * p ** 3 - 10 * p + 5)
          / (p * p * (2 - p) ** 2 * (p * p + 3 - 3 * p)))
    C = 2 * (2 - 4 * p + 3 * p * p - p ** 3) / (p * p * (2 - p) ** 2)
    mu1 = 1 / mu2
    s1 = s2 * mu1 ** 3
    muR = mu3 + 2
    beta = muR - mu2 * C / s2
    gamma = sQ - C * C / s2
    return dict(mu1=mu1, sigma1_sq=s1, mu2=mu2, sigma2_sq=s2, mu3=mu3, sigma3_sq=s3,
                sigmaQ_sq=sQ, C_XQ=C, beta=beta, gamma=gamma, mu4=mu1 * muR,
                sigma4_sq=gamma * mu1 + s1 * beta * beta)


def _wa(c):
    dt = working_dtype()
    w = wall_closed_forms()

    def r(x):
        return dt(x.numerator) / dt(x.denominator)

    sc = c.spectral
    mu1, s1 = r(w["mu1"]), r(w["sigma1_sq"])
    mu2, s2 = r(w["mu2"]), r(w["sigma2_sq"])
    sQ, C, mu3 = r(w["sigmaQ_sq"]), r(w["C_XQ"]), r(w["mu3"])
    rho = C / np.sqrt(s2 * sQ)
    beta_s = mu3 - mu2 * C / s2
    gamma = r(w["gamma"])
    return PerimeterStats(
        family=FamilyId.WA, mu3=mu3, sigma3_sq=r(w["sigma3_sq"]), sigmaQ_sq=sQ,
        C_XQ=C, rho_XQ=rho, alpha=C / s2, beta=r(w["beta"]), gamma=gamma,
        mu4=r(w["mu4"]), sigma4_sq=r(w["sigma4_sq"]), mu4_star=mu1 * mu3,
        sigma4_star_sq=gamma * mu1 + s1 * beta_s * beta_s, sigma_x_sq=s2,
        sigma_X_sq=s2, route="closed form")


@lru_cache(maxsize=None)
def _joint(family: FamilyId, J: int, L: int, K: int, dtname: str, route: str):
    m = KernelModel(family, J, L)
    c = build_chain(family, m, K)
    if route == "chain":
        return _general(family, m, c)
    if family is FamilyId.DCC:
        return _dcc(c)
    if family is FamilyId.WA:
        return _wa(c)
    return _general(family, m, c)


def joint_stats(family, model: KernelModel | None = None, K_max: int = 80,
                route: str = "auto") -> PerimeterStats:
    """Full perimeter constants of the family.

    ``route="auto"`` uses the iid sums for dcc, the exact closed forms for wa
    and the chain/lag-sum machinery otherwise; ``route="chain"`` forces the
    general machinery, which needs a step law depending on the two adjacent
    sizes only (all families but dcc).
    """
    f = as_family(family)
    if route not in ("auto", "chain"):
        raise ValueError("route must be 'auto' or 'chain'")
    if route == "chain" and f is FamilyId.DCC:
        raise ValueError("the chain route does not apply to dcc")
    m = model or default_model(f)
    return _joint(f, m.J_max, m.L_max, int(K_max), np.dtype(working_dtype()).name, route)
