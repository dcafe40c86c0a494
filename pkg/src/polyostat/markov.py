"""Column-size Markov chain of a large uniform random polyomino.

The last column of a polyomino of area n has the law pi(j) = [theta^j] G(theta)
read from the kernel pole; consecutive columns then follow

    P(k, j) = pi(k) U(k, j) C2(j),   Pi(k, j) = U(k, j) C2(j) / sum_j U(k, j) C2(j),

with stationary law pi2(k) = sum_j P(k, j). All laws are truncated to column
sizes 1..K_max and renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._numeric import ChainStructureError, working_dtype
from .families import FamilyId, as_family, gluing_count
from .qseries import KernelModel, default_model, theta_phi
from .spectral import K_MAX, SpectralConstants, bender_width_constants

# values below one ulp of the largest weight are rounding noise from the
# cancelling q-series and are treated as zero; a wider margin visibly
# truncates the tails that the higher moments depend on
NOISE_FLOOR = 1.0


@dataclass(frozen=True)
class ChainModel:
    family: FamilyId
    K_max: int
    pi: np.ndarray = field(repr=False)
    pi2: np.ndarray = field(repr=False)
    Pi: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    c2: np.ndarray = field(repr=False)
    spectral: SpectralConstants = field(repr=False)
    P_norm: float = 1.0

    @property
    def sizes(self):
        return np.arange(1, self.K_max + 1)

    @property
    def P(self):
        """Two-column law pi2(k) Pi(k, j)."""
        return self.pi2[:, None] * self.Pi


@dataclass(frozen=True)
class ChainReport:
    family: FamilyId
    row_sum_residual: float
    stationarity_residual: float
    reversibility_residual: float
    mixing_tv: float
    kernel_weight_residual: float


def gluing_matrix(family, K: int) -> np.ndarray:
    f = as_family(family)
    return np.array([[gluing_count(f, k, j) for j in range(1, K + 1)]
                     for k in range(1, K + 1)], dtype=np.int64)


def _clip_noise(x):
    x = np.array(x, copy=True)
    eps = np.finfo(x.dtype).eps
    x[x < NOISE_FLOOR * eps * np.max(np.abs(x))] = 0
    return x


@lru_cache(maxsize=None)
def _build(family: FamilyId, J: int, L: int, K: int, dtname: str) -> ChainModel:
    m = KernelModel(family, J, L)
    sc = bender_width_constants(family, m, K)
    dt = working_dtype()
    g = theta_phi(family, sc.rho, 1, m, order=max(L, K)).phi.coefficients[1:K + 1]
    pi = _clip_noise(g / g.sum())
    pi /= pi.sum()
    c2 = _clip_noise(sc.c2_weights)
    U = gluing_matrix(family, K)
    W = U.astype(dt) * c2[None, :]
    s = W.sum(axis=1)
    Pi = np.zeros((K, K), dtype=dt)
    for k in range(K):
        if s[k] > 0:
            Pi[k] = W[k] / s[k]
        else:
            # every admissible weight underflowed; the smallest admissible
            # size carries essentially all of the mass
            Pi[k, np.flatnonzero(U[k])[0]] = 1
    pi2 = pi * s
    norm = pi2.sum()
    pi2 = pi2 / norm
    for a in (pi, pi2, Pi):
        a.setflags(write=False)
    return ChainModel(family=family, K_max=K, pi=pi, pi2=pi2, Pi=Pi, U=U, c2=c2,
                      spectral=sc, P_norm=norm)


def build_chain(family, model: KernelModel | None = None, K_max: int = K_MAX) -> ChainModel:
    f = as_family(family)
    m = model or default_model(f)
    if K_max < 10:
        raise ValueError("K_max must be at least 10")
    return _build(f, m.J_max, m.L_max, int(K_max), np.dtype(working_dtype()).name)


def _check_index(model, *idx):
    for v in idx:
        if v < 1:
            raise ValueError("column sizes must be positive")
    return all(v <= model.K_max for v in idx)


def last_column_law(family, j: int, model: ChainModel | None = None):
    """pi(j): asymptotic probability that the last column has size j."""
    c = model or build_chain(family)
    return c.pi[j - 1] if _check_index(c, j) else c.pi.dtype.type(0)


def transition(family, k: int, j: int, model: ChainModel | None = None):
    """Pi(k, j): probability that a size-k column is followed by size j."""
    c = model or build_chain(family)
    return c.Pi[k - 1, j - 1] if _check_index(c, k, j) else c.Pi.dtype.type(0)


def stationary_law(family, k: int, model: ChainModel | None = None):
    """pi2(k): stationary probability of column size k."""
    c = model or build_chain(family)
    return c.pi2[k - 1] if _check_index(c, k) else c.pi2.dtype.type(0)


def chain_checks(family, model: ChainModel | None = None, lag: int = 10,
                 k_check: int = 30) -> ChainReport:
    """Structural residuals of the truncated chain.

    Residuals are maxima over k, j <= K_max - 5; the kernel/weight residual
    max_k |C2(k) - rho^k sum_j U(k, j) C2(j)| runs over k <= k_check.
    """
    f = as_family(family)
    c = model or build_chain(f)
    if c.family is not f:
        raise ChainStructureError("model was built for another family")
    K = c.K_max
    B = K - 5
    Pi, pi2 = c.Pi, c.pi2
    row = np.max(np.abs(Pi[:B].sum(axis=1) - 1))
    stat = np.max(np.abs(pi2 @ Pi - pi2)[:B])
    P = pi2[:, None] * Pi
    rev = np.max(np.abs(P - P.T)[:B, :B])
    e = np.zeros(K, dtype=Pi.dtype)
    e[0] = 1
    for _ in range(lag):
        e = e @ Pi
    tv = 0.5 * np.abs(e - pi2).sum()
    rho = c.spectral.rho
    w = c.spectral.c2_weights
    ks = np.arange(1, k_check + 1)
    lhs = w[:k_check]
    rhs = rho ** ks * (c.U[:k_check].astype(w.dtype) @ w)
    kw = np.max(np.abs(lhs - rhs))
    return ChainReport(f, row, stat, rev, tv, kw)
