"""Monte Carlo column chains with vertical perimeter attached.

A trajectory starts from a virtual predecessor x_0 ~ pi2, then draws
x_1..x_m from the transition matrix Pi, so x_1 is already stationary.
Vertical contributions T_d are sampled from the family's placement law
given (x_{d-1}, x_d). For dcc the offsets u_d (uniform on 1..x_d) are
sampled once per column and shared by the two steps that use them:
T_d = |x_d - u_{d-1}| + (x_d - u_d).

Every random stream is a Philox-4x64-10 generator keyed by a numpy
SeedSequence (seed, spawn_key=(trial, stream)); trajectories are therefore
reproducible bit for bit and trials can run in any order.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .families import FamilyId, as_family
from .markov import ChainModel, build_chain
from .moments import joint_stats

GENERATOR = "numpy.random.Philox(4x64-10)+SeedSequence"

CHAIN, PERIMETER, EXTENSION = 0, 1, 2


def rng_for(seed: int, trial: int = 0, stream: int = CHAIN) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial), int(stream)))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Trajectory:
    family: FamilyId
    seed: int
    columns: np.ndarray = field(repr=False)
    vertical: np.ndarray | None = field(default=None, repr=False)
    prev: int = 0
    offsets: np.ndarray | None = field(default=None, repr=False)
    trial: int = 0

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def X(self) -> np.ndarray:
        return np.cumsum(self.columns)

    @property
    def Q(self) -> np.ndarray:
        if self.vertical is None:
            raise ValueError("no vertical perimeter attached")
        return np.cumsum(self.vertical)


class _Tables:
    """Inverse-CDF tables shared by single and batched sampling.

    Row k of Pi is stored as k + cdf_k(j) in one increasing array, so a draw
    from row k is a single bisection of k + u.
    """

    def __init__(self, chain: ChainModel):
        K = chain.K_max
        self.K = K
        p0 = np.asarray(chain.pi2, dtype=np.float64)
        self.cdf0 = np.cumsum(p0) / p0.sum()
        self.cdf0[-1] = 1.0
        Pi = np.asarray(chain.Pi, dtype=np.float64)
        rows = np.cumsum(Pi, axis=1) / Pi.sum(axis=1, keepdims=True)
        rows[:, -1] = 1.0
        self.flat = (rows + np.arange(K)[:, None]).ravel()
        self.flat_list = self.flat.tolist()

    def first(self, u):
        return np.minimum(np.searchsorted(self.cdf0, u, side="right"), self.K - 1) + 1

    def step(self, state, u):
        """Next sizes for current sizes `state` (1-based arrays)."""
        s = state - 1
        i = np.searchsorted(self.flat, s + u, side="right") - s * self.K
        return np.minimum(i, self.K - 1) + 1

    def walk(self, x, us):
        """Sequential walk for one chain (list bisection, same keys as ``step``)."""
        flat, K = self.flat_list, self.K
        out = np.empty(len(us), dtype=np.int64)
        s = x - 1
        for d, u in enumerate(us.tolist()):
            i = bisect.bisect_right(flat, s + u) - s * K
            s = min(i, K - 1)
            out[d] = s + 1
        return out


_TABLES: dict = {}


def _tables(chain: ChainModel) -> _Tables:
    key = id(chain)
    t = _TABLES.get(key)
    if t is None or t[0] is not chain:
        t = (chain, _Tables(chain))
        _TABLES[key] = t
    return t[1]


def _chain(family, chain):
    f = as_family(family)
    c = chain or build_chain(f)
    if c.family is not f:
        raise ValueError("chain model was built for another family")
    return f, c


def sample_chain(family, m: int, seed: int, chain: ChainModel | None = None,
                 trial: int = 0) -> Trajectory:
    """Columns x_1..x_m of the stationary chain; deterministic in (seed, trial)."""
    if m < 1:
        raise ValueError("m must be positive")
    f, c = _chain(family, chain)
    tb = _tables(c)
    us = rng_for(seed, trial, CHAIN).random(m + 1)
    x0 = int(tb.first(us[0]))
    cols = tb.walk(x0, us[1:])
    return Trajectory(f, int(seed), cols, prev=x0, trial=trial)


def _steps(f: FamilyId, k, j, u):
    """Vertical contributions for arrays of (k, j) given uniforms u."""
    if f is FamilyId.CC:
        z = np.floor(u * (k + j - 1)).astype(np.int64) - (k - 1)
        return np.abs(z) + np.abs(z + k - j)
    if f is FamilyId.DC:
        n = k - j + 2
        b = np.floor(u * n).astype(np.int64)
        return 2 * ((b == 0).astype(np.int64) + (b == n - 1))
    if f is FamilyId.ST:
        w = np.floor(u * np.minimum(k, j)).astype(np.int64)
        return 2 * w + np.abs(k - j)
    return np.abs(j - k)


def _offsets(x, u):
    return np.floor(u * x).astype(np.int64) + 1


def attach_perimeter(traj: Trajectory, seed: int | None = None) -> Trajectory:
    """Sample T_d from the placement law given consecutive column sizes."""
    f = traj.family
    s = traj.seed if seed is None else seed
    x = traj.columns
    prev = np.concatenate(([traj.prev], x[:-1]))
    rng = rng_for(s, traj.trial, PERIMETER)
    if f is FamilyId.DCC:
        u = _offsets(np.concatenate(([traj.prev], x)), rng.random(len(x) + 1))
        T = np.abs(x - u[:-1]) + (x - u[1:])
        return replace(traj, vertical=T, offsets=u)
    T = _steps(f, prev, x, rng.random(len(x)))
    return replace(traj, vertical=T)


def _extend(traj: Trajectory, extra: int, chain: ChainModel, rng) -> Trajectory:
    tb = _tables(chain)
    cols = tb.walk(int(traj.columns[-1]), rng.random(extra))
    allc = np.concatenate((traj.columns, cols))
    if traj.vertical is None:
        return replace(traj, columns=allc)
    k = np.concatenate((traj.columns[-1:], cols[:-1]))
    if traj.family is FamilyId.DCC:
        u = _offsets(cols, rng.random(extra))
        T = np.abs(cols - np.concatenate((traj.offsets[-1:], u[:-1]))) + (cols - u)
        return replace(traj, columns=allc, vertical=np.concatenate((traj.vertical, T)),
                       offsets=np.concatenate((traj.offsets, u)))
    T = _steps(traj.family, k, cols, rng.random(extra))
    return replace(traj, columns=allc, vertical=np.concatenate((traj.vertical, T)))


def resize_to_area(traj: Trajectory, n: int, chain: ChainModel | None = None) -> Trajectory:
    """Extend or cut the chain to the largest m* with X(m*) <= n.

    Extra columns (and their perimeter) come from the trajectory's own
    extension stream, so the result is still a function of the seed.
    """
    if n < traj.columns[0]:
        raise ValueError("n must be at least the first column size")
    f, c = _chain(traj.family, chain)
    rng = None
    while traj.X[-1] < n:
        rng = rng or rng_for(traj.seed, traj.trial, EXTENSION)
        need = n - int(traj.X[-1])
        traj = _extend(traj, max(16, int(need * float(c.spectral.mu1) * 1.2) + 1), c, rng)
    ms = int(np.searchsorted(traj.X, n, side="right"))
    if ms == traj.m:
        return traj
    out = replace(traj, columns=traj.columns[:ms])
    if traj.vertical is not None:
        out = replace(out, vertical=traj.vertical[:ms])
    if traj.offsets is not None:
        out = replace(out, offsets=traj.offsets[:ms + 1])
    return out


# batched trials ------------------------------------------------------------------

def _batch(f: FamilyId, c: ChainModel, m: int, seed: int, trials: int, M: int):
    """X(m), and per-trial columns and vertical steps for M columns."""
    tb = _tables(c)
    uc = np.stack([rng_for(seed, t, CHAIN).random(M + 1) for t in range(trials)])
    up = np.stack([rng_for(seed, t, PERIMETER).random(M + 1) for t in range(trials)])
    cols = np.empty((trials, M + 1), dtype=np.int64)
    cols[:, 0] = tb.first(uc[:, 0])
    for d in range(1, M + 1):
        cols[:, d] = tb.step(cols[:, d - 1], uc[:, d])
    x = cols[:, 1:]
    if f is FamilyId.DCC:
        u = _offsets(cols, up)
        T = np.abs(x - u[:, :-1]) + (x - u[:, 1:])
    else:
        T = _steps(f, cols[:, :-1], x, up[:, :M])
    return x, T


def terminal_sums(family, m: int, trials: int, seed: int,
                  chain: ChainModel | None = None, chunk: int = 4096):
    """(X(m), Q(m)) for each trial, advancing all trials together in chunks.

    Memory stays O(trials * chunk) however long the chains are. Trial t uses
    the same streams as ``attach_perimeter(sample_chain(..., trial=t))`` and
    gives the same endpoints.
    """
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be positive")
    f, c = _chain(family, chain)
    tb = _tables(c)
    rc = [rng_for(seed, t, CHAIN) for t in range(trials)]
    rp = [rng_for(seed, t, PERIMETER) for t in range(trials)]
    state = tb.first(np.array([g.random(1)[0] for g in rc]))
    u_prev = None
    if f is FamilyId.DCC:
        u_prev = _offsets(state, np.array([g.random(1)[0] for g in rp]))
    X = np.zeros(trials, dtype=np.int64)
    Q = np.zeros(trials, dtype=np.int64)
    flat, K = tb.flat, tb.K
    done = 0
    while done < m:
        n = min(chunk, m - done)
        uc = np.stack([g.random(n) for g in rc], axis=1)
        up = np.stack([g.random(n) for g in rp], axis=1)
        cols = np.empty((n + 1, trials), dtype=np.int64)
        cols[0] = state
        s = state - 1
        for d in range(n):
            # inlined _Tables.step on 0-based sizes
            s = np.minimum(np.searchsorted(flat, s + uc[d], side="right") - s * K, K - 1)
            cols[d + 1] = s
        cols[1:] += 1
        x = cols[1:]
        if f is FamilyId.DCC:
            u = _offsets(x, up)
            T = np.abs(x - np.vstack((u_prev[None, :], u[:-1]))) + (x - u)
            u_prev = u[-1]
        else:
            T = _steps(f, cols[:-1], x, up)
        X += x.sum(axis=0)
        Q += T.sum(axis=0)
        state = cols[-1]
        done += n
    return X, Q


@dataclass(frozen=True)
class GaussianReport:
    family: str
    m: int
    trials: int
    seed: int
    n: int
    z_mu2: float
    z_var2: float | None
    z_mu4s: float
    z_var4s: float | None
    ks: float
    ks_pvalue: float
    variance_check: str
    generator: str = GENERATOR

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    def max_abs_z(self) -> float:
        zs = [self.z_mu2, self.z_var2, self.z_mu4s, self.z_var4s]
        return max(abs(z) for z in zs if z is not None)


def _z_mean(values, target, var):
    return (float(np.mean(values)) - target) / math.sqrt(var / len(values))


def _z_var(values, target):
    k = len(values)
    if k < 2:
        return None
    return (float(np.var(values, ddof=1)) - target) / (target * math.sqrt(2 / (k - 1)))


def gaussian_check(family, m: int, trials: int, seed: int,
                   chain: ChainModel | None = None) -> GaussianReport:
    """Per-trial protocol: chain of m columns, then resize to n = floor(m/mu1).

    z_mu2/z_var2 test X(m) against m mu2 and m sigma2^2; z_mu4s/z_var4s test
    Q(m*) against n mu4* and n sigma4*^2. Mean z-scores use the theoretical
    standard deviation, so they are defined for a single trial; the
    variance z-scores need two trials or more and are skipped otherwise.
    KS compares (Q(m*) - n mu4*)/(sqrt(n) sigma4*) with N(0, 1).
    """
    if m < 1 or trials < 1:
        raise ValueError("m and trials must be positive")
    f, c = _chain(family, chain)
    sc = c.spectral
    ps = joint_stats(f)
    mu1, mu2, s2 = float(sc.mu1), float(sc.mu2), float(sc.sigma2_sq)
    mu4s, s4s = float(ps.mu4_star), float(ps.sigma4_star_sq)
    n = int(math.floor(m / mu1))
    spread = math.sqrt(n * float(sc.sigma1_sq))
    M = max(m, int(n * mu1 + 8 * spread) + 16)
    x, T = _batch(f, c, m, seed, trials, M)
    X = np.cumsum(x, axis=1)
    Q = np.cumsum(T, axis=1)
    Xm = X[:, m - 1].astype(np.float64)
    q = np.empty(trials)
    for t in range(trials):
        ms = int(np.searchsorted(X[t], n, side="right"))
        if ms == M:  # ran out of columns; continue this trial on its own stream
            traj = attach_perimeter(sample_chain(f, M, seed, c, trial=t))
            traj = resize_to_area(traj, n, c)
            q[t] = traj.Q[-1]
        else:
            q[t] = Q[t, ms - 1]
    zq = (q - n * mu4s) / math.sqrt(n * s4s)
    ks = stats.kstest(zq, "norm")
    return GaussianReport(
        family=f.value, m=m, trials=trials, seed=int(seed), n=n,
        z_mu2=_z_mean(Xm, m * mu2, m * s2), z_var2=_z_var(Xm, m * s2),
        z_mu4s=_z_mean(q, n * mu4s, n * s4s), z_var4s=_z_var(q, n * s4s),
        ks=float(ks.statistic), ks_pvalue=float(ks.pvalue),
        variance_check="ok" if trials >= 2 else "skipped: fewer than two trials")


# trajectory output -------------------------------------------------------------

def stream_trajectory(family, m: int, seed: int, chain: ChainModel | None = None,
                      chunk: int = 1 << 16):
    """Yield (x, T) column chunks of one trajectory without holding all of it.

    Produces exactly the columns and steps of
    ``attach_perimeter(sample_chain(family, m, seed))``.
    """
    f, c = _chain(family, chain)
    tb = _tables(c)
    rc = rng_for(seed, 0, CHAIN)
    rp = rng_for(seed, 0, PERIMETER)
    x0 = int(tb.first(rc.random(1)[0]))
    prev = x0
    u_prev = None
    if f is FamilyId.DCC:
        u_prev = int(_offsets(np.array([x0]), rp.random(1))[0])
    done = 0
    while done < m:
        n = min(chunk, m - done)
        x = tb.walk(prev, rc.random(n))
        k = np.concatenate(([prev], x[:-1]))
        if f is FamilyId.DCC:
            u = _offsets(x, rp.random(n))
            T = np.abs(x - np.concatenate(([u_prev], u[:-1]))) + (x - u)
            u_prev = int(u[-1])
        else:
            T = _steps(f, k, x, rp.random(n))
        yield x, T
        prev = int(x[-1])
        done += n


def write_trajectory_csv(family, m: int, seed: int, fp, chain: ChainModel | None = None) -> None:
    """Rows step,x,X,T,Q; the first line is a comment naming the generator."""
    f = as_family(family)
    fp.write(f"# family={f.value} m={m} seed={seed} generator={GENERATOR}\n")
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(["step", "x", "X", "T", "Q"])
    step, X, Q = 0, 0, 0
    for xs, Ts in stream_trajectory(f, m, seed, chain):
        for x, t in zip(xs.tolist(), Ts.tolist()):
            step += 1
            X += x
            Q += t
            w.writerow([step, x, X, t, Q])
