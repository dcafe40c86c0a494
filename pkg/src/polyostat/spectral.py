"""Dominant singularity, Bender width constants and amplitude weights."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._numeric import Jet, PolyostatError, RootNotFoundError, working_dtype
from .families import FamilyId, as_family, family_spec
from .qseries import (KernelModel, base_numerator, default_model, first_numerator,
                      kernel_h, perimeter_gf)

K_MAX = 80


@dataclass(frozen=True)
class SpectralConstants:
    """Width constants and amplitudes at the dominant singularity rho.

    ``C1``/``C2`` refer to the family's base series (any first column for
    dcc, cc, wa; a single first cell for dc, st, es). ``c2_weights[j-1]`` is
    C2(j) for first column j and ``C2_total`` their sum, which is the
    amplitude of all polyominoes; ``C1_total = mu1 * C2_total``.
    """

    family: FamilyId
    rho: float
    mu1: float
    sigma1_sq: float
    mu2: float
    sigma2_sq: float
    C1: float
    C2: float
    c2_weights: np.ndarray = field(repr=False)
    C2_total: float = 0.0
    C1_total: float = 0.0
    h_w: float = 0.0
    h_z: float = 0.0
    h_ww: float = 0.0


def _scan_root(fn, lo=0.01, hi=0.99, step=0.01):
    """Smallest root of fn on (lo, hi): grid scan, bisection, Newton polish."""
    dt = working_dtype()
    n = int(round((hi - lo) / step))
    grid = [dt(lo) + dt(k) * dt(step) for k in range(n + 1)]
    a, fa = grid[0], fn(grid[0])
    if fa == 0:
        return a
    for b in grid[1:]:
        fb = fn(b)
        if fb == 0:
            return b
        if (fa < 0) != (fb < 0):
            break
        a, fa = b, fb
    else:
        raise RootNotFoundError(f"no sign change in ({lo}, {hi})")
    for _ in range(200):
        c = (a + b) / 2
        if c == a or c == b:
            break
        fc = fn(c)
        if fc == 0:
            return c
        if (fc < 0) == (fa < 0):
            a, fa = c, fc
        else:
            b = c
        if b - a < dt(1e-14):
            break
    return (a + b) / 2


def _newton(fn_jet, z, lo, hi, steps=6):
    dt = working_dtype()
    for _ in range(steps):
        jz = Jet(dt(z), dt(0), dt(1), dt(0), dt(0), dt(0))
        v = fn_jet(jz)
        if v.z == 0:
            break
        step = v.f / v.z
        z_new = z - step
        if not (lo <= z_new <= hi):
            break
        if z_new == z:
            break
        z = z_new
    return z


def find_rho(family, model: KernelModel | None = None):
    """Smallest root of z -> h(1, z) in (0, 1)."""
    f = as_family(family)
    m = model or default_model(f)
    dt = working_dtype()
    one = dt(1)
    z = _scan_root(lambda x: kernel_h(f, one, x, m))
    return _newton(lambda jz: kernel_h(f, one, jz, m), z, z - dt(0.01), z + dt(0.01))


def _kernel_jet(f, rho, m):
    dt = working_dtype()
    w, z = Jet.seed(dt(1), dt(rho))
    return kernel_h(f, w, z, m)


def c2_weight(family, j: int, model: KernelModel | None = None, rho=None):
    """C2(j) = -N1(1, rho, j)/h_w(1, rho): amplitude for first column j."""
    f = as_family(family)
    m = model or default_model(f)
    if rho is None:
        rho = find_rho(f, m)
    dt = working_dtype()
    hw = _kernel_jet(f, rho, m).w
    return -first_numerator(f, dt(1), dt(rho), j, m) / hw


@lru_cache(maxsize=None)
def _constants(family: FamilyId, J: int, L: int, K: int, dtname: str):
    m = KernelModel(family, J, L)
    dt = working_dtype()
    rho = find_rho(family, m)
    h = _kernel_jet(family, rho, m)
    r1 = -h.w / h.z
    r2 = -(r1 * r1 * h.zz + 2 * r1 * h.wz + h.w + h.ww) / h.z
    mu1 = -r1 / rho
    sigma1_sq = mu1 * mu1 - r2 / rho
    n1 = base_numerator(family, dt(1), rho, m)
    C2 = -n1 / h.w
    C1 = -n1 / (rho * h.z)
    weights = np.array([-first_numerator(family, dt(1), rho, j, m) / h.w
                        for j in range(1, K + 1)], dtype=dt)
    weights.setflags(write=False)
    total = weights.sum()
    return SpectralConstants(
        family=family, rho=rho, mu1=mu1, sigma1_sq=sigma1_sq, mu2=1 / mu1,
        sigma2_sq=sigma1_sq / mu1 ** 3, C1=C1, C2=C2, c2_weights=weights,
        C2_total=total, C1_total=mu1 * total, h_w=h.w, h_z=h.z, h_ww=h.ww)


def bender_width_constants(family, model: KernelModel | None = None,
                           K_max: int = K_MAX) -> SpectralConstants:
    """Bender constants from analytic kernel derivatives at (1, rho).

    With r1 = -h_w/h_z and r2 = -(r1^2 h_zz + 2 r1 h_zw + h_w + h_ww)/h_z the
    width per unit area has mean mu1 = -r1/rho and variance
    sigma1^2 = mu1^2 - r2/rho; conditioning on width gives mu2 = 1/mu1 and
    sigma2^2 = sigma1^2/mu1^3.
    """
    f = as_family(family)
    m = model or default_model(f)
    return _constants(f, m.J_max, m.L_max, int(K_max), np.dtype(working_dtype()).name)


def verify_dominant_root(family, radius_factor: float = 1.1, points: int = 4096,
                         model: KernelModel | None = None) -> int:
    """Winding number of h(1, .) around |z| = rho * radius_factor."""
    f = as_family(family)
    m = model or default_model(f)
    rho = find_rho(f, m)
    if not 1 < radius_factor < 0.99 / float(rho):
        raise ValueError("radius_factor must lie in (1, 0.99/rho)")
    if points < 4096:
        raise ValueError("at least 4096 sample points are required")
    dt = working_dtype()
    cdt = np.clongdouble if dt is np.longdouble else np.complex128
    r = dt(rho) * dt(radius_factor)
    t = 2 * np.pi * np.arange(points + 1, dtype=dt) / points
    zs = (r * np.cos(t) + 1j * r * np.sin(t)).astype(cdt)
    one = cdt(1)
    vals = np.array([kernel_h(f, one, z, m) for z in zs], dtype=cdt)
    d = np.angle(vals[1:] / vals[:-1])
    if np.max(np.abs(d)) > np.pi / 2:
        raise PolyostatError("winding count inconclusive: sampling too coarse")
    return int(round(float(d.sum()) / (2 * np.pi)))


def gf_perimeter_constants(family, J: int = 16, step: float = 1e-4):
    """(mu4, sigma4^2) from the known joint perimeter/area GF.

    The root curve r(s) of F(e^s, r(s)) = 0 is differentiated with a five
    point stencil plus one Richardson step; the half-perimeter moments are
    rescaled to the full perimeter (x2 mean, x4 variance).
    """
    f = as_family(family)
    if not family_spec(f).supports_known_gf:
        raise ValueError(f"no known perimeter generating function for {f.value}")
    dt = working_dtype()

    def root(s):
        v = np.exp(dt(s))
        return _newton(lambda jz: perimeter_gf(f, v, jz, J),
                       r0 if s else _scan_root(lambda x: perimeter_gf(f, v, x, J)),
                       dt(0), dt(1), steps=40)

    r0 = dt(0)
    r0 = root(0)
    h = dt(step)

    def derivs(h):
        rp2, rp1, rm1, rm2 = root(2 * h), root(h), root(-h), root(-2 * h)
        d1 = (-rp2 + 8 * rp1 - 8 * rm1 + rm2) / (12 * h)
        d2 = (-rp2 + 16 * rp1 - 30 * r0 + 16 * rm1 - rm2) / (12 * h * h)
        return d1, d2

    a1, a2 = derivs(h)
    b1, b2 = derivs(h / 2)
    d1 = (16 * b1 - a1) / 15
    d2 = (16 * b2 - a2) / 15
    mu = -d1 / r0
    var = mu * mu - d2 / r0
    return 2 * mu, 4 * var
