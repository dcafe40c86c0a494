import math

import numpy as np
import pytest

from polyostat._numeric import RootNotFoundError
from polyostat.moments import joint_stats
from polyostat.qseries import kernel_h
from polyostat.spectral import (_scan_root, bender_width_constants, c2_weight, find_rho,
                                gf_perimeter_constants, verify_dominant_root)

S5 = math.sqrt(5)
ALL = ["dcc", "cc", "dc", "st", "es", "wa"]


def cc_root():
    # oracle: bisection on the cubic 4 z^3 - 7 z^2 + 5 z - 1, in plain floats
    lo, hi = 0.2, 0.4
    for _ in range(200):
        mid = (lo + hi) / 2
        if (4 * mid ** 3 - 7 * mid ** 2 + 5 * mid - 1) < 0:
            lo = mid
        else:
            hi = mid
    return lo


@pytest.mark.parametrize("family,rho", [
    ("dcc", (3 - S5) / 2), ("wa", 0.5), ("dc", 0.3756774483), ("st", 0.4330619231),
    ("es", 0.5761487691),
])
def test_find_rho(family, rho):
    assert float(find_rho(family)) == pytest.approx(rho, abs=1e-10)


def test_find_rho_cc_against_cubic_bisection():
    assert float(find_rho("cc")) == pytest.approx(cc_root(), abs=1e-13)


@pytest.mark.parametrize("family", ALL)
def test_root_and_identities(family):
    sc = bender_width_constants(family)
    assert abs(kernel_h(family, np.longdouble(1), sc.rho)) < 1e-12
    assert 0 < sc.rho < 1 and 0 < sc.mu1 < 1 and sc.sigma1_sq > 0
    assert float(sc.mu1 * sc.mu2) == pytest.approx(1, abs=1e-12)
    assert float(sc.sigma2_sq) == pytest.approx(float(sc.sigma1_sq / sc.mu1 ** 3), rel=1e-12)


def test_dcc_bender_constants():
    sc = bender_width_constants("dcc")
    assert float(sc.mu1) == pytest.approx(S5 / 5, rel=1e-12)
    assert float(sc.sigma1_sq) == pytest.approx(2 * S5 / 25, rel=1e-12)
    assert float(sc.C1) == pytest.approx(0.5 - S5 / 10, rel=1e-12)
    assert float(sc.C2) == pytest.approx((S5 - 1) / 2, rel=1e-12)
    assert float(sc.sigma2_sq) == pytest.approx(2, rel=1e-12)


@pytest.mark.parametrize("family,vals", [
    ("dc", dict(mu1=0.7660601183, sigma1_sq=0.1686482431, sigma2_sq=0.3751399028, C2=0.3283408377)),
    ("st", dict(mu1=0.4208810078, sigma1_sq=0.2080626954, mu2=2.3759684098,
                sigma2_sq=2.7907198037, C2=0.3060622477)),
    ("es", dict(mu1=0.6149126319, sigma1_sq=0.2290348188, mu2=1.626247287, sigma2_sq=0.9850567845)),
])
def test_bender_constants_numeric(family, vals):
    sc = bender_width_constants(family)
    for k, v in vals.items():
        assert float(getattr(sc, k)) == pytest.approx(v, rel=1e-6), k


def test_c2_weights_dcc_and_cc():
    rho = (3 - S5) / 2
    for j in range(1, 12):
        assert float(c2_weight("dcc", j)) == pytest.approx(j * (S5 - 2) * rho ** (j - 1), rel=1e-12)
    r = float(find_rho("cc"))
    d = 11 - 35 * r + 41 * r * r
    a = (5 - 13 * r + 7 * r * r) / d
    b = (3 - 11 * r + 17 * r * r) / d
    for j in range(1, 12):
        assert float(c2_weight("cc", j)) == pytest.approx((a * j + b) * r ** j, rel=1e-10)
    # second cc relation: sum_j (k + j - 1) rho^j (a j + b) = a k + b
    js = np.arange(1, 200)
    for k in range(1, 31):
        lhs = ((k + js - 1) * r ** js * (a * js + b)).sum()
        assert lhs == pytest.approx(a * k + b, abs=1e-9)


def test_c2_sums():
    for f in ("dcc", "cc"):
        sc = bender_width_constants(f)
        assert float(sc.c2_weights.sum()) == pytest.approx(float(sc.C2), rel=1e-9)
    for f in ("dc", "st", "es"):
        # base series of these families starts from a single cell
        sc = bender_width_constants(f)
        assert float(sc.C2) == pytest.approx(float(sc.c2_weights[0]), rel=1e-15)
        assert float(sc.C2_total) == pytest.approx(float(sc.c2_weights.sum()), rel=1e-15)


def test_es_c2_one():
    # summing 16 H-terms without renormalizing (their total is 0.99979962)
    # would give 0.8600102250 instead
    assert float(c2_weight("es", 1)) == pytest.approx(0.8601825895, rel=1e-9)


@pytest.mark.parametrize("family", ALL)
def test_c2_weights_decay(family):
    w = np.asarray(bender_width_constants(family).c2_weights, dtype=float)
    assert np.all(w[10:40] < w[:30] * 0.99)


@pytest.mark.parametrize("family,factor", [("dcc", 1.2), ("dc", 1.1), ("wa", 1.5)] +
                         [(f, 1.1) for f in ALL])
def test_dominant_root(family, factor):
    assert verify_dominant_root(family, factor) == 1


def test_dominant_root_argument_checks():
    with pytest.raises(ValueError):
        verify_dominant_root("dcc", 0.9)
    with pytest.raises(ValueError):
        verify_dominant_root("dcc", 1.1, points=100)


def test_scan_root_reports_missing_sign_change():
    with pytest.raises(RootNotFoundError):
        _scan_root(lambda z: 1 + z)


@pytest.mark.parametrize("family,mu,var", [
    ("dcc", 1.736656315, 0.6082631120), ("st", 1.683524031, 0.7198047885),
    ("wa", 5 / 3, 173 / 189),
])
def test_gf_route_values(family, mu, var):
    m, v = gf_perimeter_constants(family)
    assert float(m) == pytest.approx(mu, rel=1e-6)
    assert float(v) == pytest.approx(var, rel=1e-6)


@pytest.mark.parametrize("family", ["dcc", "cc", "st", "wa"])
def test_gf_route_agrees_with_moments(family):
    m, v = gf_perimeter_constants(family)
    ps = joint_stats(family)
    assert abs(float(m - ps.mu4)) < 1e-5 and abs(float(v - ps.sigma4_sq)) < 1e-5


@pytest.mark.parametrize("family", ["dc", "es"])
def test_gf_route_unsupported(family):
    with pytest.raises(ValueError):
        gf_perimeter_constants(family)
