import math

import numpy as np
import pytest

from polyostat._numeric import ChainStructureError
from polyostat.markov import (build_chain, chain_checks, last_column_law, stationary_law,
                              transition)
from polyostat.qseries import theta_phi

S5 = math.sqrt(5)
RHO = (3 - S5) / 2
ALL = ["dcc", "cc", "dc", "st", "es", "wa"]


def test_dcc_laws():
    assert float(last_column_law("dcc", 1)) == pytest.approx(RHO * (S5 + 1) / 2, rel=1e-12)
    c = build_chain("dcc")
    ks = np.arange(1, c.K_max + 1)
    assert float((ks * c.pi).sum()) == pytest.approx((S5 + 1) / 2, rel=1e-12)
    assert float(transition("dcc", 3, 2)) == pytest.approx(2 * RHO ** 2, rel=1e-12)
    assert float(transition("dcc", 7, 2)) == pytest.approx(2 * RHO ** 2, rel=1e-12)
    assert float(stationary_law("dcc", 2)) == pytest.approx(2 * RHO ** 2, rel=1e-12)
    mu2 = float((ks * c.pi2).sum())
    assert mu2 == pytest.approx(S5, rel=1e-12)
    assert float((ks * ks * c.pi2).sum()) - 5 == pytest.approx(2, rel=1e-10)


def test_wa_is_geometric():
    for j in range(1, 10):
        assert float(last_column_law("wa", j)) == pytest.approx(0.5 ** j, rel=1e-12)
        for k in (1, 4):
            assert float(transition("wa", k, j)) == pytest.approx(0.5 ** j, rel=1e-12)


def test_forbidden_transition():
    assert transition("es", 4, 2) == 0
    assert transition("dc", 2, 5) == 0


def test_beyond_truncation_and_bad_sizes():
    assert stationary_law("cc", 500) == 0
    with pytest.raises(ValueError):
        transition("cc", 0, 1)
    with pytest.raises(ValueError):
        build_chain("cc", K_max=5)


@pytest.mark.parametrize("family", ALL)
def test_chain_invariants(family):
    c = build_chain(family)
    assert float(c.pi.sum()) == pytest.approx(1, abs=1e-9)
    assert float(c.pi2.sum()) == pytest.approx(1, abs=1e-9)
    assert np.all(c.pi2 >= 0) and np.all(c.Pi >= 0)
    assert np.all(c.Pi[c.U == 0] == 0)
    r = chain_checks(family, c)
    assert r.row_sum_residual < 1e-9
    assert r.stationarity_residual < 1e-8
    assert r.mixing_tv < 1e-3
    assert r.kernel_weight_residual < 1e-8
    if family in ("dcc", "cc", "st", "wa"):
        assert r.reversibility_residual < 1e-10


def test_chain_checks_rejects_foreign_model():
    with pytest.raises(ChainStructureError):
        chain_checks("cc", build_chain("dcc"))


@pytest.mark.parametrize("family", ALL)
def test_weight_identities(family):
    c = build_chain(family)
    sc = c.spectral
    ks = np.arange(1, c.K_max + 1)
    # sizes whose weights were clipped as noise carry no mass in either law
    live = ((c.pi > 1e-12 * c.pi.max()) & (c.pi2 > 0))[:30]
    ratio = (c.pi2 * c.P_norm / np.where(c.pi > 0, c.pi, 1))[:30]
    target = (sc.c2_weights / sc.rho ** ks)[:30]
    err = np.abs(ratio - target)[live]
    assert np.all(err < 1e-8 * target[live] + 1e-14)
    lhs = (c.pi / sc.rho ** ks)[:30]
    rhs = (c.pi @ c.U)[:30]
    assert np.max(np.abs(lhs - rhs)[live] / rhs[live]) < 1e-8


@pytest.mark.parametrize("family", ALL)
def test_last_column_law_independent_of_first_column(family):
    c = build_chain(family)
    rho = c.spectral.rho
    base = None
    for i in (1, 2, 3):
        g = theta_phi(family, rho, i, order=c.K_max).phi.coefficients[1:c.K_max + 1]
        g = g / g.sum()
        if base is None:
            base = g
        assert np.max(np.abs(g - base)) < 1e-9
    assert np.max(np.abs(base - c.pi)) < 1e-9
