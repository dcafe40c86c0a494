import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polyostat._numeric import Jet, SeriesConvergenceError
from polyostat.qseries import (KernelModel, base_numerator, escalier_convergents, es_H, es_P, es_Q,
                               first_numerator, kernel_h, kernel_numerators, q_pochhammer,
                               st_theta_form, theta_phi)
from polyostat.spectral import find_rho

RHO_DCC = (3 - math.sqrt(5)) / 2


def test_q_pochhammer_examples():
    assert q_pochhammer(0.3, 0.5, 0) == 1
    assert q_pochhammer(0.5, 0.5, 2) == pytest.approx(0.375)


def test_q_pochhammer_against_naive_product():
    a = z = np.longdouble("0.9")
    ref = np.longdouble(1)
    for k in range(30):
        term = 1 - a * z ** k
        assert 0 < term < 1
        ref *= term
    assert q_pochhammer(a, z, 30) == pytest.approx(ref, rel=1e-15)


def test_kernel_examples():
    assert abs(kernel_h("dcc", 1.0, RHO_DCC)) < 1e-12
    assert kernel_h("dcc", 1.0, 0.0) == -1
    assert kernel_h("cc", 1.0, 0.25) == pytest.approx(-0.125)
    assert kernel_h("wa", 1.0, 0.5) == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 1.2), st.floats(0.05, 0.6))
def test_polynomial_kernels(w, z):
    assert kernel_h("dcc", w, z) == pytest.approx(-z * z + 2 * z + z * w - 1, abs=1e-12)
    assert kernel_h("cc", 1.0, z) == pytest.approx(4 * z ** 3 - 7 * z ** 2 + 5 * z - 1, abs=1e-12)


def test_dcc_numerator_at_rho():
    n1, _ = kernel_numerators("dcc", 1.0, RHO_DCC, 1)
    # general numerator xi (z - 1) with xi = z w; the i = 1 slice carries it
    assert first_numerator("dcc", 1.0, RHO_DCC, 1) == pytest.approx(n1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.6, 1.2), st.floats(0.05, 0.35))
def test_first_column_numerators_sum_to_general(w, z):
    # summing over the first column size recovers the any-first-column numerator
    dcc = sum(first_numerator("dcc", w, z, i) for i in range(1, 400))
    assert dcc == pytest.approx(z * w * (z - 1), rel=1e-12)
    cc = sum(first_numerator("cc", w, z, i) for i in range(1, 400))
    assert cc == pytest.approx(base_numerator("cc", w, z), rel=1e-12)
    wa = sum(first_numerator("wa", w, z, i) for i in range(1, 400))
    assert wa == pytest.approx(w * z, rel=1e-12)


def test_st_theta_form_has_same_root():
    rho = find_rho("st")
    z = np.longdouble(rho)
    assert abs(st_theta_form(np.longdouble(1), z)) < 1e-13
    # and it changes sign around rho just like the kernel
    d = np.longdouble("1e-6")
    assert np.sign(st_theta_form(np.longdouble(1), z - d)) != np.sign(st_theta_form(np.longdouble(1), z + d))


def test_escalier_convergents_examples():
    assert escalier_convergents(0, 1.0, 0.5) == (1, 1)
    # P_1 = P_0 - z x P_{-1} = 1, Q_1 = Q_0 - z x Q_{-1} = 1 - z x
    p1, q1 = escalier_convergents(1, 1.0, 0.5)
    assert (p1, q1) == (pytest.approx(1.0), pytest.approx(0.5))
    assert p1 / q1 == pytest.approx(1 / (1 - 0.5))


@pytest.mark.parametrize("x", [0.2, 0.3, 0.4])
@pytest.mark.parametrize("z", [0.3, 0.4, 0.5])
def test_escalier_convergents_approach_series_ratio(x, z):
    p, q = escalier_convergents(25, x, z)
    assert p / q == pytest.approx(es_P(x, z) / es_Q(x, z), abs=1e-10)


def test_es_weights_sum_to_one_at_rho():
    rho = find_rho("es")
    total = sum(es_H(n, np.longdouble(1), rho) for n in range(0, 80))
    assert total == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("family", ["dc", "st", "es"])
def test_truncation_is_stable(family):
    rho = find_rho(family)
    a = kernel_h(family, np.longdouble(1), rho, KernelModel(family, J_max=12))
    b = kernel_h(family, np.longdouble(1), rho, KernelModel(family, J_max=16))
    assert abs(a - b) < 1e-12


def test_non_convergence_is_reported():
    with pytest.raises(SeriesConvergenceError):
        kernel_h("st", np.longdouble(1), np.longdouble("0.97"), KernelModel("st", J_max=8))


def test_model_validation():
    with pytest.raises(ValueError):
        KernelModel("dc", J_max=4)
    with pytest.raises(ValueError):
        KernelModel("dc", L_max=10)
    assert KernelModel("cc").closed_form and not KernelModel("es").closed_form


@pytest.mark.parametrize("family", ["dcc", "cc", "dc", "st", "es", "wa"])
def test_jet_derivatives_match_finite_differences(family):
    dt = np.longdouble
    rho = dt(find_rho(family))
    w, z = Jet.seed(dt(1), rho)
    h = kernel_h(family, w, z)
    e = dt("1e-5")
    fw = (kernel_h(family, 1 + e, rho) - kernel_h(family, 1 - e, rho)) / (2 * e)
    fz = (kernel_h(family, dt(1), rho + e) - kernel_h(family, dt(1), rho - e)) / (2 * e)
    fww = (kernel_h(family, 1 + e, rho) - 2 * kernel_h(family, dt(1), rho)
           + kernel_h(family, 1 - e, rho)) / (e * e)
    assert h.w == pytest.approx(fw, rel=1e-6)
    assert h.z == pytest.approx(fz, rel=1e-6)
    if abs(h.ww) > 1e-6:
        assert h.ww == pytest.approx(fww, rel=1e-4)


@pytest.mark.parametrize("family", ["dcc", "cc", "dc", "st", "es", "wa"])
def test_theta_series_tail_and_normalization(family):
    rho = find_rho(family)
    tp = theta_phi(family, rho, 1)
    assert tp.phi.tail_ratio() <= 1e-12
    # the pole numerator has one sign throughout (it is a law up to scale)
    g = tp.phi.coefficients[1:]
    g = g * np.sign(g[0])
    assert np.all(g >= -1e-15 * g.max())
