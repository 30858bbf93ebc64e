import math

import mpmath as mp
import pytest
from hypothesis import assume, given, settings, strategies as st

from cftharvest.distquad import (
    DEFAULT_QUAD,
    DerivView,
    GaussPowerFunction,
    TestFunction,
    endpoint_regularized_quad,
    eps_extrapolation_oracle,
    fp_pairing,
    gauss_window_quad,
    neville_zero,
    onesided_fp,
    pv_pairing,
    sokhotski_pairing,
)
from cftharvest.precision import DEFAULT_PRECISION, DomainError


@pytest.fixture(autouse=True)
def _dps():
    with mp.workdps(60):
        yield


# -- test-function algebra --------------------------------------------------


def test_gausspower_taylor_matches_numerical():
    f = GaussPowerFunction.gaussian(0.3, 1.2, freq=0.7).times_power(2.0, 1, 0.6)
    exact = f.taylor(mp.mpf("0.5"), 6)
    numeric = mp.taylor(f.value, mp.mpf("0.5"), 6)
    for a, b in zip(exact, numeric):
        assert abs(a - b) < mp.mpf("1e-40") * max(1, abs(b))


def test_gausspower_compose_affine_reflects():
    f = GaussPowerFunction.gaussian(0.2, 0.9).times_power(3.0, 1, 1.1)
    g = f.compose_affine(mp.mpf("1.5"), -1)
    x = mp.mpf("0.4")
    assert abs(g.value(x) - f.value(mp.mpf("1.5") - x)) < mp.mpf("1e-55")


def test_gausspower_support_tracks_center_and_width():
    lo, hi = GaussPowerFunction.gaussian(2.0, 0.5).support(8.0)
    assert abs(lo - (2 - 4)) < 1e-12 and abs(hi - (2 + 4)) < 1e-12


def test_deriv_view_taylor_shift():
    f = GaussPowerFunction.gaussian(0.0, 1.0)
    d2 = DerivView(f, 2)
    # f'' of a unit Gaussian at 0 is -1
    assert abs(d2.value(0) + 1) < mp.mpf("1e-50")


def test_testfunction_wrapper_taylor_cap():
    tf = TestFunction(lambda x: mp.exp(-x * x), (-8, 8), max_order=4)
    with pytest.raises(DomainError):
        tf.taylor(0, 9)


# -- quadrature -------------------------------------------------------------


def test_gauss_window_quad_gaussian_closed_form():
    val, err = gauss_window_quad(lambda s: mp.exp(-s * s / 2), -8, 8)
    ref = mp.sqrt(2 * mp.pi) * mp.erf(8 / mp.sqrt(2))
    assert abs(val - ref) < mp.mpf("1e-12")
    assert err < mp.mpf("1e-10")


def test_gauss_window_quad_oscillatory():
    # moderate frequency: the suppression e^{-4.5} stays inside the abs_tol
    # budget; stronger suppression needs the contour route, by design
    val, _ = gauss_window_quad(lambda s: mp.exp(-s * s / 2 + 3j * s), -9, 9)
    ref = mp.sqrt(2 * mp.pi) * mp.exp(mp.mpf(-9) / 2)
    assert abs(val - ref) < mp.mpf("1e-12") * abs(ref)


# -- finite parts -----------------------------------------------------------


@given(st.floats(min_value=0.15, max_value=3.4))
@settings(max_examples=20, deadline=None)
def test_onesided_fp_matches_incomplete_gamma(mu):
    # the closed form has poles at odd integer mu; step around them.
    # generic mu leaves a fractional-power edge after the grading substitution,
    # so accuracy is set by the integrator budget (rel_tol 1e-10), not by dps
    assume(min(abs(mu - 1), abs(mu - 3)) > 0.05)
    w = mp.mpf("0.8")
    got = onesided_fp(GaussPowerFunction.gaussian(0, 1), mu, w)
    a = (1 - mp.mpf(mu)) / 2
    ref = 2 ** (a - 1) * mp.gammainc(a, 0, w ** 2 / 2)
    assert abs(got - ref) < mp.mpf("1e-8") * max(1, abs(ref))


def test_onesided_fp_half_integer_mu_is_spectrally_accurate():
    # half-integer mu makes the graded integrand analytic: full-precision case
    w = mp.mpf("0.7")
    for mu in (0.5, 1.5, 2.5):
        got = onesided_fp(GaussPowerFunction.gaussian(0, 1), mu, w)
        a = (1 - mp.mpf(mu)) / 2
        ref = 2 ** (a - 1) * mp.gammainc(a, 0, w ** 2 / 2)
        assert abs(got - ref) < mp.mpf("1e-25") * max(1, abs(ref))


def test_onesided_fp_log_branch_at_integer_mu():
    w = mp.mpf("0.8")
    got = onesided_fp(GaussPowerFunction.gaussian(0, 1), 1.0, w)
    reg = mp.quad(lambda s: (mp.exp(-s * s / 2) - 1) / s, [0, w])
    assert abs(got - (reg + mp.log(w))) < mp.mpf("1e-25")


def test_onesided_fp_rejects_bad_inputs():
    psi = GaussPowerFunction.gaussian(0, 1)
    with pytest.raises(DomainError):
        onesided_fp(psi, -0.5, 0.5)
    with pytest.raises(DomainError):
        onesided_fp(psi, 0.5, 0.0)


def test_endpoint_quad_window_choice_is_immaterial():
    phi = GaussPowerFunction.gaussian(0.5, 0.7)
    a = endpoint_regularized_quad(phi, 2.0, 0.8, "interior", window=0.05)
    b = endpoint_regularized_quad(phi, 2.0, 0.8, "interior", window=0.2)
    assert abs(a - b) < mp.mpf("1e-12") * abs(a)


def test_endpoint_quad_integrable_case_matches_direct_quadrature():
    # for mu < 1 the endpoint singularity is integrable, so the finite part
    # is an ordinary improper integral that tanh-sinh can confirm
    phi = GaussPowerFunction.gaussian(0.0, 1.0)
    mu = mp.mpf("0.45")
    interior = endpoint_regularized_quad(phi, 1.5, mu, "interior")
    ref = mp.quad(
        lambda v: mp.exp(-v * v / 2) * (mp.mpf("2.25") - v * v) ** (-mu),
        [-1.5, 0, 1.5],
    )
    assert abs(interior - ref) < mp.mpf("1e-12") * abs(ref)
    right = endpoint_regularized_quad(phi, 1.5, mu, "exterior-right")
    ref_r = mp.quad(
        lambda v: mp.exp(-v * v / 2) * (v * v - mp.mpf("2.25")) ** (-mu),
        [1.5, 3, 9],
    )
    assert abs(right - ref_r) < mp.mpf("1e-12") * abs(ref_r)


def test_endpoint_quad_region_name_checked():
    with pytest.raises(DomainError):
        endpoint_regularized_quad(GaussPowerFunction.gaussian(0, 1), 1.0, 0.5,
                                  "outside")


@given(st.floats(min_value=-1.0, max_value=1.0), st.integers(min_value=1, max_value=3))
@settings(max_examples=15, deadline=None)
def test_boundary_prescriptions_differ_by_delta_term(p, m):
    """<(x-p+i0)^{-m}> - <(x-p-i0)^{-m}> = -2 pi i phi^{(m-1)}(p)/(m-1)!"""
    phi = GaussPowerFunction.gaussian(0.3, 1.0)
    jump = sokhotski_pairing(phi, p, m, 1) - sokhotski_pairing(phi, p, m, -1)
    dterm = phi.taylor(mp.mpf(p), m - 1)[m - 1]
    assert abs(jump + 2j * mp.pi * dterm) < mp.mpf("1e-30")


def test_fp_pairing_order_one_is_pv():
    phi = GaussPowerFunction.gaussian(-0.2, 0.8)
    assert abs(fp_pairing(phi, 0.4, 1) - pv_pairing(phi, 0.4)) == 0


def test_pv_oracle_agreement():
    phi = GaussPowerFunction.gaussian(0.3, 1.0)
    lo, hi = phi.support(DEFAULT_QUAD.tail_sigmas)
    p = mp.mpf("0.1")

    def regulated(eps):
        def f(x):
            d = x - p
            return phi.value(x) * d / (d * d + eps * eps)
        return gauss_window_quad(f, lo, hi)[0]

    oracle, est = eps_extrapolation_oracle(regulated)
    direct = pv_pairing(phi, p)
    assert abs(oracle - direct) < mp.mpf("1e-12")
    assert est < mp.mpf("1e-8")


def test_neville_zero_exact_on_polynomial():
    xs = [mp.mpf(h) ** 2 for h in (0.2, 0.1, 0.05, 0.025)]
    ys = [7 - 3 * x + 2 * x * x for x in xs]
    limit, err = neville_zero(xs, ys)
    assert abs(limit - 7) < mp.mpf("1e-45")
    assert err < mp.mpf("1e-30")


def test_neville_zero_input_validation():
    with pytest.raises(DomainError):
        neville_zero([1.0], [2.0])
    with pytest.raises(DomainError):
        neville_zero([1.0, 0.5], [2.0])
