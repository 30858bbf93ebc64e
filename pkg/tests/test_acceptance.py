"""End-to-end acceptance gates: the headline guarantees of the package.

Each test pins a tolerance the library promises and exercises it the way a
user would — full element sets, derived measures, asymptotic cross-checks,
and the self-validation battery.  Timed tests carry generous wall-clock
budgets so a slow box doesn't flap them.
"""
import dataclasses
import math
import time

import mpmath as mp
import pytest

from cftharvest.asymptotics import laa_asym, lab_asym, m_asym_far, mi_asym
from cftharvest.correlator import extrapolate_limit_check
from cftharvest.elements import (
    MatrixElements,
    ProtocolParams,
    TwoQubitState,
    laa_closed,
    laa_numeric,
    laa_special,
    lab,
    m_element,
    m_pm,
    pair_excess,
)
from cftharvest.measures import (
    CorrelationReport,
    mutual_info,
    n_pm,
    negativity_exact,
    negativity_pert,
)
from cftharvest.precision import DEFAULT_PRECISION
from cftharvest.scaling import ScaledComplex
from cftharvest.validation import run_validation


def _p(delta_dim, lbar=10.0, dbar=0.0, t_omega=10.0, lambda_bar=1e-3):
    return ProtocolParams(delta_dim=delta_dim, t_omega=t_omega, lbar=lbar,
                          dbar=dbar, lambda_bar=lambda_bar)


def _rel(got: ScaledComplex, ref: ScaledComplex) -> float:
    """|got - ref| / |ref| taken in log space, safe at e^{-50} scales."""
    diff = got.diff_mp(ref)
    if diff.is_zero:
        return 0.0
    return math.exp(diff.log_abs() - ref.log_abs())


def _log_abs(v: ScaledComplex) -> float:
    return -math.inf if v.is_zero else v.log_abs()


def test_local_response_routes_agree_to_eight_digits():
    # closed form vs special-function reduction vs direct double quadrature,
    # over half-integer-spaced dimensions and three window widths
    t0 = time.monotonic()
    worst = 0.0
    for two_delta in range(1, 9):
        for w in (1.0, 3.0, 10.0):
            params = _p(two_delta / 2.0, t_omega=w)
            closed = laa_closed(params)
            for alt in (laa_special(params), laa_numeric(params)):
                worst = max(worst, _rel(alt, closed))
    assert worst <= 1e-8
    assert time.monotonic() - t0 < 60.0


def test_unit_dimension_local_response_matches_erfc_form():
    # at delta_dim = 1 the closed form collapses to
    # pi e^{-W^2/2} - pi^{3/2} (W/sqrt2) erfc(W/sqrt2)
    for w in (1.0, 3.0, 10.0):
        got = laa_closed(_p(1.0, t_omega=w))
        with mp.workdps(60):
            x = mp.mpf(w) / mp.sqrt(2)
            ref = mp.pi * mp.exp(-x * x) - mp.pi ** mp.mpf("1.5") * x * mp.erfc(x)
            rel = abs(got.to_mp() - ref) / abs(ref)
        assert rel <= 1e-10


def test_first_order_wide_window_error_is_within_declared_bound():
    for delta in (0.5, 1.0, 2.0):
        params = _p(delta)
        approx, _ = laa_asym(params, 1)
        bound = 2.0 * (2.0 * delta) * (delta + 0.5) / params.t_omega ** 2
        assert _rel(approx, laa_closed(params)) <= bound


def test_windowed_split_reassembles_pair_amplitude_in_every_regime():
    t0 = time.monotonic()
    geometries = (
        (10.0, 0.0), (10.0, 4.0),     # spacelike
        (10.0, 9.7), (10.0, 10.3),    # straddling the cone
        (10.0, 14.0), (10.0, 17.0),   # timelike
    )
    worst = 0.0
    for delta in (0.5, 1.0, 1.5, 2.0, 2.5):
        for lbar, dbar in geometries:
            params = _p(delta, lbar=lbar, dbar=dbar)
            plus, minus = m_pm(params)
            worst = max(worst, _rel(plus + minus, m_element(params)))
    assert worst <= 1e-6
    assert time.monotonic() - t0 < 300.0


def test_pair_amplitude_and_negativity_peak_at_light_crossing_delay():
    params0 = _p(1.0)
    laa = laa_closed(params0)  # delay-independent: computed once
    best_m = best_n = -math.inf
    arg_m = arg_n = None
    for i in range(81):
        dbar = 0.25 * i
        m = m_element(dataclasses.replace(params0, dbar=dbar))
        if m.log_abs() > best_m:
            best_m, arg_m = m.log_abs(), dbar
        n = _log_abs(negativity_pert(laa, m))
        if n > best_n:
            best_n, arg_n = n, dbar
    assert 9.75 <= arg_m <= 10.25
    assert 9.75 <= arg_n <= 10.25


def test_negativity_dies_between_separations_ten_and_ten_point_four():
    laa = laa_closed(_p(1.0))
    inside = m_element(_p(1.0, lbar=10.0))
    outside = m_element(_p(1.0, lbar=10.4))
    assert pair_excess(laa, inside).mantissa.real > 0
    assert pair_excess(laa, outside).mantissa.real < 0
    assert not negativity_pert(laa, inside).is_zero
    assert negativity_pert(laa, outside).is_zero


def test_second_order_far_field_forms_reach_one_percent():
    params = _p(1.0)
    lab2, _ = lab_asym(params, 2)
    assert _rel(lab2, lab(params)) <= 0.01
    m2, _ = m_asym_far(params, 2)
    assert _rel(m2, m_element(params)) <= 0.01


def test_dense_negativity_residual_scales_as_coupling_squared():
    # beyond-leading-order content of the dense route: the residual against
    # the perturbative value must shrink 4x when the coupling halves
    params = _p(1.0, lbar=5.0)
    elems = MatrixElements.compute(params)
    with mp.workdps(DEFAULT_PRECISION.working_digits):
        npert = negativity_pert(elems.laa, elems.m)
        resids = []
        for lam in (1e-3, 5e-4):
            state = TwoQubitState(
                params=dataclasses.replace(params, lambda_bar=lam),
                laa=elems.laa, lab=elems.lab, m=elems.m,
            )
            nex = negativity_exact(state)
            per_lam2 = ScaledComplex(nex.mantissa / mp.mpf(lam) ** 2,
                                     nex.log_scale)
            resids.append(per_lam2.diff_mp(npert).abs_value())
    ratio = math.exp(resids[0].log_abs() - resids[1].log_abs())
    assert ratio == pytest.approx(4.0, rel=0.25)


def test_close_range_negativity_is_dominated_by_signalling():
    report = CorrelationReport.compute(_p(1.0, lbar=0.5))
    assert report.comm_fraction is not None
    assert report.comm_fraction >= 0.95


def test_far_spacelike_negativity_carries_no_signalling_part():
    report = CorrelationReport.compute(_p(1.0))
    assert report.n_minus.is_zero
    assert report.comm_fraction == 0.0


def test_timelike_split_components_swap_dominance_with_dimension():
    plus15, minus15 = m_pm(_p(1.5, dbar=17.0))
    plus20, minus20 = m_pm(_p(2.0, dbar=17.0))
    assert math.exp(_log_abs(minus20) - _log_abs(minus15)) <= 1e-3
    assert math.exp(_log_abs(plus15) - _log_abs(plus20)) <= 0.1


def test_bulk_kernel_reaches_boundary_form_under_depth_extrapolation():
    spacelike_points = ((0.0, 2.0), (0.3, 2.0), (0.5, 1.0), (1.0, 3.0),
                        (2.0, 5.0))
    for delta, d in ((1.0, 4), (2.0, 4), (2.0, 3)):
        for v, lbar in spacelike_points:
            out = extrapolate_limit_check(delta, d, v, lbar,
                                          h_values=(1e-2, 1e-3, 1e-4))
            assert out["deviation"] <= 1e-6


def test_mutual_information_follows_exchange_quadratic_law_far_out():
    params = _p(1.0, lbar=15.0)
    elems = MatrixElements.compute(params)
    mi = mutual_info(elems.laa, elems.lab)
    pred, _ = mi_asym(params, "full")
    assert _rel(pred, mi) <= 0.10


def test_self_validation_battery_passes_within_budget():
    t0 = time.monotonic()
    report = run_validation("all")
    assert report["passed"] is True
    assert report["n_failed"] == 0
    assert time.monotonic() - t0 < 900.0
