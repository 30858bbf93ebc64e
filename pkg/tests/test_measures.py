import math

import mpmath as mp
import pytest

from cftharvest.elements import MatrixElements, ProtocolParams, rho_ab
from cftharvest.measures import (
    CorrelationReport,
    comm_ratio,
    mutual_info,
    n_pm,
    negativity_exact,
    negativity_pert,
)
from cftharvest.precision import DomainError
from cftharvest.scaling import ScaledComplex


def _sc(x):
    return ScaledComplex.from_complex(x)


def test_negativity_pert_clips_at_zero():
    assert negativity_pert(_sc(2.0), _sc(1.0)).is_zero
    out = negativity_pert(_sc(1.0), _sc(3.0))
    assert out.mantissa_at(0.0).real == pytest.approx(2.0)


def test_negativity_pert_resolves_crossing_at_suppressed_scale():
    # |m| barely above laa, both at the e^{-60} scale
    laa = ScaledComplex(1.0, -60.0)
    m = ScaledComplex(1.0 + 1e-8, -60.0)
    out = negativity_pert(laa, m)
    assert not out.is_zero
    assert out.log_abs() == pytest.approx(-60.0 + math.log(1e-8), abs=1e-3)


def test_negativity_exact_bell_state_dense_route():
    # maximally entangled pure state: negativity 1/2 on the dense path
    bell = [[0.5, 0, 0, 0.5], [0, 0, 0, 0], [0, 0, 0, 0], [0.5, 0, 0, 0.5]]
    assert negativity_exact(bell).to_complex().real == pytest.approx(0.5)


def test_negativity_exact_separable_dense_route():
    sep = [[0.25, 0, 0, 0], [0, 0.25, 0, 0], [0, 0, 0.25, 0], [0, 0, 0, 0.25]]
    assert abs(negativity_exact(sep).to_complex()) < 1e-12


def test_negativity_exact_matches_pert_at_leading_order():
    state = rho_ab(ProtocolParams(1.0, 10.0, 5.0, 0.0))
    lam2 = state.params.lambda_bar ** 2
    exact = negativity_exact(state)
    pert = negativity_pert(state.laa, state.m)
    rel = math.exp(exact.log_abs() - pert.log_abs()) / lam2 - 1
    assert abs(rel) < 1e-12


def test_pt_spectrum_has_block_root_even_when_unentangled():
    # beyond the entanglement boundary only the exchange block goes negative
    state = rho_ab(ProtocolParams(1.0, 10.0, 15.0, 0.0))
    eigs = state.pt_negative_eigenvalues()
    assert len(eigs) == 1
    assert negativity_pert(state.laa, state.m).is_zero
    assert not negativity_exact(state).is_zero  # the O(lambda^4) root survives


def test_mutual_info_zero_iff_uncorrelated():
    assert mutual_info(_sc(1.0), ScaledComplex(0j, 0.0)).is_zero
    out = mutual_info(_sc(1.0), _sc(0.5))
    assert out.mantissa_at(0.0).real > 0


def test_mutual_info_series_matches_log_form_across_switchover():
    # the small-ratio series takes over below r = 1e-4; the two branches
    # must agree where they meet
    laa = _sc(1.0)
    vals = []
    for r in (9.9e-5, 1.01e-4):
        vals.append(mutual_info(laa, _sc(r)).mantissa_at(math.log(r * r)).real)
    # both are ~ r^2 * laa; compare the r^2-removed prefactors
    assert vals[0] == pytest.approx(vals[1], rel=1e-6)


def test_mutual_info_saturates_at_maximal_exchange():
    out = mutual_info(_sc(1.0), _sc(1.0))  # r = 1: degenerate one-excitation block
    assert out.mantissa_at(0.0).real == pytest.approx(2 * math.log(2))


def test_mutual_info_rejects_superunitary_exchange():
    with pytest.raises(DomainError):
        mutual_info(_sc(1.0), _sc(1.1))


def test_n_pm_split_clips_independently():
    laa = _sc(1.0)
    np_, nm = n_pm(_sc(3.0), _sc(0.5), laa)
    assert np_.mantissa_at(0.0).real == pytest.approx(2.0)
    assert nm.is_zero


def test_comm_ratio_conventions():
    assert comm_ratio(_sc(0.5), _sc(2.0)) == pytest.approx(0.25)
    assert comm_ratio(_sc(0.5), ScaledComplex(0j, 0.0)) is None


def test_report_assembles_all_measures():
    rep = CorrelationReport.compute(ProtocolParams(1.0, 10.0, 5.0, 0.0))
    assert not rep.negativity.is_zero
    assert not rep.mutual_information.is_zero
    assert rep.n_minus.is_zero  # spacelike: no communication part
    assert rep.comm_fraction == 0.0
