import mpmath as mp
import pytest

from cftharvest.precision import (
    ConvergenceError,
    DEFAULT_PRECISION,
    DomainError,
    PrecisionConfig,
    erfcx,
    gamma,
    hyp1f1,
    hyp1f1_asym,
    hyp1f1_direct,
    hyp2f1_series,
    rgamma,
    workdps,
)


@pytest.fixture(autouse=True)
def _high_dps():
    # references below must carry as many digits as the functions under test
    with mp.workdps(60):
        yield


def _close(a, b, tol="1e-40"):
    assert abs(mp.mpmathify(a) - mp.mpmathify(b)) <= mp.mpf(tol) * abs(mp.mpmathify(b))


def test_gamma_matches_mpmath_on_right_half():
    for x in (0.5, 1.0, 2.75, 10.0):
        _close(gamma(x), mp.gamma(x))


def test_gamma_reflection_left_half():
    # reflection path: compare against the functional equation directly
    for x in (-0.5, -2.3, -7.75):
        _close(gamma(x) * gamma(1 - x), mp.pi / mp.sinpi(x))


def test_gamma_pole_raises():
    for n in (0, -1, -5):
        with pytest.raises(DomainError):
            gamma(n)


def test_rgamma_zero_at_poles():
    assert rgamma(0) == 0
    assert rgamma(-3) == 0
    _close(rgamma(2.5), 1 / mp.gamma(2.5))


def test_erfcx_stable_at_large_argument():
    # e^{x^2} erfc(x) ~ 1/(x sqrt(pi)); the naive product overflows near 27
    for x in (1.0, 10.0, 50.0):
        _close(erfcx(x), mp.exp(mp.mpf(x) ** 2) * mp.erfc(x), tol="1e-38")


def test_hyp1f1_kummer_route_at_large_negative_z():
    """The transformed series must not lose digits where the raw one does."""
    a, b, z = 0.75, 1.5, -60.0
    _close(hyp1f1(a, b, z), mp.hyp1f1(a, b, z), tol="1e-35")


def test_hyp1f1_direct_agrees_in_benign_regime():
    a, b, z = 1.25, 2.0, 3.5
    _close(hyp1f1_direct(a, b, z), hyp1f1(a, b, z))


def test_hyp1f1_nonpositive_integer_b_raises():
    with pytest.raises(DomainError):
        hyp1f1(0.5, -2, 1.0)


def test_hyp1f1_asym_two_branches():
    """Both branches present: the exponentially small one decides sign changes."""
    a, b, z = 0.6, 1.2, -80.0
    val, bound = hyp1f1_asym(a, b, z)
    ref = mp.hyp1f1(a, b, z)
    assert abs(val - ref) <= 10 * bound + abs(ref) * mp.mpf("1e-20")


def test_hyp1f1_asym_guards_validity_region():
    with pytest.raises(DomainError):
        hyp1f1_asym(0.5, 1.0, -3.0)
    with pytest.raises(DomainError):
        hyp1f1_asym(0.5, 1.0, 5.0)


def test_hyp2f1_generic_series():
    _close(hyp2f1_series(0.3, 0.7, 1.9, 0.45), mp.hyp2f1(0.3, 0.7, 1.9, 0.45))


def test_hyp2f1_coincident_parameters_binomial():
    # references use mp.mpf(float) so both sides see the same binary inputs
    _close(hyp2f1_series(0.8, 1.3, 1.3, 0.6), (1 - mp.mpf(0.6)) ** (-mp.mpf(0.8)))


def test_hyp2f1_terminating_wins_over_c_pole():
    # numerator 0: the series is identically 1 even though c = -1 is a pole
    _close(hyp2f1_series(1.0, 0.0, -1.0, 0.3), 1.0)
    # degree-1 polynomial with c = -2: stops before the pole at k = 2
    _close(hyp2f1_series(-1.0, 0.5, -2.0, 0.3),
           1 + mp.mpf(0.5) * mp.mpf(0.3) / 2)


def test_hyp2f1_c_pole_inside_polynomial_range_raises():
    with pytest.raises(DomainError):
        hyp2f1_series(-3.0, 0.5, -2.0, 0.3)


def test_hyp2f1_outside_disc_raises():
    with pytest.raises(DomainError):
        hyp2f1_series(0.3, 0.7, 1.9, 1.2)


def test_precision_config_bounds():
    with pytest.raises(DomainError):
        PrecisionConfig(working_digits=8)
    with pytest.raises(DomainError):
        PrecisionConfig(target_rel_tol=2.0)


def test_workdps_sets_and_restores():
    before = mp.mp.dps
    with workdps(PrecisionConfig(working_digits=33)):
        assert mp.mp.dps == 33
    assert mp.mp.dps == before
