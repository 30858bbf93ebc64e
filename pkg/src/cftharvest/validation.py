"""Self-check suites: independent routes recomputed and compared on demand.

Three suites, each a list of checks with machine-readable outcomes:

* ``routes`` — quantities that have two or more genuinely independent
  implementations (closed form / special-function tables / direct quadrature,
  contour vs real-line finite parts, split amplitudes vs their sum).
* ``asymptotics`` — closed-form expansions against the exact elements at
  anchor points inside each expansion's regime, with the error bounds the
  expansions themselves predict.
* ``distributions`` — the finite-part and boundary-value machinery against
  closed forms and an epsilon-extrapolation oracle that shares no code with it.

Every check reports ``{check, point, expected, got, rel_err, pass}``; the
caller gets a single report dict whose ``passed`` field is the conjunction.
"""
from __future__ import annotations

import math
import time

import mpmath as mp

from . import asymptotics
from .distquad import (
    DEFAULT_QUAD,
    GaussPowerFunction,
    endpoint_regularized_quad,
    eps_extrapolation_oracle,
    gauss_window_quad,
    neville_zero,
    onesided_fp,
    pv_pairing,
    sokhotski_pairing,
)
from .correlator import extrapolate_limit_check
from .elements import (
    ProtocolParams,
    laa_closed,
    laa_numeric,
    laa_special,
    lab,
    m_element,
    m_pm,
)
from .measures import mutual_info
from .precision import DEFAULT_PRECISION, PrecisionConfig, workdps
from .scaling import ScaledComplex

SUITES = ("routes", "asymptotics", "distributions")


def _pt(**kw) -> ProtocolParams:
    base = {"delta_dim": 1.0, "t_omega": 10.0, "lbar": 10.0, "dbar": 0.0}
    base.update(kw)
    return ProtocolParams(**base)


def _json_value(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return float(v)


def _rel(diff: ScaledComplex, ref: ScaledComplex) -> float:
    if diff.is_zero:
        return 0.0
    return math.exp(diff.log_abs() - ref.log_abs())


def _check_sc(name: str, point: dict, expected: ScaledComplex,
              got: ScaledComplex, tol: float, ref: ScaledComplex | None = None
              ) -> dict:
    rel = _rel(got - expected, ref if ref is not None else expected)
    shift = (ref if ref is not None else expected).log_scale
    return {
        "check": name,
        "point": point,
        "expected": _json_value(expected.mantissa_at(shift)),
        "got": _json_value(got.mantissa_at(shift)),
        "rel_err": rel,
        "tol": tol,
        "pass": rel <= tol,
    }


def _check_mp(name: str, point: dict, expected, got, tol: float) -> dict:
    e = mp.mpc(expected)
    g = mp.mpc(got)
    scale = abs(e) if abs(e) > 0 else mp.mpf(1)
    rel = float(abs(g - e) / scale)
    return {
        "check": name,
        "point": point,
        "expected": _json_value(complex(e)),
        "got": _json_value(complex(g)),
        "rel_err": rel,
        "tol": tol,
        "pass": rel <= tol,
    }


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_routes(cfg: PrecisionConfig = DEFAULT_PRECISION) -> list[dict]:
    checks = []
    for two_d in range(1, 9):
        for w in (1.0, 3.0, 10.0):
            p = _pt(delta_dim=two_d / 2, t_omega=w)
            point = {"delta_dim": p.delta_dim, "t_omega": w}
            closed = laa_closed(p, cfg)
            checks.append(_check_sc("laa_special_vs_closed", point, closed,
                                    laa_special(p, cfg), 1e-8))
            checks.append(_check_sc("laa_numeric_vs_closed", point, closed,
                                    laa_numeric(p, cfg), 1e-8))
    for p in (_pt(), _pt(delta_dim=0.75, lbar=5.0, dbar=3.0),
              _pt(delta_dim=1.5, lbar=8.0, dbar=12.0)):
        point = {"delta_dim": p.delta_dim, "lbar": p.lbar, "dbar": p.dbar}
        checks.append(_check_sc("lab_contour_vs_phase_split", point,
                                lab(p, "contour", cfg),
                                lab(p, "phase-split", cfg), 1e-6))
    for p in (_pt(), _pt(delta_dim=1.25, dbar=17.0),
              _pt(delta_dim=0.6, dbar=10.3)):
        point = {"delta_dim": p.delta_dim, "lbar": p.lbar, "dbar": p.dbar}
        m = m_element(p, cfg)
        plus, minus = m_pm(p, cfg)
        checks.append(_check_sc("m_split_sum_vs_direct", point, m,
                                plus + minus, 1e-6))
    return checks


def suite_asymptotics(cfg: PrecisionConfig = DEFAULT_PRECISION) -> list[dict]:
    checks = []
    for dd in (0.5, 1.0, 2.0):
        p = _pt(delta_dim=dd)
        point = {"delta_dim": dd, "t_omega": p.t_omega}
        bound = 2 * 2 * dd * (dd + 0.5) / p.t_omega ** 2
        checks.append(_check_sc("laa_asym1_within_predicted_bound", point,
                                laa_closed(p, cfg),
                                asymptotics.laa_asym(p, 1, cfg=cfg)[0], bound))

    p = _pt()
    point = {"delta_dim": 1.0, "lbar": 10.0, "dbar": 0.0}
    checks.append(_check_sc("lab_asym2_vs_exact", point, lab(p, "auto", cfg),
                            asymptotics.lab_asym(p, 2, cfg=cfg)[0], 1e-2))
    m = m_element(p, cfg)
    checks.append(_check_sc("m_far2_vs_exact", point, m,
                            asymptotics.m_asym_far(p, 2, cfg=cfg)[0], 1e-2))

    p = _pt(delta_dim=0.6, dbar=10.3)
    point = {"delta_dim": 0.6, "lbar": 10.0, "dbar": 10.3}
    m = m_element(p, cfg)
    for order, tol in ((0, 0.3), (1, 0.05), (2, 0.005)):
        checks.append(_check_sc(f"m_near_lc{order}_vs_exact", point, m,
                                asymptotics.m_asym_near_lc(p, order, cfg=cfg)[0],
                                tol))

    for dd, tol in ((1.25, 1e-2), (0.6, 5e-3)):
        p = _pt(delta_dim=dd, dbar=17.0)
        point = {"delta_dim": dd, "lbar": 10.0, "dbar": 17.0}
        plus, minus = m_pm(p, cfg)
        aplus, aminus, _ = asymptotics.m_pm_asym(p, "TL", cfg=cfg)
        checks.append(_check_sc("m_plus_tl_vs_exact", point, plus, aplus, tol))
        checks.append(_check_sc("m_minus_tl_vs_exact", point, minus, aminus, tol))

    p = _pt()
    point = {"delta_dim": 1.0, "lbar": 10.0, "dbar": 0.0}
    plus, minus = m_pm(p, cfg)
    m = m_element(p, cfg)
    aplus, aminus, _ = asymptotics.m_pm_asym(p, "SL", cfg=cfg)
    checks.append(_check_sc("m_plus_sl_vs_exact", point, plus, aplus, 5e-2))
    # the minus part is exponentially below m; compare against the full scale
    checks.append(_check_sc("m_minus_sl_vs_exact", point, minus, aminus,
                            1e-6, ref=m))

    p = _pt(lbar=15.0)
    point = {"delta_dim": 1.0, "lbar": 15.0, "dbar": 0.0}
    mi = mutual_info(laa_closed(p, cfg), lab(p, "auto", cfg))
    law = asymptotics.mi_asym(p, "bigL", cfg=cfg)[0]
    checks.append(_check_sc("mi_quadratic_law_vs_exact", point, mi, law, 0.1))
    return checks


def suite_distributions(cfg: PrecisionConfig = DEFAULT_PRECISION) -> list[dict]:
    checks = []
    psi = GaussPowerFunction.gaussian(0, 1)
    with workdps(cfg):
        for mu in (0.5, 1.5, 2.5):
            w = mp.mpf("0.7")
            got = onesided_fp(psi, mu, w, DEFAULT_QUAD, cfg)
            a = (1 - mp.mpf(mu)) / 2
            expected = 2 ** (a - 1) * mp.gammainc(a, 0, w ** 2 / 2)
            checks.append(_check_mp("fp_vs_incomplete_gamma",
                                    {"mu": mu, "window": float(w)},
                                    expected, got, 1e-10))

        phi = GaussPowerFunction.gaussian(0.5, 0.7)
        base = endpoint_regularized_quad(phi, 2.0, 0.8, "interior",
                                         DEFAULT_QUAD, cfg, window=0.05)
        alt = endpoint_regularized_quad(phi, 2.0, 0.8, "interior",
                                        DEFAULT_QUAD, cfg, window=0.2)
        checks.append(_check_mp("endpoint_window_invariance",
                                {"lbar": 2.0, "mu": 0.8}, base, alt, 1e-9))

        phi = GaussPowerFunction.gaussian(0.3, 1.0)
        for m in (1, 2):
            jump = sokhotski_pairing(phi, 0.1, m, 1, DEFAULT_QUAD, cfg) \
                - sokhotski_pairing(phi, 0.1, m, -1, DEFAULT_QUAD, cfg)
            dterm = phi.taylor(mp.mpf("0.1"), m - 1)[m - 1]
            checks.append(_check_mp("boundary_value_jump",
                                    {"p": 0.1, "order": m},
                                    -2j * mp.pi * dterm, jump, 1e-9))

        pv = pv_pairing(phi, 0.1, DEFAULT_QUAD, cfg)
        lo, hi = phi.support(DEFAULT_QUAD.tail_sigmas)

        def regulated(eps):
            def f(x):
                d = x - mp.mpf("0.1")
                return phi.value(x) * d / (d * d + eps * eps)
            return gauss_window_quad(f, lo, hi, DEFAULT_QUAD, cfg)[0]

        oracle, _ = eps_extrapolation_oracle(regulated, cfg=cfg)
        checks.append(_check_mp("pv_vs_eps_extrapolation", {"p": 0.1},
                                pv, oracle, 1e-8))

        limit, err = neville_zero([mp.mpf(h) ** 2 for h in (0.1, 0.05, 0.025)],
                                  [3 + 5 * mp.mpf(h) ** 2 + 2 * mp.mpf(h) ** 4
                                   for h in (0.1, 0.05, 0.025)])
        checks.append(_check_mp("extrapolation_exact_polynomial", {},
                                3.0, limit, 1e-12))

    report = extrapolate_limit_check(1.0, 4, 0.3, 2.0, cfg=cfg)
    checks.append(_check_mp("bulk_to_boundary_limit",
                            {"delta_dim": 1.0, "d": 4}, 0.0,
                            report["deviation"], 1e-6))
    return checks


def run_validation(suite: str = "all",
                   cfg: PrecisionConfig = DEFAULT_PRECISION) -> dict:
    """Run one named suite (or all of them); returns the report dict."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    selected = SUITES if suite == "all" else (suite,)
    runners = {
        "routes": suite_routes,
        "asymptotics": suite_asymptotics,
        "distributions": suite_distributions,
    }
    t0 = time.monotonic()
    checks = []
    for name in selected:
        checks.extend(runners[name](cfg))
    return {
        "suite": suite,
        "checks": checks,
        "n_checks": len(checks),
        "n_failed": sum(not c["pass"] for c in checks),
        "passed": all(c["pass"] for c in checks),
        "runtime_s": round(time.monotonic() - t0, 2),
    }
