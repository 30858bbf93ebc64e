"""Closed-form asymptotics of the matrix elements and measures.

Each routine evaluates its expansion unconditionally and returns the value
together with ``RegimeFlags`` describing how well the operating point sits
inside the expansion's validity regime; callers decide what "much greater
than" should mean through the ``strictness`` knob (default: ratios of 10).
Off-regime evaluation is deliberate — overlay plots need the curve to
continue past its wall — but ``regime_ok`` goes False there.
"""
from __future__ import annotations

import dataclasses
import math

import mpmath as mp

from .elements import ProtocolParams
from .measures import mutual_info
from .precision import (
    DEFAULT_PRECISION,
    DomainError,
    PrecisionConfig,
    gamma,
    workdps,
)
from .scaling import ScaledComplex

DEFAULT_STRICTNESS = 10.0


@dataclasses.dataclass(frozen=True)
class RegimeFlags:
    """Validity report: each check is (name, achieved ratio >= strictness?)."""

    regime_ok: bool
    checks: tuple[tuple[str, float], ...]
    strictness: float


def _flags(strictness: float, **ratios: float) -> RegimeFlags:
    items = tuple(sorted(ratios.items()))
    ok = all(r >= strictness for _, r in items)
    return RegimeFlags(ok, items, strictness)


def _dtilde(params: ProtocolParams) -> float:
    return params.lbar ** 2 - params.dbar ** 2


def _exchange_quadratic(params: ProtocolParams):
    """Complex quadratic-form coefficient pair (D, C) of the exchange element."""
    w, db, lb = params.t_omega, params.dbar, params.lbar
    d = mp.mpc(lb * lb - db * db + w * w, -2 * w * db)
    c = 2 * mp.mpc(db, w)
    return d, c


def _suppressed(mantissa, params: ProtocolParams) -> ScaledComplex:
    return ScaledComplex.from_mp(mantissa, log_scale=-params.t_omega ** 2 / 2)


def _phase(params: ProtocolParams):
    return mp.exp(mp.mpc(0, 1) * mp.mpf(params.t_omega) * mp.mpf(params.dbar))


def laa_asym(params: ProtocolParams, order: int = 1,
             strictness: float = DEFAULT_STRICTNESS,
             cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Large-gap response pi W^{-2 Delta} e^{-W^2/2} [1 - 2 Delta(Delta+1/2)/W^2]."""
    if order not in (1, 2):
        raise DomainError("laa_asym supports order 1 or 2")
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        w = mp.mpf(params.t_omega)
        mant = mp.pi * w ** (-2 * dd)
        if order == 2:
            mant *= 1 - 2 * dd * (dd + mp.mpf(1) / 2) / (w * w)
        val = _suppressed(mant, params)
    return val, _flags(strictness, gap=params.t_omega)


def lab_asym(params: ProtocolParams, order: int = 1,
             strictness: float = DEFAULT_STRICTNESS,
             cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Exchange element from the saddle of its complex quadratic form.

    Leading term pi D^{-Delta} (times phase and suppression); second order
    multiplies by 1 + (Delta/D^2)(D + (Delta+1) C^2 / 2).
    """
    if order not in (1, 2):
        raise DomainError("lab_asym supports order 1 or 2")
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        d, c = _exchange_quadratic(params)
        mant = mp.pi * d ** (-dd) * _phase(params)
        if order == 2:
            mant *= 1 + (dd / (d * d)) * (d + (dd + 1) * c * c / 2)
        val = _suppressed(mant, params)
    return val, _flags(strictness, gap=params.t_omega,
                       quad_spread=float(abs(d) / abs(c)))


def m_asym_far(params: ProtocolParams, order: int = 1,
               strictness: float = DEFAULT_STRICTNESS,
               cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Pair amplitude far from the delay lightcone, either side of it.

    -pi Dt^{-Delta} with Dt = lbar^2 - dbar^2 continued below the cone as
    (Dt + i0)^{-Delta} = e^{-i pi Delta} |Dt|^{-Delta}; order 2 multiplies by
    1 + Delta/Dt + 2 Delta(Delta+1) dbar^2 / Dt^2 on both sides.
    """
    if order not in (1, 2):
        raise DomainError("m_asym_far supports order 1 or 2")
    dt = _dtilde(params)
    if dt == 0:
        raise DomainError("operating point sits exactly on the delay lightcone")
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        dtv = mp.mpf(dt)
        if dtv > 0:
            power = dtv ** (-dd)
        else:
            power = mp.exp(-mp.mpc(0, 1) * mp.pi * dd) * (-dtv) ** (-dd)
        mant = -mp.pi * power * _phase(params)
        if order == 2:
            mant *= 1 + dd / dtv + 2 * dd * (dd + 1) * mp.mpf(params.dbar) ** 2 / (dtv * dtv)
        val = _suppressed(mant, params)
    return val, _flags(strictness, cone_distance=abs(dt),
                       delay_balance=abs(dt) / max(2 * abs(params.dbar), 1e-30))


def m_asym_near_lc(params: ProtocolParams, order: int = 0,
                   strictness: float = DEFAULT_STRICTNESS,
                   cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Pair amplitude straddling the delay lightcone, in powers of 1/(2|dbar|).

    The endpoint pinch replaces the far-form power of Dt with
    (2|dbar|)^{-Delta} carrying the half-phase e^{-i pi Delta / 2}; the
    correction terms bring Dt back in linearly and quadratically.
    """
    if order not in (0, 1, 2):
        raise DomainError("m_asym_near_lc supports orders 0, 1, 2")
    if params.dbar == 0:
        raise DomainError("near-lightcone form needs a nonzero delay")
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        dt = mp.mpf(_dtilde(params))
        ctil = 2 * abs(mp.mpf(params.dbar))
        g_half = gamma((1 + dd) / 2, cfg)
        pref = -(mp.pi ** mp.mpf(1.5) / (2 ** (dd / 2) * g_half))
        pref *= mp.exp(-mp.mpc(0, 1) * mp.pi * dd / 2) * ctil ** (-dd) * _phase(params)
        bracket = mp.mpf(1)
        if order >= 1:
            ratio = g_half / gamma(1 + dd / 2, cfg)
            bracket += (mp.mpc(0, 1) * dd / (mp.sqrt(2) * ctil)) * ratio * (dt + dd)
        if order >= 2:
            bracket += (dd * (dd + 1) / (2 * ctil * ctil)) * (
                (1 - dd) - 2 * dt - dt * dt / (1 + dd)
            )
        val = _suppressed(pref * bracket, params)
    return val, _flags(strictness, delay_scale=float(ctil),
                       cone_proximity=float(ctil / max(abs(dt), 1e-30)))


def m_pm_asym(params: ProtocolParams, which: str,
              strictness: float = DEFAULT_STRICTNESS,
              cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Split amplitudes (m_plus, m_minus) in the spacelike or timelike regime.

    which="SL" (dbar inside the cone): m_plus carries the full far-form value
    and m_minus collapses to the exponentially small switching-tail pair;
    which="TL": the far power splits into |cos|/|sin| pi Delta pieces with a
    shared second-order bracket.
    """
    dt = _dtilde(params)
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        db = mp.mpf(params.dbar)
        lb = mp.mpf(params.lbar)
        ph = _phase(params)
        if which == "SL":
            if dt <= 0:
                raise DomainError("SL split asymptotics need |dbar| < lbar")
            dtv = mp.mpf(dt)
            br = 1 + dd / dtv + 2 * dd * (dd + 1) * db * db / (dtv * dtv)
            plus = _suppressed(-mp.pi * dtv ** (-dd) * br * ph, params)
            tails = mp.exp(-(lb - db) ** 2 / 2) * ((lb - db) / lb) ** (dd - 1)
            tails += mp.exp(-(lb + db) ** 2 / 2) * ((lb + db) / lb) ** (dd - 1)
            mant = mp.mpc(0, 1) * mp.pi ** mp.mpf(1.5) / (2 ** (dd + mp.mpf(1) / 2) * gamma(dd, cfg))
            minus = _suppressed(mant * ph * tails / lb, params)
            flags = _flags(strictness, cone_distance=abs(dt),
                           delay_balance=abs(dt) / max(2 * abs(params.dbar), 1e-30))
            return plus, minus, flags
        if which == "TL":
            if dt >= 0:
                raise DomainError("TL split asymptotics need |dbar| > lbar")
            ev = mp.mpf(-dt)  # dbar^2 - lbar^2 > 0
            br = 1 - dd / ev + 2 * dd * (dd + 1) * db * db / (ev * ev)
            plus = _suppressed(-mp.pi * mp.cospi(dd) * ev ** (-dd) * br * ph, params)
            minus = _suppressed(mp.mpc(0, 1) * mp.pi * mp.sinpi(dd) * ev ** (-dd) * br * ph, params)
            flags = _flags(strictness, cone_distance=abs(dt),
                           delay_balance=abs(dt) / max(2 * abs(params.dbar), 1e-30))
            return plus, minus, flags
    raise DomainError('which must be "SL" or "TL"')


def m_endpoint_asym(params: ProtocolParams,
                    strictness: float = DEFAULT_STRICTNESS,
                    cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Leading m_plus just beyond the cone, where the window endpoint dominates.

    -sqrt(pi/2) Gamma(1-Delta) (2 lbar)^{-Delta} (dbar-lbar)^{Delta-1} times
    phase and suppression; the Gamma pole makes it integer-dimension-free,
    and it beats the cos-weighted far form at half-integer dimensions where
    the latter dies.  Valid while dbar - lbar = O(1).
    """
    gap = params.dbar - params.lbar
    if gap <= 0:
        raise DomainError("endpoint asymptotics apply beyond the cone, dbar > lbar")
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        mant = -mp.sqrt(mp.pi / 2) * gamma(1 - dd, cfg) * (2 * mp.mpf(params.lbar)) ** (-dd)
        mant *= mp.mpf(gap) ** (dd - 1) * _phase(params)
        val = _suppressed(mant, params)
    window = min(gap, 1.0 / gap)
    return val, _flags(strictness, endpoint_window=window * strictness)


def negativity_asym(params: ProtocolParams, variant: str = "far_1",
                    strictness: float = DEFAULT_STRICTNESS,
                    cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Negativity per lambda_bar^2 from the matching element asymptotics."""
    if variant == "far_1":
        mags, flags = m_asym_far(params, 1, strictness, cfg)
        resp, _ = laa_asym(params, 1, strictness, cfg)
    elif variant == "far_2":
        mags, flags = m_asym_far(params, 2, strictness, cfg)
        resp, _ = laa_asym(params, 2, strictness, cfg)
    elif variant == "near_lc":
        mags, flags = _near_lc_magnitude(params, cfg)
        resp, _ = laa_asym(params, 2, strictness, cfg)
    else:
        raise DomainError('variant must be "far_1", "far_2" or "near_lc"')
    diff = mags.abs_value() - resp
    if diff.is_zero or diff.mantissa.real <= 0:
        return ScaledComplex(0j, 0.0), flags
    return diff, flags


def _near_lc_magnitude(params: ProtocolParams, cfg: PrecisionConfig):
    """|m| near the cone including the second-order magnitude bracket."""
    if params.dbar == 0:
        raise DomainError("near-lightcone form needs a nonzero delay")
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        dt = mp.mpf(_dtilde(params))
        ctil = 2 * abs(mp.mpf(params.dbar))
        g_half = gamma((1 + dd) / 2, cfg)
        ratio = g_half / gamma(1 + dd / 2, cfg)
        lead = mp.pi ** mp.mpf(1.5) / (2 ** (dd / 2) * g_half) * ctil ** (-dd)
        corr = -(dd / 2) * (dt * dt + 2 * (dd + 1) * dt + (dd * dd - 1))
        corr += (dd * ratio * (dt + dd)) ** 2 / 4
        mant = lead * (1 + corr / (ctil * ctil))
        val = _suppressed(mant, params)
    return val, _flags(DEFAULT_STRICTNESS, delay_scale=float(ctil),
                       cone_proximity=float(ctil / max(abs(dt), 1e-30)))


def npm_asym(params: ProtocolParams, which: str,
             strictness: float = DEFAULT_STRICTNESS,
             cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Split negativities (n_plus, n_minus) per lambda_bar^2, by regime."""
    plus, minus, flags = m_pm_asym(params, which, strictness, cfg)
    resp, _ = laa_asym(params, 2, strictness, cfg)

    def clip(v: ScaledComplex) -> ScaledComplex:
        diff = v.abs_value() - resp
        if diff.is_zero or diff.mantissa.real <= 0:
            return ScaledComplex(0j, 0.0)
        return diff

    return clip(plus), clip(minus), flags


_GAP_MASK = 0.05  # |cos pi Delta| or |sin pi Delta| below this -> curve gap


def boundary_curves(kind: str, params: ProtocolParams, delta_values) -> list:
    """Boundary of the entangled region, sampled over conformal dimensions.

    Returns one boundary coordinate per requested dimension: the largest
    separation ("N_vs_L") or delay ("N_vs_delta") still entangled, or the
    delay walls of the split negativities ("Nplus_TL"/"Nminus_TL").  The
    split-wall curves have genuine gaps where their cos/sin weight crosses
    zero; points inside the mask come back as nan so plots break the line
    instead of drawing a spike.
    """
    w = params.t_omega
    lb = params.lbar
    out = []
    for dd in delta_values:
        if kind == "N_vs_L":
            out.append(w + (dd + 1.0) / w)
        elif kind == "N_vs_delta":
            alpha = math.sqrt(lb * lb + w * w)
            out.append(alpha * (1.0 + (dd + 1.0) * (1.0 / (alpha * alpha) + 1.0 / (w * w))))
        elif kind in ("Nplus_TL", "Nminus_TL"):
            trig = abs(math.cos(math.pi * dd)) if kind == "Nplus_TL" else abs(math.sin(math.pi * dd))
            if trig < _GAP_MASK:
                out.append(float("nan"))
                continue
            c = trig ** (1.0 / dd)
            alpha = math.sqrt(lb * lb + c * w * w)
            out.append(alpha * (1.0 + ((dd + 0.5) * c - 0.5) / (alpha * alpha)
                               + (dd + 1.0) / (c * w * w)))
        else:
            raise DomainError(f"unknown boundary kind {kind!r}")
    return out


def delta_max(lbar: float, t_omega: float) -> float:
    """Dimension maximizing the far negativity window, for 1 < lbar < t_omega."""
    if not 1.0 < lbar < t_omega:
        raise DomainError("delta_max requires 1 < lbar < t_omega")
    return 0.5 * math.log(math.log(t_omega) / math.log(lbar)) / math.log(t_omega / lbar)


def omega_opt(lbar: float, delta_dim: float) -> float:
    """Gap (in 1/T units) that maximizes the harvested negativity at fixed lbar."""
    if lbar <= 0:
        raise DomainError("omega_opt requires lbar > 0")
    return lbar - delta_dim / lbar


def mi_asym(params: ProtocolParams, variant: str = "full",
            strictness: float = DEFAULT_STRICTNESS,
            cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Mutual information per lambda_bar^2 from the element asymptotics.

    "full" feeds the order-2 asymptotic elements through the exact bracket;
    "bigL" is the far-separation collapse |lab|^2 / laa.
    """
    resp, rflags = laa_asym(params, 2, strictness, cfg)
    exch, eflags = lab_asym(params, 2, strictness, cfg)
    flags = _flags(strictness, **dict(rflags.checks + eflags.checks))
    if variant == "full":
        return mutual_info(resp, exch), flags
    if variant == "bigL":
        resp1, _ = laa_asym(params, 1, strictness, cfg)
        exch1, _ = lab_asym(params, 1, strictness, cfg)
        mag = exch1.abs_value()
        inv = ScaledComplex(1.0 / resp1.mantissa, -resp1.log_scale)
        return (mag * mag * inv).normalized(), flags
    raise DomainError('variant must be "full" or "bigL"')
