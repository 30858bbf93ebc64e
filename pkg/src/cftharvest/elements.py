"""Final-state matrix elements of the two-detector density matrix.

Three independent quantities per lambda_bar^2 determine the state to leading
order: the single-detector excitation response (laa), the exchange term (lab),
and the pair-creation amplitude (m), with m split further into its
commutator-free and commutator-only parts (m_plus, m_minus) whose relative
size separates genuine vacuum harvesting from detector-to-detector signalling.

All element functions return ``ScaledComplex`` values per lambda_bar^2 with
the e^{-t_omega^2/2} suppression kept in the exponent slot; working precision
is boosted automatically on the routes where that suppression emerges from
cancellation of O(1) integrand values rather than from a prefactor.
"""
from __future__ import annotations

import dataclasses
import math

import mpmath as mp

from .distquad import (
    DEFAULT_QUAD,
    GaussPowerFunction,
    QuadConfig,
    endpoint_regularized_quad,
    gauss_window_quad,
    onesided_fp,
    sokhotski_pairing,
)
from .precision import (
    DEFAULT_PRECISION,
    DomainError,
    NumericsError,
    PrecisionConfig,
    erfcx,
    hyp1f1,
    rgamma,
    workdps,
)
from .scaling import ScaledComplex

_INT_SWITCH = 1e-9  # closer than this to an integer takes the delta-term route


@dataclasses.dataclass(frozen=True)
class ProtocolParams:
    """Operating point of the two-detector protocol, in units of T."""

    delta_dim: float  # conformal dimension of the coupled primary
    t_omega: float = 10.0  # detector gap in switching-width units
    lbar: float = 1.0  # detector separation
    dbar: float = 0.0  # switching delay of detector B
    lambda_bar: float = 1e-3  # dimensionless coupling

    def __post_init__(self) -> None:
        if not self.delta_dim > 0:
            raise DomainError("delta_dim must be > 0")
        if not self.t_omega > 0:
            raise DomainError("t_omega must be > 0")
        if not self.lbar >= 0:
            raise DomainError("lbar must be >= 0")
        if not self.lambda_bar > 0:
            raise DomainError("lambda_bar must be > 0")


def _near_int(x: float, tol: float = _INT_SWITCH):
    n = round(x)
    return abs(x - n) < tol, int(n)


def _boosted(cfg: PrecisionConfig, t_omega: float) -> PrecisionConfig:
    """Extra digits for routes that cancel down to the e^{-W^2/2} scale."""
    extra = int(0.22 * t_omega * t_omega) + 10
    return PrecisionConfig(cfg.working_digits + extra, cfg.target_rel_tol)


def _route_quad(dps: int, tail_sigmas: float, base: QuadConfig) -> QuadConfig:
    drop = max(dps - 18, 12)
    return QuadConfig(
        abs_tol=max(10.0 ** (-drop), 1e-290),
        rel_tol=max(10.0 ** (-(drop - 4)), 1e-286),
        tail_sigmas=tail_sigmas,
        max_subdivisions=base.max_subdivisions,
        endpoint_window=base.endpoint_window,
    )


# ---------------------------------------------------------------------------
# single-detector response
# ---------------------------------------------------------------------------


def laa_closed(params: ProtocolParams, cfg: PrecisionConfig = DEFAULT_PRECISION) -> ScaledComplex:
    """Excitation response per lambda_bar^2 in closed hypergeometric form.

    pi^{3/2} 2^{-Delta} [ 1F1(1/2-Delta; 1/2; -W^2/2) / Gamma(1/2+Delta)
                          - sqrt(2) W 1F1(1-Delta; 3/2; -W^2/2) / Gamma(Delta) ]

    with W = t_omega.  The two terms cancel down to the e^{-W^2/2} scale, so
    the arithmetic runs at boosted precision and the result is re-expressed
    against log_scale = -W^2/2.
    """
    dd = params.delta_dim
    w = params.t_omega
    bcfg = _boosted(cfg, w)
    with workdps(bcfg):
        dv = mp.mpf(dd)
        wv = mp.mpf(w)
        z = -wv * wv / 2
        t1 = hyp1f1(mp.mpf(1) / 2 - dv, mp.mpf(1) / 2, z, bcfg) * rgamma(mp.mpf(1) / 2 + dv, bcfg)
        t2 = mp.sqrt(2) * wv * hyp1f1(1 - dv, mp.mpf(3) / 2, z, bcfg) * rgamma(dv, bcfg)
        val = mp.pi ** mp.mpf(1.5) * 2 ** (-dv) * (t1 - t2)
        return ScaledComplex.from_mp(val)


_SQ2 = "sqrt2"


def _int_tables(x):
    """Polynomial coefficients of the low-integer-dimension responses."""
    a = {
        1: mp.mpf(1),
        2: (x + 1) / 3,
        3: x * x / 30 + 3 * x / 20 + mp.mpf(1) / 15,
        4: x ** 3 / 630 + x * x / 63 + 29 * x / 840 + mp.mpf(1) / 105,
    }
    b = {
        1: mp.mpf(1),
        2: x / 3 + mp.mpf(1) / 2,
        3: x * x / 30 + x / 6 + mp.mpf(1) / 8,
        4: x ** 3 / 630 + x * x / 60 + x / 24 + mp.mpf(1) / 48,
    }
    return a, b


def _half_int_tables(x):
    r2 = mp.sqrt(2)
    ah = {
        1: mp.mpf(0),
        2: 1 / r2,
        3: (2 * x + 5) / (12 * r2),
        4: (4 * x * x + 28 * x + 33) / (360 * r2),
    }
    bh = {
        1: 1 / r2,
        2: (2 * x + 1) / (2 * r2),
        3: (4 * x * x + 12 * x + 3) / (24 * r2),
        4: (8 * x ** 3 + 60 * x * x + 90 * x + 15) / (720 * r2),
    }
    return ah, bh


def laa_special(params: ProtocolParams, cfg: PrecisionConfig = DEFAULT_PRECISION) -> ScaledComplex:
    """Response at 2*Delta in {1..8} from the erfcx-stabilized reductions.

    At these dimensions the hypergeometric combination collapses to
    polynomial * e^{-W^2/2} plus polynomial * erfc(W/sqrt2); writing erfc
    through erfcx puts both pieces on the common e^{-W^2/2} scale with no
    catastrophic subtraction.  An independent check on laa_closed.
    """
    ok, twice = _near_int(2 * params.delta_dim)
    if not ok or not 1 <= twice <= 8:
        raise DomainError("laa_special covers 2*delta_dim in {1,...,8} only")
    with workdps(cfg):
        wv = mp.mpf(params.t_omega)
        x = wv * wv / 2
        y = wv / mp.sqrt(2)
        ex = erfcx(y, cfg)
        if twice % 2 == 0:  # integer dimension
            n = twice // 2
            a, b = _int_tables(x)
            mant = mp.pi * a[n] - mp.pi ** mp.mpf(1.5) * y * b[n] * ex
        else:  # half-integer dimension
            n = (twice + 1) // 2
            ah, bh = _half_int_tables(x)
            mant = -mp.pi * y * ah[n] + mp.pi ** mp.mpf(1.5) * bh[n] * ex
        return ScaledComplex.from_mp(mant, log_scale=float(-x))


def laa_numeric(params: ProtocolParams, cfg: PrecisionConfig = DEFAULT_PRECISION,
                qcfg: QuadConfig = DEFAULT_QUAD) -> ScaledComplex:
    """Response from direct distributional quadrature of the coincidence kernel.

    Pairs [-(v - i0)^2]^{-Delta} with the oscillatory Gaussian window
    e^{-v^2/2 - i W v}: the delta-then-finite-part route at integer 2*Delta,
    the phase-weighted one-sided finite parts otherwise.  The full e^{-W^2/2}
    suppression comes out of oscillatory cancellation here, which is exactly
    why this route exists: it shares nothing with laa_closed, so agreement is
    a real test.  Slow; cross-checks and small sweeps only.
    """
    dd = params.delta_dim
    w = params.t_omega
    bcfg = _boosted(cfg, w)
    sigmas = math.sqrt(w * w + 70.0) + 1.0
    rq = _route_quad(bcfg.working_digits, sigmas, qcfg)
    with workdps(bcfg):
        phi = GaussPowerFunction.gaussian(0, freq=w)
        is_int, m = _near_int(2 * dd)
        if is_int:
            j = (-mp.mpc(0, 1)) ** m * sokhotski_pairing(phi, 0, m, -1, rq, bcfg)
        else:
            mu = 2 * mp.mpf(dd)
            wwin = mp.mpf(rq.endpoint_window)
            f = onesided_fp(phi, mu, wwin, rq, bcfg)
            tail_fn = phi.times_power(0, 1, mu)
            tail, _ = gauss_window_quad(tail_fn.value, wwin, sigmas, rq, bcfg)
            f += tail
            j = 2 * mp.re(mp.exp(-mp.mpc(0, 1) * mp.pi * dd) * f)
        val = mp.sqrt(mp.pi / 2) * j
        if mp.im(mp.mpc(val)) and abs(mp.im(mp.mpc(val))) > 1e-6 * abs(mp.re(mp.mpc(val))):
            raise NumericsError("laa_numeric produced a non-negligible imaginary part")
        return ScaledComplex.from_mp(mp.re(mp.mpc(val)))


# ---------------------------------------------------------------------------
# exchange term
# ---------------------------------------------------------------------------


def _lab_strategy(params: ProtocolParams) -> str:
    w = params.t_omega
    db = params.dbar
    dmag = abs(mp.mpc(params.lbar ** 2 - db * db + w * w, -2 * w * db))
    cmag = 2 * abs(mp.mpc(db, w))
    return "contour" if dmag >= 4 * cmag else "phase-split"


def _lab_contour(params: ProtocolParams, cfg: PrecisionConfig,
                 qcfg: QuadConfig) -> ScaledComplex:
    with workdps(cfg):
        dd = mp.mpf(params.delta_dim)
        w = mp.mpf(params.t_omega)
        db = mp.mpf(params.dbar)
        lb = mp.mpf(params.lbar)
        r_plus = db + mp.mpc(0, 1) * w + lb
        r_minus = db + mp.mpc(0, 1) * w - lb
        f = GaussPowerFunction(
            phase=(0, 0, mp.mpf(-0.5)),
            powers=((r_plus, -1, dd), (-r_minus, 1, dd)),
        )
        dmag = abs(mp.mpc(lb * lb - db * db + w * w, -2 * w * db))
        stretch = 2 * float(dd) * max(0.0, math.log(max(float(dmag / (w * w)), 1e-30)))
        span = max(qcfg.tail_sigmas, math.sqrt(70.0 + stretch) + 1.0)
        j, _ = gauss_window_quad(f.value, -span, span, qcfg, cfg)
        mant = mp.sqrt(mp.pi / 2) * mp.exp(mp.mpc(0, 1) * w * db) * j
        return ScaledComplex.from_mp(mant, log_scale=float(-w * w / 2))


def _lab_phase_split(params: ProtocolParams, cfg: PrecisionConfig,
                     base_q: QuadConfig) -> ScaledComplex:
    dd = params.delta_dim
    w = params.t_omega
    lb = params.lbar
    db = params.dbar
    bcfg = _boosted(cfg, w)
    sigmas = math.sqrt(w * w + 70.0 + 2 * dd * abs(math.log(max(lb, 1e-6)))) + abs(db) + 2
    rq = _route_quad(bcfg.working_digits, sigmas, base_q)
    with workdps(bcfg):
        phi = GaussPowerFunction.gaussian(-mp.mpf(db), freq=mp.mpf(w))
        is_int, m = _near_int(dd)
        interior = endpoint_regularized_quad(phi, lb, dd, "interior", rq, bcfg)
        ext_r = endpoint_regularized_quad(phi, lb, dd, "exterior-right", rq, bcfg)
        ext_l = endpoint_regularized_quad(phi, lb, dd, "exterior-left", rq, bcfg)
        if is_int:
            j = interior + (-1) ** m * (ext_r + ext_l)
            lv = mp.mpf(lb)
            psi_hi = phi.compose_affine(lv, -1).times_power(2 * lv, -1, m)
            psi_lo = phi.compose_affine(-lv, 1).times_power(2 * lv, -1, m)
            dterm = psi_hi.taylor(mp.mpf(0), m - 1)[m - 1] - psi_lo.taylor(mp.mpf(0), m - 1)[m - 1]
            j -= mp.mpc(0, 1) * mp.pi * dterm
        else:
            ph = mp.exp(-mp.mpc(0, 1) * mp.pi * dd)
            j = interior + ph * ext_r + mp.conj(ph) * ext_l
        return ScaledComplex.from_mp(mp.sqrt(mp.pi / 2) * j)


def lab(params: ProtocolParams, route: str = "auto",
        cfg: PrecisionConfig = DEFAULT_PRECISION,
        qcfg: QuadConfig = DEFAULT_QUAD) -> ScaledComplex:
    """Exchange element per lambda_bar^2 (Wightman pairing across detectors).

    Routes: "contour" rewrites the integral along a shifted Gaussian contour
    where the kernel is analytic and the suppression sits in an explicit
    prefactor; "phase-split" works on the real line with phase-weighted finite
    parts and lightcone delta terms at integer dimension; "auto" picks by the
    spread of the quadratic form in the denominator; "both" runs the two and
    insists they agree to 1e-6 before returning the contour value.
    """
    if params.lbar <= 0:
        raise DomainError("lab requires lbar > 0")
    if route == "auto":
        route = _lab_strategy(params)
    if route == "contour":
        return _lab_contour(params, cfg, qcfg)
    if route == "phase-split":
        return _lab_phase_split(params, cfg, qcfg)
    if route == "both":
        a = _lab_contour(params, cfg, qcfg)
        b = _lab_phase_split(params, cfg, qcfg)
        gap = (a - b).log_abs() - a.log_abs()
        if gap > math.log(1e-6):
            raise NumericsError(
                f"lab routes disagree: rel spread exp({gap:.2f})"
            )
        return a
    raise DomainError(f"unknown lab route {route!r}")


# ---------------------------------------------------------------------------
# pair-creation amplitude and its split
# ---------------------------------------------------------------------------


def _feynman_prefactor(params: ProtocolParams):
    w = mp.mpf(params.t_omega)
    db = mp.mpf(params.dbar)
    return -mp.sqrt(mp.pi / 2) * mp.exp(mp.mpc(0, 1) * w * db)


def _m_sigmas(params: ProtocolParams) -> float:
    return 10.0 + abs(params.dbar) + 2.0


def m_element(params: ProtocolParams, cfg: PrecisionConfig = DEFAULT_PRECISION,
              qcfg: QuadConfig = DEFAULT_QUAD) -> ScaledComplex:
    """Pair-creation element per lambda_bar^2 (time-ordered pairing).

    The Gaussian window here carries no oscillation — the whole phase and the
    e^{-W^2/2} factor sit in the prefactor — so this runs at base precision.
    Timelike phases enter as e^{-i pi Delta} on both exterior regions; at
    integer dimension that collapses to a sign and the commutator content
    survives only through the lightcone delta terms.
    """
    if params.lbar <= 0:
        raise DomainError("m_element requires lbar > 0")
    dd = params.delta_dim
    lb = params.lbar
    rq = _route_quad(cfg.working_digits, _m_sigmas(params), qcfg)
    with workdps(cfg):
        phi = GaussPowerFunction.gaussian(-mp.mpf(params.dbar))
        interior = endpoint_regularized_quad(phi, lb, dd, "interior", rq, cfg)
        ext_r = endpoint_regularized_quad(phi, lb, dd, "exterior-right", rq, cfg)
        ext_l = endpoint_regularized_quad(phi, lb, dd, "exterior-left", rq, cfg)
        is_int, mint = _near_int(dd)
        if is_int:
            j = interior + (-1) ** mint * (ext_r + ext_l)
            lv = mp.mpf(lb)
            psi_hi = phi.compose_affine(lv, -1).times_power(2 * lv, -1, mint)
            psi_lo = phi.compose_affine(-lv, 1).times_power(2 * lv, -1, mint)
            dterm = psi_hi.taylor(mp.mpf(0), mint - 1)[mint - 1] + \
                psi_lo.taylor(mp.mpf(0), mint - 1)[mint - 1]
            j -= mp.mpc(0, 1) * mp.pi * dterm
        else:
            j = interior + mp.exp(-mp.mpc(0, 1) * mp.pi * dd) * (ext_r + ext_l)
        mant = _feynman_prefactor(params) * j
        return ScaledComplex.from_mp(mant, log_scale=float(-params.t_omega ** 2 / 2))


def m_pm(params: ProtocolParams, cfg: PrecisionConfig = DEFAULT_PRECISION,
         qcfg: QuadConfig = DEFAULT_QUAD) -> tuple[ScaledComplex, ScaledComplex]:
    """Split of the pair-creation element into (m_plus, m_minus).

    m_plus keeps the interior plus cos(pi Delta)-weighted exterior finite
    parts (the part blind to the field commutator); m_minus carries the
    -i sin(pi Delta)-weighted exterior plus, at integer dimension, the
    lightcone delta terms that are its continuous limit.  Evaluated on its own
    endpoint windows — deliberately not those of m_element — so the identity
    m_plus + m_minus = m is a nontrivial consistency check, not bookkeeping.
    """
    if params.lbar <= 0:
        raise DomainError("m_pm requires lbar > 0")
    dd = params.delta_dim
    lb = params.lbar
    rq0 = _route_quad(cfg.working_digits, _m_sigmas(params), qcfg)
    window = 0.6 * rq0.endpoint_window
    with workdps(cfg):
        phi = GaussPowerFunction.gaussian(-mp.mpf(params.dbar))
        interior = endpoint_regularized_quad(phi, lb, dd, "interior", rq0, cfg, window=window)
        ext = endpoint_regularized_quad(phi, lb, dd, "exterior-right", rq0, cfg, window=window)
        ext += endpoint_regularized_quad(phi, lb, dd, "exterior-left", rq0, cfg, window=window)
        pref = _feynman_prefactor(params)
        ls = float(-params.t_omega ** 2 / 2)
        is_int, mint = _near_int(dd)
        if is_int:
            plus = pref * (interior + (-1) ** mint * ext)
            lv = mp.mpf(lb)
            psi_hi = phi.compose_affine(lv, -1).times_power(2 * lv, -1, mint)
            psi_lo = phi.compose_affine(-lv, 1).times_power(2 * lv, -1, mint)
            dterm = psi_hi.taylor(mp.mpf(0), mint - 1)[mint - 1] + \
                psi_lo.taylor(mp.mpf(0), mint - 1)[mint - 1]
            minus = pref * (-mp.mpc(0, 1) * mp.pi * dterm)
        else:
            plus = pref * (interior + mp.cospi(dd) * ext)
            minus = pref * (-mp.mpc(0, 1) * mp.sinpi(dd) * ext)
        return (ScaledComplex.from_mp(plus, log_scale=ls),
                ScaledComplex.from_mp(minus, log_scale=ls))


# ---------------------------------------------------------------------------
# assembled state
# ---------------------------------------------------------------------------


def pair_excess(laa: ScaledComplex, m: ScaledComplex) -> ScaledComplex:
    """|m| - laa, the per-lambda_bar^2 entanglement margin.

    Evaluated through the exact-promotion subtraction so the perturbative
    negativity and the closed-form partial-transpose spectrum see the *same*
    number bit for bit; their difference then isolates the genuine
    O(lambda^4) block root instead of two independent rounding paths.
    """
    return m.abs_value().diff_mp(laa)


@dataclasses.dataclass(frozen=True)
class MatrixElements:
    """The per-lambda_bar^2 element set at one operating point."""

    params: ProtocolParams
    laa: ScaledComplex
    lab: ScaledComplex
    m: ScaledComplex
    m_plus: ScaledComplex
    m_minus: ScaledComplex

    def check(self, tol: float = 1e-6) -> None:
        """Internal-consistency gates every computed set must clear."""
        if self.lab.log_abs() > self.laa.log_abs() + 1e-10:
            raise NumericsError("|lab| exceeds laa: response matrix not positive")
        resid = (self.m_plus + self.m_minus - self.m).log_abs() - self.m.log_abs()
        if resid > math.log(tol):
            raise NumericsError(
                f"m_plus + m_minus fails to reproduce m (rel exp({resid:.2f}))"
            )

    @classmethod
    def compute(cls, params: ProtocolParams,
                cfg: PrecisionConfig = DEFAULT_PRECISION,
                qcfg: QuadConfig = DEFAULT_QUAD,
                check_tol: float = 1e-6) -> "MatrixElements":
        plus, minus = m_pm(params, cfg, qcfg)
        out = cls(
            params=params,
            laa=laa_closed(params, cfg),
            lab=lab(params, "auto", cfg, qcfg),
            m=m_element(params, cfg, qcfg),
            m_plus=plus,
            m_minus=minus,
        )
        out.check(check_tol)
        return out


@dataclasses.dataclass(frozen=True)
class TwoQubitState:
    """Joint detector state to O(lambda_bar^2), stored exponent-safely.

    Basis order (gg, ge, eg, ee).  The only nonzero entries are the
    excitation probabilities on the diagonal, the exchange coherence in the
    one-excitation block, and the pair coherence between gg and ee; all are
    kept as ScaledComplex so the state survives couplings where lambda^2 laa
    underflows a float.
    """

    params: ProtocolParams
    laa: ScaledComplex
    lab: ScaledComplex
    m: ScaledComplex

    def __post_init__(self) -> None:
        lam2 = 2.0 * math.log(self.params.lambda_bar)
        if self.laa.log_abs() + lam2 > math.log(0.5):
            raise DomainError(
                "2 lambda_bar^2 laa >= 1: outside the perturbative regime"
            )

    @property
    def excitation_prob(self) -> ScaledComplex:
        lam2 = self.params.lambda_bar ** 2
        return self.laa * lam2

    def dense(self):
        """Plain complex 4x4 (nested lists); underflows at physical couplings.

        Intended for synthetic scales in tests — trace and Hermiticity are
        exact by construction, and that is what this view lets tests confirm.
        """
        p = self.excitation_prob.to_complex()
        lam2 = self.params.lambda_bar ** 2
        ab = (self.lab * lam2).to_complex()
        mm = (self.m * lam2).to_complex()
        return [
            [1 - 2 * p, 0j, 0j, mm.conjugate()],
            [0j, p, ab.conjugate(), 0j],
            [0j, ab, p, 0j],
            [mm, 0j, 0j, 0j],
        ]

    def pt_negative_eigenvalues(self, cfg: PrecisionConfig = DEFAULT_PRECISION) -> list:
        """Negative eigenvalues of the partial transpose, in closed form.

        The partial transpose splits into two 2x2 blocks.  The one-excitation
        block has eigenvalues p -/+ lambda^2 |m|, i.e. -lambda^2 times the
        shared ``pair_excess``; the (gg, ee) block pairs 1 - 2p against 0
        through lambda^2 lab, and its negative root is written in the
        subtraction-free form -q^2/(s/2 + sqrt(s^2/4 + q^2)) so it stays
        meaningful at q ~ e^{-50}.  LAPACK on the dense matrix would return
        garbage at these scales, which is the point of this method; the
        block root additionally needs mpmath headroom because it sits
        O(lambda^2 lab^2 / laa) below the one-excitation eigenvalue.
        """
        with workdps(cfg):
            lam2 = mp.mpf(self.params.lambda_bar) ** 2
            out = []
            excess = pair_excess(self.laa, self.m)
            if excess.mantissa.real > 0:
                out.append(ScaledComplex(-excess.mantissa * lam2, excess.log_scale))
            p = lam2 * mp.mpmathify(self.laa.mantissa).real * mp.exp(mp.mpf(self.laa.log_scale))
            s = 1 - 2 * p
            if s > 0:
                q = lam2 * abs(mp.mpmathify(self.lab.mantissa)) * mp.exp(mp.mpf(self.lab.log_scale))
                root = (q * q) / (s / 2 + mp.sqrt(s * s / 4 + q * q))
                out.append(ScaledComplex.from_mp(-root))
            return out


def rho_ab(params: ProtocolParams, elements: MatrixElements | None = None,
           cfg: PrecisionConfig = DEFAULT_PRECISION,
           qcfg: QuadConfig = DEFAULT_QUAD) -> TwoQubitState:
    """Assemble the joint state at the physical coupling."""
    if elements is None:
        elements = MatrixElements.compute(params, cfg, qcfg)
    return TwoQubitState(params=params, laa=elements.laa,
                         lab=elements.lab, m=elements.m)
