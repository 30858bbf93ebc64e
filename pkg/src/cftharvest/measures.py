"""Correlation measures of the two-detector state.

Everything downstream of the matrix elements happens at the e^{-W^2/2} scale,
so the measures work on ScaledComplex values with matched-exponent
subtractions; converting to bare floats first would turn every quantity at
the default operating point into 0.0 - 0.0.
"""
from __future__ import annotations

import dataclasses
import math

import mpmath as mp

from .elements import MatrixElements, ProtocolParams, TwoQubitState, pair_excess
from .precision import DEFAULT_PRECISION, DomainError, PrecisionConfig, workdps
from .scaling import ScaledComplex

_ZERO = ScaledComplex(0j, 0.0)


def negativity_pert(laa: ScaledComplex, m: ScaledComplex,
                    cfg: PrecisionConfig = DEFAULT_PRECISION) -> ScaledComplex:
    """Leading-order negativity per lambda_bar^2: max(0, |m| - laa).

    The subtraction happens with both values re-expressed against the larger
    exponent, so a crossing at the e^{-50} scale is resolved exactly where it
    occurs instead of underflowing to "always zero".
    """
    with workdps(cfg):
        diff = pair_excess(laa, m)
    if diff.is_zero or diff.mantissa.real <= 0:
        return _ZERO
    return diff


def _dense_negativity(rho) -> float:
    import numpy as np

    mat = np.asarray(rho, dtype=complex)
    if mat.shape != (4, 4):
        raise DomainError("dense negativity expects a 4x4 density matrix")
    pt = mat.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    eigs = np.linalg.eigvalsh(pt)
    return float((np.abs(eigs).sum() - 1.0) / 2.0)


def negativity_exact(state, cfg: PrecisionConfig = DEFAULT_PRECISION) -> ScaledComplex:
    """Negativity (trace-norm deficit of the partial transpose, halved).

    For a TwoQubitState the partial-transpose spectrum is known in closed
    form and is evaluated subtraction-free, which keeps the O(lambda^4)
    eigenvalue meaningful ~100 orders below float resolution.  Any other
    4x4 matrix-like input goes through a dense eigensolve — that route is
    for synthetic states (e.g. Bell pairs) at ordinary scales.
    """
    if isinstance(state, TwoQubitState):
        with workdps(cfg):
            eigs = state.pt_negative_eigenvalues(cfg)
            if not eigs:
                return _ZERO
            # Summed at the dominant eigenvalue's own log_scale, without
            # renormalizing: a normalization would round log_scale and
            # perturb the represented value by ~ulp(log_scale), wiping out
            # the O(lambda^4) block root this route exists to preserve.
            hi_ls = max(e.log_scale for e in eigs)
            acc = mp.mpf(0)
            for e in eigs:
                acc += -mp.mpmathify(e.mantissa) * mp.exp(mp.mpf(e.log_scale) - hi_ls)
            return ScaledComplex(acc, hi_ls)
    return ScaledComplex.from_complex(_dense_negativity(state))


def mutual_info(laa: ScaledComplex, lab: ScaledComplex) -> ScaledComplex:
    """Mutual information per lambda_bar^2 at leading order.

    laa * [(1+r) ln(1+r) + (1-r) ln(1-r)] with r = |lab|/laa.  Below
    r = 1e-4 the bracket is evaluated by its even series r^2 (1 + r^2/6 +
    r^4/15 + ...) — the direct form loses every significant digit there.
    r = 1 is the separable-to-maximally-correlated edge (bracket 2 ln 2);
    r > 1 means the input pair violates positivity and is refused.
    """
    if lab.is_zero:
        return _ZERO
    r = math.exp(lab.log_abs() - laa.log_abs())
    if r > 1.0 + 1e-12:
        raise DomainError(f"|lab|/laa = {r} > 1: response matrix not positive")
    if r >= 1.0:
        bracket = 2.0 * math.log(2.0)
    elif r < 1e-4:
        r2 = r * r
        bracket = r2 * (1.0 + r2 / 6.0 + r2 * r2 / 15.0 + r2 * r2 * r2 / 28.0)
    else:
        bracket = (1.0 + r) * math.log1p(r) + (1.0 - r) * math.log1p(-r)
    return laa * bracket


def n_pm(m_plus: ScaledComplex, m_minus: ScaledComplex,
         laa: ScaledComplex) -> tuple[ScaledComplex, ScaledComplex]:
    """Negativity contributions of the two pieces of the pair amplitude."""
    return negativity_pert(laa, m_plus), negativity_pert(laa, m_minus)


def comm_ratio(n_minus: ScaledComplex, n_total: ScaledComplex) -> float | None:
    """Fraction of the negativity attributable to the commutator piece.

    Returns None when the total vanishes: "no entanglement harvested" has no
    meaningful communication fraction, and pretending it is 0.0 would poison
    boundary plots.
    """
    if n_total.is_zero or n_total.mantissa.real <= 0:
        return None
    if n_minus.is_zero:
        return 0.0
    return math.exp(n_minus.log_abs() - n_total.log_abs())


@dataclasses.dataclass(frozen=True)
class CorrelationReport:
    """All derived measures at one operating point, per lambda_bar^2."""

    params: ProtocolParams
    elements: MatrixElements
    negativity: ScaledComplex
    mutual_information: ScaledComplex
    n_plus: ScaledComplex
    n_minus: ScaledComplex
    comm_fraction: float | None

    @classmethod
    def from_elements(cls, elements: MatrixElements) -> "CorrelationReport":
        neg = negativity_pert(elements.laa, elements.m)
        npl, nmi = n_pm(elements.m_plus, elements.m_minus, elements.laa)
        return cls(
            params=elements.params,
            elements=elements,
            negativity=neg,
            mutual_information=mutual_info(elements.laa, elements.lab),
            n_plus=npl,
            n_minus=nmi,
            comm_fraction=comm_ratio(nmi, neg),
        )

    @classmethod
    def compute(cls, params: ProtocolParams, **kwargs) -> "CorrelationReport":
        return cls.from_elements(MatrixElements.compute(params, **kwargs))
