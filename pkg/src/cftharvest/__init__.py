"""Detector-pair correlations from conformal two-point functions.

Two pointlike two-level detectors with Gaussian switching couple linearly to
a scalar conformal primary; this package computes their joint state to second
order in the coupling and everything derived from it — negativity, mutual
information, and the split of the pair amplitude into a communication part
and a vacuum-assisted part — with the e^{-(T Omega)^2/2} suppression carried
symbolically so results stay meaningful far below float underflow.
"""
from .correlator import (
    BulkPoint,
    KernelPoint,
    bulk_wightman,
    extrapolate_limit_check,
    feynman_kernel,
    wightman_kernel,
)
from .elements import (
    MatrixElements,
    ProtocolParams,
    TwoQubitState,
    laa_closed,
    laa_numeric,
    laa_special,
    lab,
    m_element,
    m_pm,
    rho_ab,
)
from .measures import (
    CorrelationReport,
    comm_ratio,
    mutual_info,
    n_pm,
    negativity_exact,
    negativity_pert,
)
from .precision import (
    ConvergenceError,
    DEFAULT_PRECISION,
    DomainError,
    NumericsError,
    PrecisionConfig,
)
from .scaling import ScaledComplex
from .sweeps import AxisSpec, SweepSpec, run_grid, run_sweep
from .figures import PRESET_IDS, run_figure
from .validation import run_validation

__all__ = [
    "AxisSpec",
    "BulkPoint",
    "ConvergenceError",
    "CorrelationReport",
    "DEFAULT_PRECISION",
    "DomainError",
    "KernelPoint",
    "MatrixElements",
    "NumericsError",
    "PRESET_IDS",
    "PrecisionConfig",
    "ProtocolParams",
    "ScaledComplex",
    "SweepSpec",
    "TwoQubitState",
    "bulk_wightman",
    "comm_ratio",
    "extrapolate_limit_check",
    "feynman_kernel",
    "laa_closed",
    "laa_numeric",
    "laa_special",
    "lab",
    "m_element",
    "m_pm",
    "mutual_info",
    "n_pm",
    "negativity_exact",
    "negativity_pert",
    "rho_ab",
    "run_figure",
    "run_grid",
    "run_sweep",
    "run_validation",
    "wightman_kernel",
]

__version__ = "0.1.0"
