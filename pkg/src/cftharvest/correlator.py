"""Boundary and bulk two-point kernels for a scalar primary of dimension Delta.

Conventions: detector separation time v = t - t' and spatial separation lbar
are in units of the switching width T; the boundary kernel is normalized to
unit coefficient, [lbar^2 - (v - i eps)^2]^{-Delta}, so physical free-field
values are recovered by multiplying with ``free_field_norm``.
"""
from __future__ import annotations

import dataclasses
import warnings

import mpmath as mp

from .precision import (
    DEFAULT_PRECISION,
    DomainError,
    PrecisionConfig,
    gamma,
    hyp2f1_series,
    rgamma,
    workdps,
)


class UnitarityWarning(RuntimeWarning):
    """Dimension below the scalar unitarity bound for the requested d."""


@dataclasses.dataclass(frozen=True)
class KernelPoint:
    """Evaluation point of the detector-frame kernel."""

    v: float  # time separation, units of T
    lbar: float  # spatial separation, units of T
    delta_dim: float  # conformal dimension of the primary

    def __post_init__(self) -> None:
        if not self.lbar >= 0:
            raise DomainError("lbar must be >= 0")
        if not self.delta_dim > 0:
            raise DomainError("delta_dim must be > 0")


@dataclasses.dataclass(frozen=True)
class BulkPoint:
    """Bulk evaluation through the conformally invariant ratio xi."""

    xi: float

    def __post_init__(self) -> None:
        if not 0.0 < self.xi < 1.0:
            raise DomainError("xi must lie in (0, 1)")


def _on_lightcone(point: KernelPoint) -> bool:
    return abs(abs(point.v) - point.lbar) == 0


def wightman_kernel(point: KernelPoint, eps: float = 0.0,
                    cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Wightman kernel [lbar^2 - (v - i eps)^2]^{-Delta}.

    eps == 0 returns the distributional boundary value away from the
    lightcone: real (lbar^2 - v^2)^{-Delta} at spacelike separation, and
    e^{-i pi Delta} (v^2 - lbar^2)^{-Delta} for v > lbar (the conjugate phase
    for v < -lbar).  Exactly on the cone the limit does not exist pointwise.
    """
    with workdps(cfg):
        d = mp.mpf(point.delta_dim)
        v = mp.mpf(point.v)
        l2 = mp.mpf(point.lbar) ** 2
        if eps:
            base = l2 - (v - mp.mpc(0, eps)) ** 2
            return +(base ** (-d))
        if _on_lightcone(point):
            raise DomainError(
                "kernel limit is singular on the lightcone; pass eps > 0 or use a "
                "distributional pairing"
            )
        gap = v * v - l2
        if gap < 0:
            return +((-gap) ** (-d))
        mag = gap ** (-d)
        phase = mp.exp(-mp.mpc(0, 1) * mp.pi * d) if v > 0 else mp.exp(mp.mpc(0, 1) * mp.pi * d)
        return +(mag * phase)


def feynman_kernel(point: KernelPoint, eps: float = 0.0,
                   cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Time-ordered kernel [lbar^2 - v^2 + i eps |v|]^{-Delta}.

    The limit carries the same phase e^{-i pi Delta} on *both* timelike sides,
    which is what distinguishes the time-ordered from the Wightman pairing.
    """
    with workdps(cfg):
        d = mp.mpf(point.delta_dim)
        v = mp.mpf(point.v)
        l2 = mp.mpf(point.lbar) ** 2
        if eps:
            base = l2 - v * v + mp.mpc(0, eps) * abs(v)
            return +(base ** (-d))
        if _on_lightcone(point):
            raise DomainError(
                "kernel limit is singular on the lightcone; pass eps > 0 or use a "
                "distributional pairing"
            )
        gap = v * v - l2
        if gap < 0:
            return +((-gap) ** (-d))
        return +(gap ** (-d) * mp.exp(-mp.mpc(0, 1) * mp.pi * d))


def kernel_sym(point: KernelPoint, eps: float = 0.0,
               cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Symmetric (anticommutator) part: Re of the Wightman kernel."""
    return +mp.re(wightman_kernel(point, eps, cfg))


def kernel_asym(point: KernelPoint, eps: float = 0.0,
                cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Antisymmetric (commutator) part, i Im W; vanishes at spacelike points."""
    return mp.mpc(0, 1) * mp.im(wightman_kernel(point, eps, cfg))


def free_field_norm(d: int, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Coefficient Gamma((d-2)/2) / (4 pi^{d/2}) restoring free-field units."""
    if d < 3:
        raise DomainError("free_field_norm needs d >= 3")
    with workdps(cfg):
        return +(gamma(mp.mpf(d - 2) / 2, cfg) / (4 * mp.pi ** (mp.mpf(d) / 2)))


def bulk_normalization(delta_dim: float, d: int,
                       cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Bulk two-point coefficient; vanishes where 1/Gamma(2 Delta - d + 1) does."""
    with workdps(cfg):
        dd = mp.mpf(delta_dim)
        num = 2 ** dd * gamma(dd, cfg) * gamma(dd - mp.mpf(d - 1) / 2, cfg)
        return +(num * rgamma(2 * dd - d + 1, cfg) / (4 * mp.pi) ** (mp.mpf(d + 1) / 2))


def _unitarity_check(delta_dim: float, d: int) -> None:
    if delta_dim < (d - 2) / 2:
        warnings.warn(
            f"delta_dim={delta_dim} is below the scalar unitarity bound (d-2)/2 for d={d}",
            UnitarityWarning,
            stacklevel=3,
        )


def bulk_wightman(point: BulkPoint, delta_dim: float, d: int,
                  include_norm: bool = True,
                  cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Bulk scalar two-point function as a function of the invariant ratio.

    Returns N * xi^Delta * 2F1(Delta, Delta - d/2 + 1; 2 Delta - d + 1; xi^2)
    with N the physical normalization when ``include_norm`` is set.  At
    parameter points where N vanishes identically the physical value is
    degenerate and we refuse rather than return 0; the normalization-free form
    (``include_norm=False``) remains well defined and is what boundary-limit
    ratios should use, since the constant cancels between bulk and boundary.
    """
    _unitarity_check(delta_dim, d)
    with workdps(cfg):
        dd = mp.mpf(delta_dim)
        xi = mp.mpf(point.xi)
        shape = xi ** dd * hyp2f1_series(dd, dd - mp.mpf(d) / 2 + 1,
                                         2 * dd - d + 1, xi * xi, cfg)
        if not include_norm:
            return +shape
        norm = bulk_normalization(delta_dim, d, cfg)
        if norm == 0:
            raise DomainError(
                "bulk normalization vanishes at this (delta_dim, d); use "
                "include_norm=False for ratio checks"
            )
        return +(norm * shape)


def extrapolate_limit_check(delta_dim: float, d: int, v: float, lbar: float,
                            h_values=(1e-2, 1e-3, 1e-4),
                            cfg: PrecisionConfig = DEFAULT_PRECISION) -> dict:
    """Near-boundary limit of the bulk kernel against the boundary kernel.

    Both bulk operators are pushed to depth z = z' = h at a spacelike
    separation; the dictionary prescription 2^{-Delta} (z z')^{-Delta} applied
    to the normalization-free bulk kernel must reproduce the boundary kernel
    as h -> 0.  Returns the per-h ratios and the Richardson extrapolation of
    ratio(h) - 1 in powers of h^2; ``deviation`` is |extrapolated - 1|.
    """
    if abs(v) >= lbar:
        raise DomainError("boundary-limit check wants a spacelike point, |v| < lbar")
    if len(h_values) < 2:
        raise DomainError("need at least two depths to extrapolate")
    _unitarity_check(delta_dim, d)
    with workdps(cfg):
        dd = mp.mpf(delta_dim)
        gap = mp.mpf(lbar) ** 2 - mp.mpf(v) ** 2
        boundary = gap ** (-dd)
        ratios = []
        for h in h_values:
            h2 = 2 * mp.mpf(h) ** 2
            xi = h2 / (h2 + gap)
            bulk = bulk_wightman(BulkPoint(float(xi)), delta_dim, d,
                                 include_norm=False, cfg=cfg)
            candidate = 2 ** (-dd) * mp.mpf(h) ** (-2 * dd) * bulk
            ratios.append(candidate / boundary)
        # Neville tableau in the variable h^2
        xs = [mp.mpf(h) ** 2 for h in h_values]
        tab = list(ratios)
        n = len(tab)
        for level in range(1, n):
            for i in range(n - level):
                tab[i] = (tab[i + 1] * xs[i] - tab[i] * xs[i + level]) / (xs[i] - xs[i + level])
        extrapolated = tab[0]
        return {
            "ratios": [float(r) for r in ratios],
            "extrapolated": float(extrapolated),
            "deviation": float(abs(extrapolated - 1)),
        }
