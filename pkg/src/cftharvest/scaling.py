"""Exponent-carrying complex values.

The detector matrix elements are proportional to e^{-T^2 Omega^2 / 2}; at the
default operating point that is e^{-50} ~ 2e-22, and sweeps push it far below
float underflow.  We therefore keep every element as ``mantissa * e^{log_scale}``
with an O(1) complex mantissa and only combine scales additively.
"""
from __future__ import annotations

import cmath
import dataclasses
import math

import mpmath as mp

_LO = 1e-3  # normalized mantissa magnitude lives in [_LO, _HI)
_HI = 1e3


@dataclasses.dataclass(frozen=True)
class ScaledComplex:
    """A complex number represented as ``mantissa * exp(log_scale)``."""

    mantissa: complex
    log_scale: float = 0.0

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_complex(cls, value: complex) -> "ScaledComplex":
        return cls(complex(value), 0.0).normalized()

    @classmethod
    def from_mp(cls, value, log_scale=0.0) -> "ScaledComplex":
        """Normalize an mpmath scalar (times an optional extra e^{log_scale})."""
        v = mp.mpc(value)
        if v == 0:
            return cls(0j, 0.0)
        shift = mp.log(abs(v))
        mant = complex(v * mp.exp(-shift))
        return cls(mant, float(mp.mpf(log_scale) + shift))

    def normalized(self) -> "ScaledComplex":
        m = self.mantissa
        if m == 0:
            return ScaledComplex(0j, 0.0)
        a = abs(m)
        if _LO <= a < _HI:
            return self
        k = math.floor(math.log(a))
        return ScaledComplex(m * math.exp(-k), self.log_scale + k)

    # -- views -------------------------------------------------------------

    def to_complex(self) -> complex:
        """Collapse to a plain complex; underflows to 0 and may overflow."""
        if self.mantissa == 0:
            return 0j
        if self.log_scale < -720:
            return 0j
        return complex(self.mantissa * math.exp(self.log_scale))

    def to_mp(self):
        return mp.mpc(self.mantissa) * mp.exp(mp.mpf(self.log_scale))

    def abs_value(self) -> "ScaledComplex":
        return ScaledComplex(abs(self.mantissa), self.log_scale)

    def log_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return self.log_scale + math.log(abs(self.mantissa))

    def phase(self) -> float:
        return cmath.phase(complex(self.mantissa))

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.mantissa.conjugate(), self.log_scale)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "ScaledComplex":
        return ScaledComplex(-self.mantissa, self.log_scale)

    def __mul__(self, other):
        if isinstance(other, ScaledComplex):
            return ScaledComplex(
                self.mantissa * other.mantissa, self.log_scale + other.log_scale
            ).normalized()
        return ScaledComplex(self.mantissa * complex(other), self.log_scale).normalized()

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi, lo = (self, other) if self.log_scale >= other.log_scale else (other, self)
        gap = lo.log_scale - hi.log_scale
        tail = 0j if gap < -720 else lo.mantissa * math.exp(gap)
        return ScaledComplex(hi.mantissa + tail, hi.log_scale).normalized()

    def __sub__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return self + (-other)

    def diff_mp(self, other: "ScaledComplex") -> "ScaledComplex":
        """self - other with the mantissa arithmetic done under mpmath.

        Float mantissas promote exactly, so at elevated working precision the
        result is the exact difference of the stored representations rather
        than a double rounding of it.  The O(lambda^4) eigenvalue comparisons
        live ~30 decimal orders below the values being subtracted and need
        that headroom; the plain ``-`` operator cannot see them.
        """
        if self.is_zero:
            return -other
        if other.is_zero:
            return self
        hi_ls = max(self.log_scale, other.log_scale)
        a = mp.mpmathify(self.mantissa) * mp.exp(mp.mpf(self.log_scale) - hi_ls)
        b = mp.mpmathify(other.mantissa) * mp.exp(mp.mpf(other.log_scale) - hi_ls)
        d = a - b
        if d == 0:
            return ScaledComplex(0j, 0.0)
        shift = mp.floor(mp.log(abs(d)))
        return ScaledComplex(d * mp.exp(-shift), float(hi_ls + shift))

    def rescaled(self, target_log_scale: float) -> "ScaledComplex":
        """Same value re-expressed against a caller-chosen exponent."""
        gap = self.log_scale - target_log_scale
        return ScaledComplex(self.mantissa * math.exp(gap), target_log_scale)

    def mantissa_at(self, reference_log_scale: float) -> complex:
        """Mantissa after aligning to ``reference_log_scale`` (no overflow guard)."""
        return self.rescaled(reference_log_scale).mantissa
