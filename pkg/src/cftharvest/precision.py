"""Arbitrary-precision special functions used by the correlator pipeline.

Everything here runs on mpmath under an explicit working precision.  The
detector integrals hide an e^{-T^2 Omega^2/2} scale inside O(1) hypergeometric
combinations, so the default working precision is far beyond float64; callers
convert to floats only at the edges (see ``scaling.ScaledComplex``).
"""
from __future__ import annotations

import dataclasses

import mpmath as mp


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ConvergenceError(ArithmeticError):
    """A series or iteration failed to reach the requested tolerance."""


class NumericsError(ArithmeticError):
    """A numerical route produced an unusable result (tolerance blown, etc.)."""


@dataclasses.dataclass(frozen=True)
class PrecisionConfig:
    """Working precision and target accuracy for the mpmath substrate."""

    working_digits: int = 60  # decimal digits carried by intermediate arithmetic
    target_rel_tol: float = 1e-12

    def __post_init__(self) -> None:
        if self.working_digits < 16:
            raise DomainError("working_digits must be >= 16")
        if not (0.0 < self.target_rel_tol < 1.0):
            raise DomainError("target_rel_tol must lie in (0, 1)")


DEFAULT_PRECISION = PrecisionConfig()


def workdps(cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Context manager setting mpmath's decimal precision from a config."""
    return mp.workdps(cfg.working_digits)


def _is_nonpositive_int(z) -> bool:
    return mp.im(z) == 0 and mp.re(z) <= 0 and mp.isint(mp.re(z))


def gamma(x, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Gamma function; explicit reflection on the left half-line.

    Nonpositive-integer arguments raise ``DomainError`` (poles) rather than
    returning an infinity that would silently poison a downstream product.
    """
    with workdps(cfg):
        z = mp.mpmathify(x)
        if _is_nonpositive_int(z):
            raise DomainError(f"gamma pole at {x}")
        if mp.re(z) < 0.5:
            # Gamma(z) Gamma(1-z) = pi / sin(pi z); 1-z has Re >= 0.5
            s = mp.sinpi(z)
            return +(mp.pi / (s * mp.gamma(1 - z)))
        return +mp.gamma(z)


def rgamma(x, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Reciprocal gamma, entire: returns 0 at the poles of gamma."""
    with workdps(cfg):
        z = mp.mpmathify(x)
        if _is_nonpositive_int(z):
            return mp.mpf(0)
        return +(1 / gamma(z, cfg))


def erfcx(x, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Scaled complementary error function e^{x^2} erfc(x) for x >= 0."""
    with workdps(cfg):
        xv = mp.mpf(x)
        if xv < 0:
            raise DomainError("erfcx requires x >= 0")
        return +(mp.exp(xv * xv) * mp.erfc(xv))


def _kummer_series(a, b, z, cfg: PrecisionConfig):
    """Plain 1F1 power series; caller guarantees a benign parameter regime."""
    tol = mp.mpf(10) ** (-cfg.working_digits)
    term = mp.mpmathify(1)
    total = term
    consecutive_small = 0
    max_terms = 10 * cfg.working_digits
    for k in range(max_terms):
        term = term * (a + k) * z / ((b + k) * (k + 1))
        total += term
        if abs(term) <= abs(total) * tol:
            consecutive_small += 1
            if consecutive_small >= 2:
                return total
        else:
            consecutive_small = 0
    raise ConvergenceError(
        "1F1 series needs more than 10*working_digits terms; "
        "raise working_digits (the term cap scales with it)"
    )


def hyp1f1(a, b, z, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Confluent hypergeometric 1F1(a; b; z).

    Negative-real-part arguments are always routed through the Kummer
    transformation M(a,b,z) = e^z M(b-a, b, -z) so the series that is actually
    summed has a non-alternating tail; the raw alternating series at large
    negative z loses ~|z|/ln 10 digits and is kept out of the production path.
    """
    with workdps(cfg):
        av = mp.mpmathify(a)
        bv = mp.mpmathify(b)
        zv = mp.mpmathify(z)
        if _is_nonpositive_int(bv):
            raise DomainError(f"1F1 undefined at nonpositive integer b={b}")
        if mp.re(zv) < 0:
            return +(mp.exp(zv) * _kummer_series(bv - av, bv, -zv, cfg))
        return +_kummer_series(av, bv, zv, cfg)


def hyp1f1_direct(a, b, z, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Un-transformed 1F1 series; cross-check route only (may cancel badly)."""
    with workdps(cfg):
        bv = mp.mpmathify(b)
        if _is_nonpositive_int(bv):
            raise DomainError(f"1F1 undefined at nonpositive integer b={b}")
        return +_kummer_series(mp.mpmathify(a), bv, mp.mpmathify(z), cfg)


def _asym_branch(coeff_num, coeff_den, x, max_terms, alternating):
    """Sum sum_s c0_s c1_s / (s! x^s) with optional sign alternation.

    Truncates at the smallest term (standard asymptotic-series practice) or at
    max_terms; returns (partial_sum, magnitude_of_first_omitted_term).
    """
    term = mp.mpmathify(1)
    total = term
    best_next = None
    for s in range(max_terms):
        nxt = term * (coeff_num + s) * (coeff_den + s) / ((s + 1) * x)
        if alternating:
            nxt = -nxt
        if abs(nxt) >= abs(term):
            best_next = nxt
            break
        term = nxt
        total += term
        best_next = term * (coeff_num + s + 1) * (coeff_den + s + 1) / ((s + 2) * x)
    return total, abs(best_next) if best_next is not None else mp.mpf(0)


def hyp1f1_asym(a, b, z, cfg: PrecisionConfig = DEFAULT_PRECISION, max_terms: int = 40):
    """Large negative-argument 1F1 via the two-branch expansion.

    Returns ``(value, bound)`` where ``bound`` is the magnitude of the first
    omitted term across both branches — the usual error proxy for asymptotic
    series.  Requires real parameters, real z < 0 with |z| >= 10*max(1,|a|,|b|).

    The two branches for z = -x, x > 0:

        Gamma(b)/Gamma(b-a) * x^{-a}    * sum_s (a)_s (a-b+1)_s / (s! x^s)
      + Gamma(b)/Gamma(a) * cos(pi(a-b)) * e^{-x} x^{a-b}
                                        * sum_s (b-a)_s (1-a)_s / (s! z^s)

    The second branch is exponentially small but is exactly the piece that
    survives in the detector-response combination, so it is never dropped.
    """
    with workdps(cfg):
        av = mp.mpf(a)
        bv = mp.mpf(b)
        zv = mp.mpf(z)
        if zv >= 0:
            raise DomainError("hyp1f1_asym expects z < 0")
        x = -zv
        if x < 10 * max(1, abs(av), abs(bv)):
            raise DomainError("hyp1f1_asym outside its validity region |z| >= 10*max(1,|a|,|b|)")
        gb = gamma(bv, cfg)

        power_sum, power_next = _asym_branch(av, av - bv + 1, x, max_terms, alternating=False)
        power = gb * rgamma(bv - av, cfg) * x ** (-av) * power_sum
        power_err = abs(gb * rgamma(bv - av, cfg) * x ** (-av)) * power_next

        exp_sum, exp_next = _asym_branch(bv - av, 1 - av, x, max_terms, alternating=True)
        exp_pref = gb * rgamma(av, cfg) * mp.cospi(av - bv) * mp.exp(-x) * x ** (av - bv)
        expo = exp_pref * exp_sum
        exp_err = abs(exp_pref) * exp_next

        return +(power + expo), +(power_err + exp_err)


def hyp2f1_series(a, b, c, z, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """Gauss 2F1(a,b;c;z) inside the unit disc.

    Handles the degenerate parameter patterns that occur in the near-boundary
    propagator: a terminating numerator (a or b a nonpositive integer) wins
    over a nonpositive-integer c as long as the series stops before the c-pole,
    and coincident parameters reduce via 2F1(a,b;b;z) = (1-z)^{-a}.
    """
    with workdps(cfg):
        av = mp.mpmathify(a)
        bv = mp.mpmathify(b)
        cv = mp.mpmathify(c)
        zv = mp.mpmathify(z)
        if abs(zv) >= 1:
            raise DomainError("hyp2f1_series requires |z| < 1")

        def terminating(n, other):
            # polynomial of degree n; valid while (c)_k != 0 for k <= n
            if _is_nonpositive_int(cv) and -mp.re(cv) < n:
                raise DomainError("2F1 c-pole inside terminating series range")
            term = mp.mpmathify(1)
            total = term
            for k in range(int(n)):
                term = term * (other + k) * (-n + k) * zv / ((cv + k) * (k + 1))
                total += term
            return total

        if _is_nonpositive_int(av) or _is_nonpositive_int(bv):
            if _is_nonpositive_int(bv) and (
                not _is_nonpositive_int(av) or mp.re(bv) > mp.re(av)
            ):
                return +terminating(-mp.re(bv), av)
            return +terminating(-mp.re(av), bv)
        if cv == bv:
            return +((1 - zv) ** (-av))
        if cv == av:
            return +((1 - zv) ** (-bv))
        if _is_nonpositive_int(cv):
            raise DomainError(f"2F1 undefined at nonpositive integer c={c}")

        tol = mp.mpf(10) ** (-cfg.working_digits)
        term = mp.mpmathify(1)
        total = term
        consecutive_small = 0
        for k in range(10 * cfg.working_digits):
            term = term * (av + k) * (bv + k) * zv / ((cv + k) * (k + 1))
            total += term
            if abs(term) <= abs(total) * tol:
                consecutive_small += 1
                if consecutive_small >= 2:
                    return +total
            else:
                consecutive_small = 0
        raise ConvergenceError("2F1 series too slow; |z| too close to 1 for this route")
