"""Scalar special functions: gamma family, generalized binomials, real-index
Laguerre polynomials and the hypergeometric series used by the integrals.

All functions are pure; arguments are plain floats unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class SeriesControl:
    """Stopping rule for power series: relative tolerance and a term budget."""

    rel_tol: float = 1e-15
    max_terms: int = 10000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT_SERIES = SeriesControl()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for real ``x > 0``."""
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def _signed_ln_gamma(x: float) -> tuple[float, int]:
    """(ln|Gamma(x)|, sign Gamma(x)) for x off the poles."""
    if _is_nonpositive_integer(x):
        raise DomainError(f"gamma pole at {x!r}")
    if x > 0:
        return math.lgamma(x), 1
    # Gamma alternates sign between consecutive negative integers
    sign = -1 if math.floor(-x) % 2 == 0 else 1
    return math.lgamma(x), sign


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1); 1 for k = 0."""
    if k < 0:
        raise DomainError("pochhammer needs k >= 0")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def gen_binomial(n: float, m: int) -> float:
    """Gamma-generalized binomial coefficient Gamma(n+1) / (Gamma(m+1) Gamma(n-m+1)).

    Integer ``n >= 0`` gives the ordinary binomial coefficient exactly.  When
    ``n - m + 1`` sits on a gamma pole the coefficient is zero; a pole in
    ``n + 1`` itself is a domain error.
    """
    if m < 0:
        raise DomainError("gen_binomial needs m >= 0")
    if float(n).is_integer() and n >= 0:
        return float(math.comb(int(n), int(m)))
    if _is_nonpositive_integer(n + 1):
        raise DomainError(f"gen_binomial: Gamma(n+1) pole at n={n!r}")
    if _is_nonpositive_integer(n - m + 1):
        return 0.0
    l1, s1 = _signed_ln_gamma(n + 1)
    l3, s3 = _signed_ln_gamma(n - m + 1)
    return s1 * s3 * math.exp(l1 - math.lgamma(m + 1) - l3)


def laguerre(m: int, beta: float, x):
    """Generalized Laguerre polynomial L^beta_m(x) by the degree recurrence.

    ``x`` may be a scalar or a numpy array.
    """
    if m < 0 or int(m) != m:
        raise DomainError(f"Laguerre degree must be a nonnegative integer, got {m!r}")
    m = int(m)
    if np.ndim(x) == 0:
        return float(kernels.laguerre_table(m, float(beta), np.array([float(x)]))[m, 0])
    return kernels.laguerre_table(m, float(beta), np.asarray(x, dtype=float))[m]


def laguerre_power_coeffs(m: int, beta: float) -> list[float]:
    """Monomial coefficients c_0..c_m of L^beta_m(x) = sum_k c_k x^k."""
    if m < 0:
        raise DomainError("degree must be >= 0")
    return [(-1) ** k * gen_binomial(m + beta, m - k) / math.factorial(k) for k in range(m + 1)]


def hyp1f1(a: float, b: float, x: float, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Confluent hypergeometric 1F1(a; b; x) from its defining series."""
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 undefined for b={b!r}")
    total = 1.0
    term = 1.0
    terminating = _is_nonpositive_integer(a)
    for k in range(ctl.max_terms):
        term *= (a + k) / (b + k) * x / (k + 1)
        total += term
        if term == 0.0:
            return total
        if not terminating and abs(term) <= ctl.rel_tol * abs(total):
            return total
    raise ConvergenceError("1F1 series did not converge", partial=total, terms=ctl.max_terms)


def hyp2f1_a1(b: float, c: float, z: float, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Gauss function 2F1(1, b; c; z) for 0 <= z < 1.

    The series is summed with compensation and a rigorous geometric tail
    bound.  Close to ``z = 1`` the term count can exceed the budget; then the
    value is taken from the Euler integral (valid for c > 1)

        2F1(1, b; c; z) = (c-1) int_0^1 d^(c-2) ((1-z) + z d)^(-b) dd,

    written in d = 1 - t so the near-singular factor is formed without
    cancellation.
    """
    if not c > 0:
        raise DomainError(f"2F1(1,b;c;z) needs c > 0, got {c!r}")
    if not (0.0 <= z < 1.0):
        raise DomainError(f"2F1(1,b;c;z) needs 0 <= z < 1, got {z!r}")
    if z == 0.0:
        return 1.0
    value, nterms, ok = kernels.hyp2f1_a1_series(float(b), float(c), float(z), ctl.rel_tol, int(ctl.max_terms))
    if ok:
        return value
    if z > 0.9 and c > 1.0:
        return _hyp2f1_a1_integral(b, c, z)
    raise ConvergenceError(f"2F1(1,{b},{c};{z}) series exhausted {nterms} terms", partial=value, terms=nterms)


def _hyp2f1_a1_integral(b: float, c: float, z: float) -> float:
    from .oracle import QuadratureSettings, integrate_interval

    omz = 1.0 - z

    def integrand(d):
        return np.exp((c - 2.0) * np.log(d) - b * np.log(omz + z * d))

    res = integrate_interval(integrand, 0.0, 1.0, QuadratureSettings(rel_tol=1e-14, max_levels=12))
    return (c - 1.0) * res.value


def lower_incomplete_gamma(s: float, x: float, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Lower incomplete gamma gamma(s, x) = int_0^x t^(s-1) e^(-t) dt.

    Series below ``x = s + 1``, Legendre continued fraction for the
    complement above it.
    """
    if not s > 0:
        raise DomainError(f"lower incomplete gamma needs s > 0, got {s!r}")
    if x < 0:
        raise DomainError(f"lower incomplete gamma needs x >= 0, got {x!r}")
    vals, ok = kernels.lower_gamma_array(float(s), np.array([float(x)]), ctl.rel_tol, int(ctl.max_terms))
    if not ok:
        raise ConvergenceError(f"incomplete gamma({s}, {x}) did not converge", partial=float(vals[0]))
    return float(vals[0])


__all__ = [
    "SeriesControl",
    "DEFAULT_SERIES",
    "ln_gamma",
    "pochhammer",
    "gen_binomial",
    "laguerre",
    "laguerre_power_coeffs",
    "hyp1f1",
    "hyp2f1_a1",
    "lower_incomplete_gamma",
]
