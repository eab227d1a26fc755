"""Brute-force numerical quadrature used to audit the analytic integrals.

Nothing here knows about hypergeometric functions or basis expansions; every
routine integrates pointwise-evaluated integrands with double-exponential
(tanh-sinh / exp-sinh) rules whose step is halved until successive estimates
agree.  Integrands are called with numpy arrays of abscissae.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .errors import DomainError, ToleranceNotMet

_HALF_PI = 0.5 * math.pi
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSettings:
    """Controls for the adaptive double-exponential rules.

    ``scale`` is a length hint for the half-line map (roughly the decay
    length of the integrand); it only affects efficiency.  ``mass_tol``
    accepts an error that small relative to int |f|, which is the only
    attainable target when the integral itself cancels to zero.
    """

    abs_tol: float = 0.0
    rel_tol: float = 1e-12
    max_levels: int = 10
    mapping: str = "exp_decay_halfline"
    scale: float = 1.0
    mass_tol: float = 0.0

    def __post_init__(self):
        if self.abs_tol < 0 or self.mass_tol < 0 or not self.rel_tol > 0:
            raise ValueError("tolerances must be positive")
        if self.mapping != "exp_decay_halfline":
            raise ValueError(f"unknown mapping {self.mapping!r}")


class QuadResult(NamedTuple):
    value: float
    error: float
    levels: int
    evaluations: int


# t-range for both rules; the endpoint gaps at |t| = 6 are below 1e-130
_T_MAX = 6.0
_H0 = 0.5


def _halfline_nodes(t, scale):
    u = _HALF_PI * np.sinh(t)
    x = scale * np.exp(u)
    w = scale * _HALF_PI * np.cosh(t) * np.exp(u)
    return x, w


def _interval_nodes(t, a, b):
    # distances to the nearer endpoint are formed directly to keep
    # algebraic endpoint singularities resolvable
    u = _HALF_PI * np.sinh(t)
    width = b - a
    e = np.exp(-2.0 * np.abs(u))
    near = width * e / (1.0 + e)
    x = np.where(u < 0, a + near, b - near)
    w = width * _HALF_PI * np.cosh(t) * 2.0 * e / (1.0 + e) ** 2
    return x, w


def _eval(f, x, w, tail_mask):
    with np.errstate(all="ignore"):
        fx = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    bad = ~np.isfinite(fx)
    if np.any(bad):
        # overflow/underflow artefacts at the extreme ends of the map are harmless
        if np.any(bad & ~tail_mask):
            raise DomainError("integrand is not finite inside the integration range")
        fx = np.where(bad, 0.0, fx)
    return w * fx


def _adaptive(f, node_fn, settings, tail_fn):
    h = _H0
    k = np.arange(-int(_T_MAX / h), int(_T_MAX / h) + 1)
    t = k * h
    x, w = node_fn(t)
    wf = _eval(f, x, w, tail_fn(t, x))
    total = h * wf.sum()
    mag = h * np.abs(wf).sum()
    evals = t.size
    err = math.inf
    for level in range(1, settings.max_levels + 1):
        h *= 0.5
        t = (2 * np.arange(-int(_T_MAX / (2 * h)), int(_T_MAX / (2 * h))) + 1) * h
        x, w = node_fn(t)
        wf = _eval(f, x, w, tail_fn(t, x))
        evals += t.size
        prev = total
        total = 0.5 * total + h * wf.sum()
        mag = 0.5 * mag + h * np.abs(wf).sum()
        err = max(abs(total - prev), 8 * _EPS * mag)
        target = max(settings.abs_tol, settings.rel_tol * abs(total), settings.mass_tol * mag)
        if level >= 3 and err <= target:
            return total, err, level, evals
    raise ToleranceNotMet(
        "double-exponential quadrature did not reach tolerance",
        estimate=total,
        error=err,
        levels=settings.max_levels,
    )


def integrate_halfline(f: Callable, s: QuadratureSettings = QuadratureSettings()) -> QuadResult:
    """Integrate ``f`` over (0, inf) with the exp-sinh rule.

    ``f`` may have an integrable algebraic singularity at 0 and must decay
    exponentially.  Raises :class:`ToleranceNotMet` (carrying the estimate
    and its error bound) when ``max_levels`` halvings do not suffice.
    """
    value, err, levels, evals = _adaptive(
        f,
        lambda t: _halfline_nodes(t, s.scale),
        s,
        lambda t, x: (x > 50.0 * s.scale) | (np.abs(t) > 4.5),
    )
    return QuadResult(float(value), float(err), levels, evals)


def integrate_interval(f: Callable, a: float, b: float, s: QuadratureSettings = QuadratureSettings()) -> QuadResult:
    """Integrate ``f`` over [a, b] with the tanh-sinh rule.

    Algebraic singularities at ``a`` are resolved to full precision.  Nodes
    near ``b`` are rounded to within one ulp of ``b``, so a singularity
    there should be moved to ``a`` by reflecting the variable.
    """
    if not b > a:
        raise DomainError("need b > a")
    value, err, levels, evals = _adaptive(
        f,
        lambda t: _interval_nodes(t, a, b),
        s,
        lambda t, x: np.abs(t) > 4.5,
    )
    return QuadResult(float(value), float(err), levels, evals)


def radial_integral(power: float, beta: float, s: QuadratureSettings | None = None) -> QuadResult:
    """Quadrature of int_0^inf r^power e^(-beta r) dr (a convenience for audits)."""
    s = s or QuadratureSettings(scale=1.0 / beta)
    return integrate_halfline(lambda r: r**power * np.exp(-beta * r), s)


def integrate_coulomb_2d(a, beta, b, beta2, L=0, s: QuadratureSettings | None = None, order: str = "split") -> float:
    """int int r1^a e^(-beta r1) r2^b e^(-beta2 r2) r_<^L / r_>^(L+1) dr1 dr2.

    ``order="split"`` integrates the inner variable exactly with the lower
    incomplete gamma function on both halves r2 < r1 and r1 < r2 and leaves
    a single outer quadrature.  ``order="nested"`` is a fully numerical
    iterated quadrature of the same double integral (the independent route
    used to validate the split form).
    """
    if not (a + b > -1 and a + L > -1 and b + L > -1):
        raise DomainError("Coulomb auxiliary integral diverges for these powers")
    if order == "split":
        return _coulomb_split(a, beta, b, beta2, L, s)
    if order == "nested":
        return _coulomb_nested(a, beta, b, beta2, L, s)
    raise ValueError(f"unknown order {order!r}")


def _half_split(a, beta, b, beta2, L, s):
    # region r2 < r1: int dr1 r1^(a-L-1) e^(-beta r1) gamma(b+L+1, beta2 r1) / beta2^(b+L+1)
    sb = b + L + 1.0
    log_pref = -sb * math.log(beta2)

    def f(r):
        g, _ = kernels.lower_gamma_array(sb, beta2 * r)
        return np.exp((a - L - 1.0) * np.log(r) - beta * r + log_pref) * g

    settings = s or QuadratureSettings(rel_tol=1e-13, scale=1.0 / (beta + beta2))
    return integrate_halfline(f, settings).value


def _coulomb_split(a, beta, b, beta2, L, s):
    return _half_split(a, beta, b, beta2, L, s) + _half_split(b, beta2, a, beta, L, s)


def _coulomb_nested(a, beta, b, beta2, L, s):
    rho1 = lambda r: r**a * np.exp(-beta * r)  # noqa: E731
    rho2 = lambda r: r**b * np.exp(-beta2 * r)  # noqa: E731
    return integrate_density_coulomb(rho1, rho2, L=L, scale=1.0 / min(beta, beta2), s=s)


def integrate_density_coulomb(rho1, rho2, L=0, scale=1.0, s: QuadratureSettings | None = None, inner_level=5) -> float:
    """int int rho1(r1) rho2(r2) r_<^L / r_>^(L+1) dr1 dr2 by iterated quadrature.

    ``rho1``/``rho2`` are radial densities that already include any volume
    factors.  For every outer node r1 the inner integral is split at r1 into
    a tanh-sinh piece on [0, r1] and an exp-sinh piece on [r1, inf); both
    inner rules are fixed at ``inner_level`` halvings and the result is
    compared against ``inner_level + 1`` to confirm it.
    """
    settings = s or QuadratureSettings(rel_tol=1e-12, scale=scale)

    def inner_rule(level):
        h = _H0 / 2**level
        t = np.arange(-int(_T_MAX / h), int(_T_MAX / h) + 1) * h
        u01, w01 = _interval_nodes(t, 0.0, 1.0)
        uinf, winf = _halfline_nodes(t, scale)
        return u01, h * w01, uinf, h * winf

    def outer_value(level):
        u01, w01, uinf, winf = inner_rule(level)

        def f(r1):
            r1c = r1[:, None]
            with np.errstate(all="ignore"):
                low = rho2(r1c * u01) * (r1c * u01) ** L
                low = np.where(np.isfinite(low), low, 0.0) @ w01 * r1 / r1 ** (L + 1)
                hi_r = r1c + uinf
                high = rho2(hi_r) / hi_r ** (L + 1)
                high = np.where(np.isfinite(high), high, 0.0) @ winf * r1**L
            return rho1(r1) * (low + high)

        return integrate_halfline(f, settings)

    res_a = outer_value(inner_level)
    res_b = outer_value(inner_level + 1)
    spread = abs(res_a.value - res_b.value)
    if spread > max(settings.abs_tol, 10 * settings.rel_tol * abs(res_b.value)):
        raise ToleranceNotMet("inner rule not converged", estimate=res_b.value, error=spread)
    return res_b.value


def _orbital_scale(*orbs):
    # decay length of the slowest product density
    return 1.0 / min(o.zeta for o in orbs)


def _orbital_settings(*orbs):
    # matrix elements between orthogonal functions vanish, so judge them against int |f g|
    return QuadratureSettings(scale=_orbital_scale(*orbs), mass_tol=1e-13)


def overlap_quadrature(f, g, s: QuadratureSettings | None = None) -> float:
    """int f g r^2 dr for orbitals exposing ``evaluate`` and ``zeta``."""
    s = s or _orbital_settings(f, g)
    return integrate_halfline(lambda r: f.evaluate(r) * g.evaluate(r) * r * r, s).value


def kinetic_quadrature(f, g, s: QuadratureSettings | None = None) -> float:
    """(1/2) int f' g' r^2 dr, the symmetric first-derivative form of <f|-lap/2|g> for s orbitals."""
    s = s or _orbital_settings(f, g)
    return 0.5 * integrate_halfline(lambda r: f.derivative(r) * g.derivative(r) * r * r, s).value


def nuclear_quadrature(f, g, Z: float, s: QuadratureSettings | None = None) -> float:
    """-Z int f g r dr."""
    s = s or _orbital_settings(f, g)
    return -Z * integrate_halfline(lambda r: f.evaluate(r) * g.evaluate(r) * r, s).value


def eri_quadrature(p, q, r, t, s: QuadratureSettings | None = None) -> float:
    """(pq|rt) for s orbitals by iterated quadrature of the monopole kernel."""
    scale = _orbital_scale(p, q, r, t)
    rho1 = lambda x: p.evaluate(x) * q.evaluate(x) * x * x  # noqa: E731
    rho2 = lambda x: r.evaluate(x) * t.evaluate(x) * x * x  # noqa: E731
    return integrate_density_coulomb(rho1, rho2, L=0, scale=scale, s=s)


__all__ = [
    "QuadratureSettings",
    "QuadResult",
    "integrate_halfline",
    "integrate_interval",
    "radial_integral",
    "integrate_coulomb_2d",
    "integrate_density_coulomb",
    "overlap_quadrature",
    "kinetic_quadrature",
    "nuclear_quadrature",
    "eri_quadrature",
]
