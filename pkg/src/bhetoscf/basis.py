"""Radial basis functions: normalized Slater-type orbitals with real principal
quantum number (NSTOs), Laguerre-weighted exponential orbitals (BH-ETOs), their
expansions into power primitives and the triangular maps between the two.

Everything is s-type (l = m = 0); the angular parameter is carried by the
types but only ``l_star = 0`` is exercised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import kernels
from .errors import DomainError
from .specfun import laguerre_power_coeffs

# smallest r-power whose square is still integrable against r^2 at the origin
MIN_POWER = -0.75


@dataclass(frozen=True)
class PowerPrimitive:
    """Un-normalized radial term ``coeff * r**power * exp(-zeta * r)``."""

    coeff: float
    power: float
    zeta: float

    def __post_init__(self):
        if not self.power > MIN_POWER:
            raise DomainError(f"primitive power {self.power!r} must exceed {MIN_POWER}")
        if not self.zeta > 0:
            raise DomainError(f"orbital exponent must be positive, got {self.zeta!r}")

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return self.coeff * r**self.power * np.exp(-self.zeta * r)


@dataclass(frozen=True)
class NstoFunction:
    """Normalized Slater-type orbital N r^(n*-1) e^(-zeta r) with real n*."""

    n_star: float
    zeta: float
    l: int = 0
    m: int = 0

    def __post_init__(self):
        if self.l != 0 or self.m != 0:
            raise DomainError("only s-type orbitals (l = m = 0) are supported")
        if not self.n_star > self.l:
            raise DomainError(f"n* must exceed l, got n*={self.n_star!r}")
        if not self.zeta > 0:
            raise DomainError(f"orbital exponent must be positive, got {self.zeta!r}")

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return nsto_norm(self.n_star, self.zeta) * r ** (self.n_star - 1.0) * np.exp(-self.zeta * r)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return self.evaluate(r) * ((self.n_star - 1.0) / r - self.zeta)


@dataclass(frozen=True)
class BhEtoFunction:
    """Laguerre-weighted exponential orbital with fractional quantum number.

    The radial part is ``N (2 zeta r)^(l*+nu-1) exp(-zeta r) L^beta_{n_r}(2 zeta r)``
    with Laguerre index ``beta = 2 l* + 2 nu - alpha``.  Functions sharing
    ``(nu, l*, alpha, zeta)`` are orthonormal under the measure
    ``r^(2-alpha) dr``.
    """

    n_r: int
    nu: float
    zeta: float
    alpha: float = 0.0
    l_star: float = 0.0
    m: int = 0

    def __post_init__(self):
        if int(self.n_r) != self.n_r or self.n_r < 0:
            raise DomainError(f"radial index must be a nonnegative integer, got {self.n_r!r}")
        if not 0.0 < self.nu < 1.5:
            raise DomainError(f"nu must lie in (0, 1.5), got {self.nu!r}")
        if not self.zeta > 0:
            raise DomainError(f"orbital exponent must be positive, got {self.zeta!r}")
        if not self.laguerre_index > -1:
            raise DomainError("Laguerre index 2 l* + 2 nu - alpha must exceed -1")
        if self.m != 0:
            raise DomainError("only m = 0 is supported")

    @property
    def n_star(self) -> float:
        return self.l_star + self.nu + self.n_r

    @property
    def laguerre_index(self) -> float:
        return 2.0 * self.l_star + 2.0 * self.nu - self.alpha

    def evaluate(self, r):
        """Pointwise value from the Laguerre recurrence (no monomial expansion)."""
        x = 2.0 * self.zeta * np.asarray(r, dtype=float)
        lag = kernels.laguerre_table(self.n_r, self.laguerre_index, np.atleast_1d(x))[self.n_r]
        val = bheto_norm(self) * x ** (self.l_star + self.nu - 1.0) * np.exp(-0.5 * x) * lag
        return val.reshape(np.shape(x))

    def derivative(self, r):
        """d/dr, using dL^b_n/dx = -L^(b+1)_(n-1)."""
        x = 2.0 * self.zeta * np.asarray(r, dtype=float)
        xs = np.atleast_1d(x)
        lag = kernels.laguerre_table(self.n_r, self.laguerre_index, xs)[self.n_r]
        dlag = -kernels.laguerre_table(self.n_r - 1, self.laguerre_index + 1.0, xs)[self.n_r - 1] if self.n_r else 0.0
        p = self.l_star + self.nu - 1.0
        val = bheto_norm(self) * xs ** (p - 1.0) * np.exp(-0.5 * xs) * (p * lag - 0.5 * xs * lag + xs * dlag)
        return (2.0 * self.zeta * val).reshape(np.shape(x))


@dataclass(frozen=True)
class ExpandedOrbital:
    """An orbital written as a sum of power primitives sharing one exponent."""

    primitives: tuple
    label: str = ""

    def __post_init__(self):
        if not self.primitives:
            raise DomainError("an expanded orbital needs at least one primitive")
        z0 = self.primitives[0].zeta
        if any(p.zeta != z0 for p in self.primitives):
            raise DomainError("all primitives of an orbital must share one exponent")

    @property
    def zeta(self) -> float:
        return self.primitives[0].zeta

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        poly = sum(p.coeff * r**p.power for p in self.primitives)
        return poly * np.exp(-self.zeta * r)


@dataclass(frozen=True)
class SingleZetaBhEto:
    """q BH-ETOs with common (nu, zeta, alpha) and n_r = 0 .. q-1."""

    q: int
    nu: float
    zeta: float
    alpha: float = 0.0

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise DomainError(f"basis size q must be a positive integer, got {self.q!r}")
        # constructing the first member validates nu, zeta and alpha
        BhEtoFunction(0, self.nu, self.zeta, self.alpha)

    @property
    def n_star(self) -> float:
        """Principal quantum number reported for the family (that of n_r = 0)."""
        return self.nu


@dataclass(frozen=True)
class DoubleZetaNsto:
    """Independent NSTOs, one per ``(n_star, zeta)`` pair."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((float(n), float(z)) for n, z in self.pairs)
        if not pairs:
            raise DomainError("need at least one (n*, zeta) pair")
        for n, z in pairs:
            NstoFunction(n, z)
        object.__setattr__(self, "pairs", pairs)


@dataclass(frozen=True)
class BasisSpec:
    """A basis request: either a single-zeta BH-ETO family or a list of NSTOs."""

    kind: Union[SingleZetaBhEto, DoubleZetaNsto]
    l: int = field(default=0)

    def __post_init__(self):
        if self.l != 0:
            raise DomainError("only l = 0 bases are supported")
        if not isinstance(self.kind, (SingleZetaBhEto, DoubleZetaNsto)):
            raise TypeError(f"unsupported basis kind {type(self.kind).__name__}")

    @classmethod
    def single_zeta(cls, q: int, nu: float, zeta: float, alpha: float = 0.0) -> "BasisSpec":
        return cls(SingleZetaBhEto(q, nu, zeta, alpha))

    @classmethod
    def double_zeta(cls, pairs: Sequence[tuple]) -> "BasisSpec":
        return cls(DoubleZetaNsto(tuple(pairs)))

    @property
    def size(self) -> int:
        k = self.kind
        return k.q if isinstance(k, SingleZetaBhEto) else len(k.pairs)


def nsto_norm(n_star: float, zeta: float) -> float:
    """Normalization (2 zeta)^(n*+1/2) / sqrt(Gamma(2 n* + 1)) of an NSTO."""
    if not 2 * n_star + 1 > 0 or not zeta > 0:
        raise DomainError(f"invalid NSTO parameters n*={n_star!r}, zeta={zeta!r}")
    return math.exp((n_star + 0.5) * math.log(2 * zeta) - 0.5 * math.lgamma(2 * n_star + 1))


def bheto_norm(f: BhEtoFunction) -> float:
    """Normalization sqrt[(2 zeta)^(3-alpha) n_r! / Gamma(n_r + beta + 1)], beta the Laguerre index.

    Written with ``n* + l* + nu = n_r + 2 l* + 2 nu`` so the gamma argument is
    ``n_r + beta + 1``.
    """
    arg = f.n_r + f.laguerre_index + 1.0
    if not arg > 0:
        raise DomainError("normalization gamma argument is not positive")
    return math.exp(
        0.5 * ((3.0 - f.alpha) * math.log(2 * f.zeta) + math.lgamma(f.n_r + 1) - math.lgamma(arg))
    )


def expand_nsto(f: NstoFunction, label: str = "") -> ExpandedOrbital:
    prim = PowerPrimitive(nsto_norm(f.n_star, f.zeta), f.n_star - 1.0, f.zeta)
    return ExpandedOrbital((prim,), label or f"nsto(n*={f.n_star:g}, zeta={f.zeta:g})")


def expand_bheto(f: BhEtoFunction, label: str = "") -> ExpandedOrbital:
    """Power-primitive expansion of a BH-ETO: n_r + 1 terms r^(l*+nu-1+k) e^(-zeta r)."""
    norm = bheto_norm(f)
    k2 = 2.0 * f.zeta
    p0 = f.l_star + f.nu - 1.0
    coeffs = laguerre_power_coeffs(f.n_r, f.laguerre_index)
    prims = tuple(
        PowerPrimitive(norm * ck * k2 ** (p0 + k), p0 + k, f.zeta) for k, ck in enumerate(coeffs)
    )
    return ExpandedOrbital(prims, label or f"bheto(n_r={f.n_r}, nu={f.nu:g}, zeta={f.zeta:g})")


def _check_transform_args(n_r_max, nu, l_star, alpha):
    if int(n_r_max) != n_r_max or n_r_max < 0:
        raise DomainError("n_r_max must be a nonnegative integer")
    beta = 2.0 * l_star + 2.0 * nu - alpha
    if not beta > -1:
        raise DomainError("Laguerre index must exceed -1")
    if not 2.0 * (l_star + nu) + 1 > 0:
        raise DomainError("NSTO normalization gamma argument is not positive")
    return int(n_r_max), beta


def _length_scale(alpha, zeta):
    # the only zeta dependence of the maps is (2 zeta)^(-alpha/2) per row
    return 1.0 if zeta is None else (2.0 * zeta) ** (-0.5 * alpha)


def _transform_factors(n, nu, l_star, beta):
    """Per-index factors shared by both maps, built from short rising products.

    Returns (binom, lag, sto, common) where binom[i, k] = gen_binomial(i+beta, i-k),
    lag[i] = sqrt(i! / (beta+1)_i), sto[k] = sqrt((2 l*+2 nu+1)_(2k)) / k! and
    common = sqrt(Gamma(2 l*+2 nu+1) / Gamma(beta+1)).  Products keep every
    entry within a few ulps, which matters because a @ abar cancels heavily.
    """
    s0 = 2.0 * (l_star + nu) + 1.0
    binom = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        binom[i, i] = 1.0
        for k in range(i - 1, -1, -1):
            # gen_binomial(i+beta, i-k) = prod_{t=1}^{i-k} (k + beta + t) / t
            binom[i, k] = binom[i, k + 1] * (k + 1 + beta) / (i - k)
    lag = np.ones(n + 1)
    sto = np.ones(n + 1)
    for i in range(1, n + 1):
        lag[i] = lag[i - 1] * i / (beta + i)
        sto[i] = sto[i - 1] * (s0 + 2 * i - 2) * (s0 + 2 * i - 1) / (i * i)
    common = math.exp(0.5 * (math.lgamma(s0) - math.lgamma(beta + 1.0)))
    return binom, np.sqrt(lag), np.sqrt(sto), common


def bheto_to_nsto_coeffs(n_r_max: int, nu: float, l_star: float = 0.0, alpha: float = 0.0, zeta: float | None = None) -> np.ndarray:
    """Lower-triangular ``a`` with psi_i = sum_k a[i, k] chi_k.

    Row i is the BH-ETO with n_r = i; column k is the NSTO with
    n* = l* + nu + k and the same exponent.  ``zeta`` fixes the factor
    (2 zeta)^(-alpha/2); when omitted the length unit is taken as 2 zeta = 1,
    which leaves ``a`` exact for alpha = 0.
    """
    n, beta = _check_transform_args(n_r_max, nu, l_star, alpha)
    binom, lag, sto, common = _transform_factors(n, nu, l_star, beta)
    signs = (-1.0) ** np.arange(n + 1)
    a = binom * lag[:, None] * (signs * sto)[None, :]
    return np.tril(a) * (common * _length_scale(alpha, zeta))


def nsto_to_bheto_coeffs(n_r_max: int, nu: float, l_star: float = 0.0, alpha: float = 0.0, zeta: float | None = None) -> np.ndarray:
    """Lower-triangular inverse map: chi_k = sum_j abar[k, j] psi_j.

    Uses x^k / k! = sum_j (-1)^j gen_binomial(k + beta, k - j) L^beta_j(x),
    so every entry is a closed form rather than a numerical inverse.
    """
    n, beta = _check_transform_args(n_r_max, nu, l_star, alpha)
    binom, lag, sto, common = _transform_factors(n, nu, l_star, beta)
    signs = (-1.0) ** np.arange(n + 1)
    abar = binom / sto[:, None] * (signs / lag)[None, :]
    return np.tril(abar) / (common * _length_scale(alpha, zeta))


def single_zeta_functions(spec: SingleZetaBhEto) -> list[BhEtoFunction]:
    return [BhEtoFunction(i, spec.nu, spec.zeta, spec.alpha) for i in range(spec.q)]


def basis_functions(spec: BasisSpec | SingleZetaBhEto | DoubleZetaNsto) -> list:
    """The orbital objects of a basis request (BhEtoFunction or NstoFunction)."""
    kind = spec.kind if isinstance(spec, BasisSpec) else spec
    if isinstance(kind, SingleZetaBhEto):
        return single_zeta_functions(kind)
    if isinstance(kind, DoubleZetaNsto):
        return [NstoFunction(n, z) for n, z in kind.pairs]
    raise TypeError(f"unsupported basis kind {type(kind).__name__}")


def build_basis(spec: BasisSpec | SingleZetaBhEto | DoubleZetaNsto) -> list[ExpandedOrbital]:
    """Expanded orbitals for a basis request (q of them, or one per NSTO pair)."""
    kind = spec.kind if isinstance(spec, BasisSpec) else spec
    if isinstance(kind, SingleZetaBhEto):
        return [expand_bheto(f) for f in single_zeta_functions(kind)]
    if isinstance(kind, DoubleZetaNsto):
        return [expand_nsto(NstoFunction(n, z)) for n, z in kind.pairs]
    raise TypeError(f"unsupported basis kind {type(kind).__name__}")


__all__ = [
    "MIN_POWER",
    "PowerPrimitive",
    "NstoFunction",
    "BhEtoFunction",
    "ExpandedOrbital",
    "SingleZetaBhEto",
    "DoubleZetaNsto",
    "BasisSpec",
    "nsto_norm",
    "bheto_norm",
    "expand_nsto",
    "expand_bheto",
    "bheto_to_nsto_coeffs",
    "nsto_to_bheto_coeffs",
    "single_zeta_functions",
    "basis_functions",
    "build_basis",
]
