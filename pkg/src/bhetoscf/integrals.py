"""One- and two-electron integrals over s-type exponential orbitals.

Two routes produce the same :class:`IntegralTables`:

* ``assemble_tables`` works primitive by primitive with closed forms (gamma
  functions and the 2F1 representation of the radial Coulomb integral).  It
  handles any list of expanded orbitals and is exact up to rounding, but the
  power-basis sums cancel badly once a single-zeta family grows beyond a
  handful of functions.
* ``bheto_family_tables`` evaluates a whole common-exponent BH-ETO family in
  the dimensionless variable x = 2 zeta r with Gauss rules that are exact for
  the polynomial parts, so the Laguerre structure is never expanded into
  monomials.  This is the production path for single-zeta bases.

Two-electron integrals use chemists' order: eri[p, q, r, s] = (pq|rs), the
repulsion between densities p(1) q(1) and r(2) s(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre, roots_jacobi

from . import kernels
from .basis import BasisSpec, DoubleZetaNsto, ExpandedOrbital, SingleZetaBhEto, build_basis
from .errors import DegenerateBasisError, DomainError, IntegrabilityError
from .specfun import DEFAULT_SERIES, SeriesControl, hyp2f1_a1

#: eigenvalues of S below this are treated as linear dependence
LINDEP_THRESHOLD = 1e-10


@dataclass(frozen=True)
class IntegralTables:
    """Overlap, kinetic, nuclear-attraction and repulsion tables of one basis."""

    S: np.ndarray
    T: np.ndarray
    Vne: np.ndarray
    eri: np.ndarray
    Z: float

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def h(self) -> np.ndarray:
        """Core Hamiltonian T + Vne."""
        return self.T + self.Vne


def gamma_integral(p: float, beta: float) -> float:
    """int_0^inf r^p e^(-beta r) dr = Gamma(p+1) / beta^(p+1)."""
    if not p > -1:
        raise IntegrabilityError(f"r^{p} is not integrable at the origin")
    if not beta > 0:
        raise DomainError(f"decay rate must be positive, got {beta!r}")
    return math.exp(math.lgamma(p + 1.0) - (p + 1.0) * math.log(beta))


def overlap(f: ExpandedOrbital, g: ExpandedOrbital) -> float:
    beta = f.zeta + g.zeta
    return sum(
        a.coeff * b.coeff * gamma_integral(a.power + b.power + 2.0, beta)
        for a in f.primitives
        for b in g.primitives
    )


def kinetic(f: ExpandedOrbital, g: ExpandedOrbital) -> float:
    """<f| -1/2 laplacian |g> for s-type orbitals.

    The operator acts on each primitive r^p e^(-z r) of ``g``:
    -1/2 [p(p+1) r^(p-2) - 2 z (p+1) r^(p-1) + z^2 r^p] e^(-z r).
    Terms with a vanishing prefactor are skipped, so r^0 e^(-z r) never
    produces an r^-2 integrand.
    """
    beta = f.zeta + g.zeta
    z = g.zeta
    total = 0.0
    for a in f.primitives:
        for b in g.primitives:
            p = b.power
            base = a.power + p  # power after the r^2 volume element, before the operator shift
            acc = 0.0
            c2 = p * (p + 1.0)
            if c2 != 0.0:
                if not base > -1:
                    raise IntegrabilityError("kinetic integrand diverges at the origin")
                acc += -0.5 * c2 * gamma_integral(base, beta)
            c1 = z * (p + 1.0)
            if c1 != 0.0:
                acc += c1 * gamma_integral(base + 1.0, beta)
            acc += -0.5 * z * z * gamma_integral(base + 2.0, beta)
            total += a.coeff * b.coeff * acc
    return total


def nuclear(f: ExpandedOrbital, g: ExpandedOrbital, Z: float) -> float:
    """<f| -Z/r |g>."""
    if not Z > 0:
        raise DomainError("nuclear charge must be positive")
    beta = f.zeta + g.zeta
    return -Z * sum(
        a.coeff * b.coeff * gamma_integral(a.power + b.power + 1.0, beta)
        for a in f.primitives
        for b in g.primitives
    )


def radial_coulomb_aux(a: float, beta: float, b: float, beta2: float, L: int = 0, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """int int r1^a e^(-beta r1) r2^b e^(-beta2 r2) r_<^L / r_>^(L+1) dr1 dr2.

    Closed form: Gamma(a+b+1) / (beta+beta2)^(a+b+1) times
    [2F1(1, a+b+1; a+L+2; beta/(beta+beta2)) / (a+L+1)
     + 2F1(1, a+b+1; b+L+2; beta2/(beta+beta2)) / (b+L+1)].
    """
    if L < 0 or int(L) != L:
        raise DomainError("multipole order must be a nonnegative integer")
    if not (a + b + 1 > 0 and a + L + 1 > 0 and b + L + 1 > 0):
        raise IntegrabilityError("radial Coulomb integral diverges for these powers")
    if not (beta > 0 and beta2 > 0):
        raise DomainError("decay rates must be positive")
    s = beta + beta2
    n = a + b + 1.0
    pref = math.exp(math.lgamma(n) - n * math.log(s))
    t1 = hyp2f1_a1(n, a + L + 2.0, beta / s, ctl) / (a + L + 1.0)
    t2 = hyp2f1_a1(n, b + L + 2.0, beta2 / s, ctl) / (b + L + 1.0)
    return pref * (t1 + t2)


def eri_s(p: ExpandedOrbital, q: ExpandedOrbital, r: ExpandedOrbital, s: ExpandedOrbital) -> float:
    """(pq|rs) for s-type orbitals; only the monopole of 1/r12 survives."""
    beta = p.zeta + q.zeta
    beta2 = r.zeta + s.zeta
    # density powers include the r^2 volume elements
    left = [(x.coeff * y.coeff, x.power + y.power + 2.0) for x in p.primitives for y in q.primitives]
    right = [(x.coeff * y.coeff, x.power + y.power + 2.0) for x in r.primitives for y in s.primitives]
    return sum(ca * cb * radial_coulomb_aux(pa, beta, pb, beta2, 0) for ca, pa in left for cb, pb in right)


def check_overlap(S: np.ndarray, threshold: float = LINDEP_THRESHOLD) -> None:
    """Raise DegenerateBasisError unless S has an eigenvalue above ``threshold``."""
    w = np.linalg.eigvalsh(S)
    if not w.size or w[-1] <= threshold:
        raise DegenerateBasisError("overlap matrix has no eigenvalue above the linear-dependence threshold")


def assemble_tables(basis: list[ExpandedOrbital], Z: float) -> IntegralTables:
    """Tables from closed-form primitive integrals, computing each unique entry once."""
    n = len(basis)
    if n == 0:
        raise DomainError("empty basis")
    S = np.empty((n, n))
    T = np.empty((n, n))
    V = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            S[i, j] = S[j, i] = overlap(basis[i], basis[j])
            # symmetrize the operator form, which is exact only up to rounding
            t = 0.5 * (kinetic(basis[i], basis[j]) + kinetic(basis[j], basis[i]))
            T[i, j] = T[j, i] = t
            V[i, j] = V[j, i] = nuclear(basis[i], basis[j], Z)
    eri = np.empty((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for ij, (i, j) in enumerate(pairs):
        for kl in range(ij + 1):
            k, l = pairs[kl]
            v = eri_s(basis[i], basis[j], basis[k], basis[l])
            for a, b in ((i, j), (j, i)):
                for c, d in ((k, l), (l, k)):
                    eri[a, b, c, d] = v
                    eri[c, d, a, b] = v
    check_overlap(S)
    return IntegralTables(S, T, V, eri, float(Z))


@lru_cache(maxsize=64)
def _family_dimensionless(q: int, nu: float, alpha: float):
    """Dimensionless tables of the orbitals phi_i(x) = c_i x^(nu-1) e^(-x/2) L^beta_i(x).

    Returns (s, t, v, g) with s = int phi phi x^2, t = 1/2 int phi' phi' x^2,
    v = int phi phi x, and g the (ij|kl) repulsion tensor.  Arrays are
    read-only because they are shared through the cache.
    """
    beta = 2.0 * nu - alpha
    idx = np.arange(q)
    c = np.exp(0.5 * (np.array([math.lgamma(i + 1.0) - math.lgamma(i + beta + 1.0) for i in idx])))

    def rows(m, b, x):
        return kernels.laguerre_table(m, b, x)

    # overlap and nuclear: polynomial of degree 2q-2 against x^(2nu) / x^(2nu-1) e^-x
    xs, ws = roots_genlaguerre(q + 2, 2.0 * nu)
    Ls = rows(q - 1, beta, xs) * c[:, None]
    s = (Ls * ws) @ Ls.T
    xv, wv = roots_genlaguerre(q + 2, 2.0 * nu - 1.0)
    Lv = rows(q - 1, beta, xv) * c[:, None]
    v = (Lv * wv) @ Lv.T

    # kinetic: phi_i' = x^(nu-2) e^(-x/2) Q_i(x) with
    # Q_i = c_i [(nu-1) L_i - x L_i / 2 - x L^(beta+1)_(i-1)]
    xt, wt = roots_genlaguerre(q + 3, 2.0 * nu - 2.0)
    Lt = rows(q, beta, xt)
    Lt1 = rows(q, beta + 1.0, xt)
    Q = np.empty((q, xt.size))
    for i in range(q):
        dl = Lt1[i - 1] if i > 0 else 0.0
        Q[i] = c[i] * ((nu - 1.0) * Lt[i] - 0.5 * xt * Lt[i] - xt * dl)
    t = 0.5 * (Q * wt) @ Q.T

    # repulsion: g = R + R^T with
    # R = int_0^(1/2) ds s^(2nu) (1-s)^(2nu-1) int_0^inf dy y^(4nu) e^-y P_ij(y(1-s)) P_kl(y s),
    # P_ij(x) = c_i c_j L_i(x) L_j(x); y is the total radius, s the fraction on the inner electron
    y, wy = roots_genlaguerre(2 * q + 2, 4.0 * nu)
    u, wu = roots_jacobi(2 * q + 30, 0.0, 2.0 * nu)
    sf = 0.25 * (1.0 + u)
    wsf = wu / 4.0 ** (2.0 * nu + 1.0) * (1.0 - sf) ** (2.0 * nu - 1.0)
    x_out = np.outer(y, 1.0 - sf).ravel()
    x_in = np.outer(y, sf).ravel()
    w = np.outer(wy, wsf).ravel()
    A = rows(q - 1, beta, x_out) * c[:, None]
    B = rows(q - 1, beta, x_in) * c[:, None]
    AA = (A[:, None, :] * A[None, :, :]).reshape(q * q, -1)
    BB = (B[:, None, :] * B[None, :, :]).reshape(q * q, -1)
    R = (AA * w) @ BB.T
    g = (R + R.T).reshape(q, q, q, q)

    s = 0.5 * (s + s.T)
    t = 0.5 * (t + t.T)
    v = 0.5 * (v + v.T)
    for arr in (s, t, v, g):
        arr.setflags(write=False)
    return s, t, v, g


def bheto_family_tables(q: int, nu: float, zeta: float, Z: float, alpha: float = 0.0) -> IntegralTables:
    """Tables of a common-exponent BH-ETO family via exact Gauss rules in x = 2 zeta r.

    Needs nu > 1/2: below that the kinetic energy of r^(nu-1) diverges.
    """
    spec = SingleZetaBhEto(q, nu, zeta, alpha)
    if not spec.nu > 0.5:
        raise IntegrabilityError("kinetic energy diverges for nu <= 1/2")
    if not Z > 0:
        raise DomainError("nuclear charge must be positive")
    s, t, v, g = _family_dimensionless(int(q), float(nu), float(alpha))
    k = 2.0 * zeta
    S = k ** (-alpha) * s
    tables = IntegralTables(
        S=S,
        T=k ** (2.0 - alpha) * t,
        Vne=-Z * k ** (1.0 - alpha) * v,
        eri=k ** (1.0 - 2.0 * alpha) * g,
        Z=float(Z),
    )
    check_overlap(S)
    return tables


def tables_for(spec: BasisSpec, Z: float) -> IntegralTables:
    """Integral tables for a basis request, choosing the stable route per basis kind."""
    kind = spec.kind if isinstance(spec, BasisSpec) else spec
    if isinstance(kind, SingleZetaBhEto):
        return bheto_family_tables(kind.q, kind.nu, kind.zeta, Z, kind.alpha)
    if isinstance(kind, DoubleZetaNsto):
        return assemble_tables(build_basis(kind), Z)
    raise TypeError(f"unsupported basis kind {type(kind).__name__}")


__all__ = [
    "LINDEP_THRESHOLD",
    "IntegralTables",
    "gamma_integral",
    "overlap",
    "kinetic",
    "nuclear",
    "radial_coulomb_aux",
    "eri_s",
    "check_overlap",
    "assemble_tables",
    "bheto_family_tables",
    "tables_for",
]
