"""Closed-shell Roothaan SCF for two-electron ions (one doubly occupied s orbital)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .basis import BasisSpec
from .errors import ConvergenceError, DegenerateBasisError, DomainError
from .integrals import LINDEP_THRESHOLD, IntegralTables, tables_for

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class AtomSystem:
    """A nucleus of charge Z carrying two electrons in one closed 1s shell."""

    Z: float
    n_electrons: int = 2
    occupation: float = 1.0

    def __post_init__(self):
        if not self.Z > 0:
            raise DomainError(f"nuclear charge must be positive, got {self.Z!r}")
        if self.n_electrons != 2 or self.occupation != 1.0:
            raise DomainError("only the closed-shell two-electron case is supported")


@dataclass(frozen=True)
class ScfSettings:
    max_iter: int = 200
    tol_energy: float = 1e-13
    tol_density: float = 1e-12
    damping: float = 0.0
    lindep_threshold: float = LINDEP_THRESHOLD

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not (self.tol_energy > 0 and self.tol_density > 0 and self.lindep_threshold > 0):
            raise ValueError("tolerances must be positive")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")


@dataclass
class ScfResult:
    e_total: float
    e_one: float
    e_coulomb: float
    t_kin: float
    v_ne: float
    v_ee: float
    virial_ratio: float
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    density: np.ndarray
    iterations: int
    converged: bool
    energy_history: list = field(default_factory=list)

    @property
    def orbital_energy(self) -> float:
        return float(self.eigenvalues[0])


def canonical_orthogonalizer(S: np.ndarray, threshold: float = LINDEP_THRESHOLD) -> np.ndarray:
    """X with X^T S X = I, dropping overlap eigenvectors below ``threshold``.

    The retained dimension is ``X.shape[1]``.
    """
    w, U = symmetric_eigensolve(S)
    keep = w > threshold
    if not np.any(keep):
        raise DegenerateBasisError("every overlap eigenvalue is below the linear-dependence threshold")
    return U[:, keep] / np.sqrt(w[keep])


def symmetric_eigensolve(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors by cyclic Jacobi sweeps."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("eigensolver needs a square matrix")
    w, v, sweeps = kernels.jacobi_eigh(0.5 * (A + A.T))
    if sweeps < 0:
        raise ConvergenceError("Jacobi sweeps did not converge", partial=w)
    return w, v


def coulomb_exchange(P: np.ndarray, eri: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """J_pq = sum_rs P_rs (pq|rs) and K_pq = sum_rs P_rs (ps|rq)."""
    J = np.einsum("pqrs,rs->pq", eri, P)
    K = np.einsum("psrq,rs->pq", eri, P)
    return J, K


def build_fock(h: np.ndarray, P: np.ndarray, eri: np.ndarray) -> np.ndarray:
    """F = h + J(P) - K(P)/2 for a closed-shell density P = 2 c c^T."""
    n = h.shape[0]
    if h.shape != (n, n) or P.shape != (n, n) or eri.shape != (n, n, n, n):
        raise DomainError("inconsistent shapes for h, P and eri")
    J, K = coulomb_exchange(P, eri)
    F = h + J - 0.5 * K
    return 0.5 * (F + F.T)


def _occupied_density(F, X):
    e, C = symmetric_eigensolve(X.T @ F @ X)
    coeffs = X @ C
    c = coeffs[:, 0]
    # sign convention: largest-magnitude coefficient positive
    if c[np.argmax(np.abs(c))] < 0:
        coeffs[:, 0] = -c
        c = -c
    return e, coeffs, 2.0 * np.outer(c, c)


def energy_decomposition(P: np.ndarray, tables: IntegralTables) -> dict:
    """Kinetic, nuclear-attraction and repulsion parts of the closed-shell energy."""
    t_kin = float(np.sum(P * tables.T))
    v_ne = float(np.sum(P * tables.Vne))
    J, _ = coulomb_exchange(P, tables.eri)
    # one orbital doubly occupied: J - K/2 = J/2, so the repulsion is tr(P J)/4
    v_ee = 0.25 * float(np.sum(P * J))
    virial = -(v_ne + v_ee) / t_kin if t_kin != 0 else math.nan
    return {"t_kin": t_kin, "v_ne": v_ne, "v_ee": v_ee, "virial_ratio": virial}


def scf_solve(system: AtomSystem, tables: IntegralTables, settings: ScfSettings = ScfSettings()) -> ScfResult:
    """Iterate Roothaan's equations from the core-Hamiltonian guess.

    Convergence needs both |dE| <= tol and RMS(dP) <= tol_density.  The
    energy test is floored at a few ulps of |E|, the finest change double
    precision can resolve.  When ``max_iter`` runs out the last iterate is
    returned with ``converged=False``.
    """
    if tables.Z != system.Z:
        raise DomainError("tables were built for a different nuclear charge")
    h = tables.h
    X = canonical_orthogonalizer(tables.S, settings.lindep_threshold)
    _, _, P = _occupied_density(h, X)
    F = build_fock(h, P, tables.eri)
    energy = 0.5 * float(np.sum(P * (h + F)))
    history = [energy]
    converged = False
    iterations = 0
    for iterations in range(1, settings.max_iter + 1):
        e, coeffs, P_new = _occupied_density(F, X)
        if settings.damping:
            P_new = (1.0 - settings.damping) * P_new + settings.damping * P
        F = build_fock(h, P_new, tables.eri)
        e_new = 0.5 * float(np.sum(P_new * (h + F)))
        d_e = abs(e_new - energy)
        d_p = math.sqrt(float(np.mean((P_new - P) ** 2)))
        P, energy = P_new, e_new
        history.append(energy)
        if d_e <= max(settings.tol_energy, 4.0 * _EPS * abs(energy)) and d_p <= settings.tol_density:
            converged = True
            break
    e, coeffs, _ = _occupied_density(F, X)
    e_one = 0.5 * float(np.sum(P * h))
    parts = energy_decomposition(P, tables)
    return ScfResult(
        e_total=energy,
        e_one=e_one,
        e_coulomb=parts["v_ee"],
        t_kin=parts["t_kin"],
        v_ne=parts["v_ne"],
        v_ee=parts["v_ee"],
        virial_ratio=parts["virial_ratio"],
        eigenvalues=e,
        coefficients=coeffs,
        density=P,
        iterations=iterations,
        converged=converged,
        energy_history=history,
    )


def one_electron_spectrum(tables: IntegralTables, threshold: float = LINDEP_THRESHOLD) -> np.ndarray:
    """Generalized eigenvalues of the core Hamiltonian (h, S), ascending."""
    X = canonical_orthogonalizer(tables.S, threshold)
    w, _ = symmetric_eigensolve(X.T @ tables.h @ X)
    return w


def solve_basis(spec: BasisSpec, Z: float, settings: ScfSettings = ScfSettings()) -> ScfResult:
    """Build tables for ``spec`` and run the SCF."""
    return scf_solve(AtomSystem(float(Z)), tables_for(spec, Z), settings)


def single_zeta_energy(Z: float, q: int, nu: float, zeta: float, alpha: float = 0.0, settings: ScfSettings = ScfSettings()) -> ScfResult:
    return solve_basis(BasisSpec.single_zeta(q, nu, zeta, alpha), Z, settings)


def double_zeta_energy(Z: float, pairs, settings: ScfSettings = ScfSettings()) -> ScfResult:
    return solve_basis(BasisSpec.double_zeta(pairs), Z, settings)


__all__ = [
    "AtomSystem",
    "ScfSettings",
    "ScfResult",
    "canonical_orthogonalizer",
    "symmetric_eigensolve",
    "coulomb_exchange",
    "build_fock",
    "energy_decomposition",
    "scf_solve",
    "one_electron_spectrum",
    "solve_basis",
    "single_zeta_energy",
    "double_zeta_energy",
]
