"""Restricted Hartree-Fock-Roothaan energies of two-electron ions over
exponential-type orbitals with non-integer principal quantum numbers."""

from .basis import BasisSpec, BhEtoFunction, NstoFunction, build_basis
from .integrals import IntegralTables, assemble_tables, bheto_family_tables, tables_for
from .kernels import BACKEND
from .optimize import optimize_double_zeta, optimize_single_zeta
from .scf import AtomSystem, ScfResult, ScfSettings, double_zeta_energy, scf_solve, single_zeta_energy

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BasisSpec",
    "BhEtoFunction",
    "NstoFunction",
    "build_basis",
    "IntegralTables",
    "assemble_tables",
    "bheto_family_tables",
    "tables_for",
    "AtomSystem",
    "ScfSettings",
    "ScfResult",
    "scf_solve",
    "single_zeta_energy",
    "double_zeta_energy",
    "optimize_single_zeta",
    "optimize_double_zeta",
]
