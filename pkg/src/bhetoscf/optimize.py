"""Variational optimization of the nonlinear basis parameters.

A bounded Nelder-Mead simplex drives the SCF energy over (nu, zeta) for
single-zeta families, over zeta alone when nu is pinned to 1, and over
(n1*, n2*, zeta1, zeta2) for two-NSTO bases.  The energy surfaces have
several local minima, so every public entry point runs a deterministic
multi-start and keeps the lowest result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, DegenerateBasisError, DomainError
from .scf import ScfResult, ScfSettings, double_zeta_energy, single_zeta_energy

NU_BOUNDS = (0.3, 1.5)
ZETA_BOUNDS = (0.05, 60.0)
NSTAR_BOUNDS = (0.3, 5.0)

DEFAULT_TOL_X = 1e-9
DEFAULT_TOL_F = 1e-13
DEFAULT_MAX_EVAL = 20000


@dataclass(frozen=True)
class ParamBox:
    """Named parameters with box bounds and a starting point."""

    names: tuple
    lower: tuple
    upper: tuple
    start: tuple

    def __post_init__(self):
        n = len(self.names)
        if not (len(self.lower) == len(self.upper) == len(self.start) == n):
            raise ValueError("names, bounds and start must have equal length")
        for lo, hi, x in zip(self.lower, self.upper, self.start):
            if not lo < hi:
                raise ValueError("every lower bound must be below its upper bound")
            if not lo <= x <= hi:
                raise ValueError(f"start value {x} outside [{lo}, {hi}]")

    def project(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def with_start(self, start: Sequence[float]) -> "ParamBox":
        return ParamBox(self.names, self.lower, self.upper, tuple(float(s) for s in start))


@dataclass
class OptResult:
    best_params: np.ndarray
    best_energy: float
    evaluations: int
    converged: bool
    history: list = field(default_factory=list)
    names: tuple = ()
    scf: ScfResult | None = None

    def params(self) -> dict:
        return dict(zip(self.names, (float(v) for v in self.best_params)))


def _initial_steps(x0, box):
    steps = np.where(x0 != 0.0, 0.05 * np.abs(x0), 2.5e-4)
    # step inward when the vertex would leave the box
    up = x0 + steps > np.asarray(box.upper)
    return np.where(up, -steps, steps)


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    box: ParamBox,
    tol_x: float = DEFAULT_TOL_X,
    tol_f: float = DEFAULT_TOL_F,
    max_eval: int = DEFAULT_MAX_EVAL,
    initial_step: Sequence[float] | None = None,
) -> OptResult:
    """Bounded Nelder-Mead with reflection, expansion, contraction and shrink.

    Trial points are projected onto the box.  Converged when the simplex
    diameter (max-norm distance of every vertex from the best) is at most
    ``tol_x`` and the spread of function values is at most ``tol_f``.
    Deterministic for a given start.
    """
    history: list = []

    def f(x):
        val = float(objective(x))
        if not math.isfinite(val):
            val = math.inf
        history.append((tuple(float(v) for v in x), val))
        return val

    x0 = box.project(np.asarray(box.start, dtype=float))
    n = x0.size
    steps = np.asarray(initial_step, dtype=float) if initial_step is not None else _initial_steps(x0, box)
    simplex = [x0]
    for i in range(n):
        v = x0.copy()
        v[i] += steps[i]
        simplex.append(box.project(v))
    fvals = [f(v) for v in simplex]
    if not math.isfinite(fvals[0]):
        raise DomainError("objective is not finite at the starting point")

    converged = False
    while True:
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        best = simplex[0]
        diam = max(float(np.max(np.abs(v - best))) for v in simplex[1:])
        if diam <= tol_x and fvals[-1] - fvals[0] <= tol_f:
            converged = True
            break
        if len(history) >= max_eval:
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = box.project(2.0 * centroid - worst)
        fr = f(xr)
        if fr < fvals[0]:
            xe = box.project(3.0 * centroid - 2.0 * worst)
            fe = f(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = box.project(centroid + 0.5 * (xr - centroid))
            fc = f(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = box.project(centroid + 0.5 * (worst - centroid))
            fc = f(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        for i in range(1, n + 1):
            simplex[i] = box.project(best + 0.5 * (simplex[i] - best))
            fvals[i] = f(simplex[i])

    i_best = min(range(len(history)), key=lambda i: history[i][1])
    return OptResult(
        best_params=np.asarray(history[i_best][0]),
        best_energy=history[i_best][1],
        evaluations=len(history),
        converged=converged,
        history=history,
        names=tuple(box.names),
    )


def _safe(fn):
    """Score SCF failures and integrability violations as +inf."""

    def wrapped(*args):
        try:
            res = fn(*args)
        except (DomainError, ConvergenceError, DegenerateBasisError, FloatingPointError, OverflowError):
            return math.inf
        return res.e_total if res.converged else math.inf

    return wrapped


def _merge(results: list[OptResult]) -> OptResult:
    best = min(results, key=lambda r: r.best_energy)
    history = [h for r in results for h in r.history]
    return OptResult(
        best_params=best.best_params,
        best_energy=best.best_energy,
        evaluations=sum(r.evaluations for r in results),
        converged=best.converged,
        history=history,
        names=best.names,
    )


def _scan(fn, grid):
    vals = [fn(g) for g in grid]
    order = sorted(range(len(grid)), key=lambda i: vals[i])
    return [grid[i] for i in order], [vals[i] for i in order]


def optimize_single_zeta(
    Z: float,
    q: int,
    alpha: float = 0.0,
    mode: str = "free",
    settings: ScfSettings = ScfSettings(),
    tol_x: float = DEFAULT_TOL_X,
    tol_f: float = DEFAULT_TOL_F,
    max_eval: int = DEFAULT_MAX_EVAL,
    n_starts: int = 5,
) -> OptResult:
    """Minimize the single-zeta SCF energy over (nu, zeta), or zeta alone for ``mode="integer"``.

    A coarse log-spaced zeta scan at nu = 1 seeds the starts.  In free mode
    the integer optimum is always one of the starts, so the free result can
    never be worse than the integer one.
    """
    if mode not in ("free", "integer"):
        raise ValueError(f"mode must be 'free' or 'integer', got {mode!r}")
    screened = Z - 5.0 / 16.0 if Z > 5.0 / 16.0 else Z
    grid = list(np.geomspace(0.8 * screened, 2.2 * screened, 12))

    e_int = _safe(lambda z: single_zeta_energy(Z, q, 1.0, z, alpha, settings))
    ranked, _ = _scan(lambda z: e_int(float(z)), grid)
    zbox = ParamBox(("zeta",), (ZETA_BOUNDS[0],), (ZETA_BOUNDS[1],), (float(ranked[0]),))
    runs = [
        nelder_mead(lambda x: e_int(float(x[0])), zbox.with_start((float(z),)), tol_x, tol_f, max_eval)
        for z in ranked[:n_starts]
    ]
    integer = _merge(runs)
    if mode == "integer":
        integer.scf = single_zeta_energy(Z, q, 1.0, float(integer.best_params[0]), alpha, settings)
        return integer

    e_free = _safe(lambda nu, z: single_zeta_energy(Z, q, nu, z, alpha, settings))
    z_star = float(integer.best_params[0])
    starts = [(1.0, z_star)]
    # off-integer starts on both sides of nu = 1 near the best scanned exponents
    for nu, z in ((0.95, ranked[0]), (1.02, ranked[0]), (0.98, ranked[1]), (1.01, ranked[2])):
        starts.append((nu, float(z)))
    starts = starts[: max(n_starts, 1)]
    box = ParamBox(("nu", "zeta"), (NU_BOUNDS[0], ZETA_BOUNDS[0]), (NU_BOUNDS[1], ZETA_BOUNDS[1]), starts[0])
    runs = []
    for s in starts:
        steps = (0.01, 0.05 * s[1])
        runs.append(nelder_mead(lambda x: e_free(float(x[0]), float(x[1])), box.with_start(s), tol_x, tol_f, max_eval, steps))
    free = _merge(runs)
    nu, z = (float(v) for v in free.best_params)
    free.scf = single_zeta_energy(Z, q, nu, z, alpha, settings)
    return free


def default_double_zeta_starts(Z: float) -> list[tuple]:
    """Starting points (n1*, n2*, zeta1, zeta2) around the screened charge."""
    s = Z - 5.0 / 16.0 if Z > 5.0 / 16.0 else Z
    return [
        (1.0, 1.0, 1.7 * s, 0.9 * s),
        (1.0, 1.0, 1.5 * s, 0.85 * s),
        (1.0, 1.0, 2.0 * s, 0.95 * s),
        (0.98, 1.01, 1.7 * s, 0.86 * s),
        (1.01, 0.998, 1.7 * s, 0.93 * s),
    ]


def optimize_double_zeta(
    Z: float,
    starts: Sequence[Sequence[float]] | None = None,
    settings: ScfSettings = ScfSettings(),
    tol_x: float = DEFAULT_TOL_X,
    tol_f: float = DEFAULT_TOL_F,
    max_eval: int = DEFAULT_MAX_EVAL,
) -> OptResult:
    """Minimize the two-NSTO energy over (n1*, n2*, zeta1, zeta2)."""
    starts = list(starts) if starts is not None else default_double_zeta_starts(Z)
    energy = _safe(lambda n1, n2, z1, z2: double_zeta_energy(Z, [(n1, z1), (n2, z2)], settings))
    box = ParamBox(
        ("n1", "n2", "zeta1", "zeta2"),
        (NSTAR_BOUNDS[0], NSTAR_BOUNDS[0], ZETA_BOUNDS[0], ZETA_BOUNDS[0]),
        (NSTAR_BOUNDS[1], NSTAR_BOUNDS[1], ZETA_BOUNDS[1], ZETA_BOUNDS[1]),
        tuple(float(v) for v in starts[0]),
    )
    runs = [
        nelder_mead(lambda x: energy(*(float(v) for v in x)), box.with_start(s), tol_x, tol_f, max_eval)
        for s in starts
    ]
    best = _merge(runs)
    n1, n2, z1, z2 = (float(v) for v in best.best_params)
    best.scf = double_zeta_energy(Z, [(n1, z1), (n2, z2)], settings)
    return best


__all__ = [
    "NU_BOUNDS",
    "ZETA_BOUNDS",
    "NSTAR_BOUNDS",
    "ParamBox",
    "OptResult",
    "nelder_mead",
    "optimize_single_zeta",
    "optimize_double_zeta",
    "default_double_zeta_starts",
]
