"""Hybrid season-by-season dynamics on a lattice.

Each season applies the growth map node-wise and then integrates
``u_t = d Laplacian u - a . grad u + f(u)`` over ``t in [0, 1]`` with zero
boundary values. Transport is treated with Crank-Nicolson and the reaction
explicitly. Long runs are summarized by an operational verdict: extinction,
persistence, or inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import NumericError, ParameterError
from .geometry import Domain, Grid, rasterize
from .kinetics import GrowthMap, ReactionTerm
from .spectral import SpectralResult, assemble_operator, lambda1_closed, lambda1_numeric
from .thresholds import EXTINCTION, INCONCLUSIVE, PERSISTENCE, viability_margin

__all__ = [
    "FieldState",
    "Tolerances",
    "Classification",
    "SeasonPropagator",
    "propagate_Q",
    "impulse_cycle",
    "iterate_and_classify",
    "linearized_growth_factor",
    "default_initial_state",
    "centered_bump",
    "classify_domain",
]


@dataclass(frozen=True, eq=False)
class FieldState:
    """Density on every lattice node (zero on Dirichlet nodes) at season ``season``."""

    grid: Grid
    values: np.ndarray
    season: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise ParameterError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ParameterError("field values must be finite")
        if np.any(values < 0):
            raise ParameterError("densities must be nonnegative")
        values = np.where(self.grid.interior, values, 0.0)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_interior(cls, grid: Grid, vec, season: int = 0) -> "FieldState":
        return cls(grid, grid.to_full(vec), season)

    @property
    def interior_values(self) -> np.ndarray:
        return self.values[self.grid.interior]

    @property
    def sup(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True)
class Tolerances:
    eps_ext: float = 1e-8
    delta_per: float = 1e-4
    tol_stat: float = 1e-5
    window: int = 10
    max_cycles: int = 200
    fail_below: float = 1e-8

    def __post_init__(self):
        for name in ("eps_ext", "delta_per", "tol_stat", "fail_below"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"tolerance {name} must be positive")
        if self.window < 1 or self.max_cycles < 1:
            raise ParameterError("window and max_cycles must be at least 1")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Classification:
    verdict: str
    growth_factor_estimate: float
    lambda1_used: float
    threshold_margin: float
    cycles_run: int
    final_sup: float
    final_interior_min: float
    rho: float
    sup_history: tuple = field(repr=False, default=())
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "growth_factor": self.growth_factor_estimate,
            "lambda1": self.lambda1_used,
            "threshold_margin": self.threshold_margin,
            "rho": self.rho,
            "cycles": self.cycles_run,
            "final_sup": self.final_sup,
            "final_interior_min": self.final_interior_min,
        }


class SeasonPropagator:
    """Season operator Q on a fixed grid, with the implicit factorization cached.

    One step maps ``u`` to the solution of
    ``(I + dt/2 A) u_new = (I - dt/2 A) u + dt f(u)`` where ``A`` discretizes
    ``-d Laplacian + a . grad``. The step count per season is at least
    ``1/dt`` and at least ``10 |f'(0)|``.
    """

    def __init__(self, grid: Grid, d: float, a, f: ReactionTerm, dt: float = 1e-3,
                 tolerances: Tolerances | None = None):
        if not dt > 0:
            raise ParameterError("time step must be positive")
        self.grid = grid
        self.f = f
        self.tolerances = tolerances or Tolerances()
        A, self.notes = assemble_operator(grid, d, a)
        self.steps = max(int(math.ceil(1.0 / dt - 1e-9)), int(math.ceil(10 * abs(f.fprime0))))
        self.dt = 1.0 / self.steps
        eye = sp.identity(A.shape[0], format="csr")
        self._lu = splu((eye + 0.5 * self.dt * A).tocsc())
        self._explicit = (eye - 0.5 * self.dt * A).tocsr()

    def season(self, u: np.ndarray) -> np.ndarray:
        """Integrate one season from interior values ``u``; returns a new array."""
        dt, f, lu, B = self.dt, self.f, self._lu, self._explicit
        floor = -self.tolerances.fail_below
        u = np.array(u, dtype=float)
        for step in range(self.steps):
            u = lu.solve(B @ u + dt * f(u))
            low = u.min()
            if low < 0:
                if low < floor or not np.isfinite(low):
                    raise NumericError("negative or non-finite density during season", step=step, min=float(low))
                np.maximum(u, 0.0, out=u)
            elif not np.isfinite(u.max()):
                raise NumericError("non-finite density during season", step=step)
        return u

    def cycle(self, u: np.ndarray, g: GrowthMap) -> np.ndarray:
        return self.season(g(u))


def propagate_Q(u0: FieldState, d: float, a, f: ReactionTerm, dt: float = 1e-3,
                propagator: SeasonPropagator | None = None) -> FieldState:
    prop = propagator or SeasonPropagator(u0.grid, d, a, f, dt)
    return FieldState.from_interior(u0.grid, prop.season(u0.interior_values), u0.season)


def impulse_cycle(N_m: FieldState, g: GrowthMap, d: float, a, f: ReactionTerm, dt: float = 1e-3,
                  propagator: SeasonPropagator | None = None) -> FieldState:
    prop = propagator or SeasonPropagator(N_m.grid, d, a, f, dt)
    return FieldState.from_interior(N_m.grid, prop.cycle(N_m.interior_values, g), N_m.season + 1)


def centered_bump(grid: Grid, amplitude: float = 0.1) -> FieldState:
    """Cosine bump over the bounding box of the interior nodes."""
    pts = grid.interior_coordinates()
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    half = np.maximum(0.5 * (hi - lo), 1e-300)
    z = (pts - 0.5 * (lo + hi)) / (half * 1.0001)
    vals = amplitude * np.prod(np.cos(0.5 * np.pi * np.clip(z, -1, 1)), axis=1)
    return FieldState.from_interior(grid, vals)


def default_initial_state(grid: Grid, d: float, a, amplitude: float = 0.1):
    """Principal eigenfunction scaled to ``amplitude``; returns (state, spectral result)."""
    eig = lambda1_numeric(grid, d, a)
    vals = np.clip(eig.eigenfunction, 0.0, None) * amplitude
    return FieldState(grid, vals), eig


def iterate_and_classify(N0: FieldState, g: GrowthMap, d: float, a, f: ReactionTerm,
                         max_cycles: int | None = None, tolerances: Tolerances | None = None,
                         lambda1: float | None = None, probe: np.ndarray | None = None,
                         dt: float = 1e-3) -> Classification:
    """Iterate seasons until the run is extinct, stationary, or out of cycles.

    Extinction: sup-norm below ``eps_ext``. Persistence: over the last
    ``window`` cycles the minimum over the probe nodes stays at least
    ``delta_per`` and the relative change of the sup-norm stays below
    ``tol_stat``. The probe defaults to the nodes where ``N0`` is at least
    half its maximum.
    """
    tol = tolerances or Tolerances()
    if max_cycles is not None:
        tol = replace(tol, max_cycles=int(max_cycles))
    grid = N0.grid
    u = N0.interior_values.copy()
    if not u.max() > 0:
        raise ParameterError("initial density is identically zero")
    if probe is None:
        probe = u >= 0.5 * u.max()
    else:
        probe = np.asarray(probe, dtype=bool)
        if probe.shape == grid.shape:
            probe = probe[grid.interior]
    if not probe.any():
        raise ParameterError("probe region is empty")
    if lambda1 is None:
        lambda1 = lambda1_numeric(grid, d, a).lambda1
    margin = viability_margin(f, g)
    rho = g.gprime0 * math.exp(f.fprime0 - lambda1)

    prop = SeasonPropagator(grid, d, a, f, dt, tol)
    sups = [float(u.max())]
    mins = [float(u[probe].min())]
    verdict = INCONCLUSIVE
    cycles = 0
    for cycles in range(1, tol.max_cycles + 1):
        u = prop.cycle(u, g)
        sups.append(float(u.max()))
        mins.append(float(u[probe].min()))
        if sups[-1] < tol.eps_ext:
            verdict = EXTINCTION
            break
        if cycles >= tol.window:
            recent = np.asarray(sups[-tol.window - 1:])
            change = np.abs(np.diff(recent)) / recent[1:]
            if min(mins[-tol.window:]) >= tol.delta_per and np.all(change < tol.tol_stat):
                verdict = PERSISTENCE
                break
    growth = sups[-1] / sups[-2] if sups[-2] > 0 else 0.0
    return Classification(
        verdict=verdict,
        growth_factor_estimate=growth,
        lambda1_used=float(lambda1),
        threshold_margin=margin - lambda1,
        cycles_run=cycles,
        final_sup=sups[-1],
        final_interior_min=mins[-1],
        rho=rho,
        sup_history=tuple(sups),
        tolerances=tol,
    )


def linearized_growth_factor(d: float, a, domain: Domain, f: ReactionTerm, g: GrowthMap,
                             method: str = "closed", h: float | None = None) -> float:
    """Per-season multiplier g'(0) exp(f'(0) - lambda_1) of the linearized model."""
    if method == "closed":
        lam = lambda1_closed(d, a, domain).lambda1
    elif method == "numeric":
        lam = lambda1_numeric(rasterize(domain, h), d, a).lambda1
    else:
        raise ParameterError(f"unknown eigenvalue method {method!r}")
    return g.gprime0 * math.exp(f.fprime0 - lam)


def classify_domain(domain: Domain, g: GrowthMap, d: float, a, f: ReactionTerm, h: float | None = None,
                    dt: float = 1e-3, tolerances: Tolerances | None = None, amplitude: float = 0.1,
                    max_cycles: int | None = None) -> tuple[Classification, SpectralResult]:
    """Rasterize, seed with the scaled principal eigenfunction, and classify."""
    grid = rasterize(domain, h)
    N0, eig = default_initial_state(grid, d, a, amplitude)
    result = iterate_and_classify(N0, g, d, a, f, max_cycles=max_cycles, tolerances=tolerances,
                                  lambda1=eig.lambda1, dt=dt)
    return result, eig
