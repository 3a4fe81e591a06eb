"""Between-season growth maps, within-season reaction terms, and the
nonspatial recurrence they generate.

A season starts with the impulsive map ``u(0) = g(N_m)`` and is followed by
``u' = f(u)`` on ``t in [0, 1]``; the end-of-season density is ``N_{m+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize

from .errors import DivergenceError, DomainError, ParameterError, SingularIntegrandError

__all__ = [
    "GrowthMap",
    "LinearMap",
    "Ricker",
    "BevertonHolt",
    "Skellam",
    "ReactionTerm",
    "Logistic",
    "LinearReaction",
    "QuadraticGrowth",
    "Viability",
    "eval_growth",
    "gprime_at_zero",
    "check_viability",
    "solve_equilibrium",
    "equilibrium_residual",
    "iterate_nonspatial",
    "parse_growth_map",
    "parse_reaction",
]


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# growth maps g
# ---------------------------------------------------------------------------


class GrowthMap:
    """Base class; subclasses are frozen dataclasses holding the parameters."""

    family = ""

    def __call__(self, N):
        raise NotImplementedError

    @property
    def gprime0(self) -> float:
        raise NotImplementedError

    @property
    def monotone_limit(self) -> float:
        """Upper end M of the interval [0, M] on which g is nondecreasing."""
        return math.inf

    @property
    def h_coefficient(self) -> float:
        """c in the quadratic witness h(N) = c N^2 of g(N) >= g'(0) N - h(N)."""
        return 0.0

    def witness(self, N):
        return self.h_coefficient * np.square(N)

    def params(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def spec(self) -> str:
        return f"{self.family}:" + ",".join(repr(v) for v in self.params().values())


@dataclass(frozen=True)
class LinearMap(GrowthMap):
    b: float
    family = "linear"

    def __post_init__(self):
        _positive("b", self.b)

    def __call__(self, N):
        return self.b * N

    @property
    def gprime0(self):
        return float(self.b)


@dataclass(frozen=True)
class Ricker(GrowthMap):
    r: float
    family = "ricker"

    def __post_init__(self):
        _positive("r", self.r)

    def __call__(self, N):
        return N * np.exp(self.r * (1.0 - N))

    @property
    def gprime0(self):
        return math.exp(self.r)

    @property
    def monotone_limit(self):
        return 1.0 / self.r

    @property
    def h_coefficient(self):
        # e^{-rN} >= 1 - rN
        return self.r * math.exp(self.r)


@dataclass(frozen=True)
class BevertonHolt(GrowthMap):
    lam: float
    family = "beverton_holt"

    def __post_init__(self):
        _positive("lambda", self.lam)

    def __call__(self, N):
        return (1.0 + self.lam) * N / (1.0 + self.lam * N)

    @property
    def gprime0(self):
        return 1.0 + self.lam

    @property
    def h_coefficient(self):
        # 1/(1 + lam N) >= 1 - lam N
        return self.lam * (1.0 + self.lam)


@dataclass(frozen=True)
class Skellam(GrowthMap):
    R: float
    b: float
    family = "skellam"

    def __post_init__(self):
        _positive("R", self.R)
        _positive("b", self.b)

    def __call__(self, N):
        return self.R * -np.expm1(-self.b * N)

    @property
    def gprime0(self):
        return self.R * self.b

    @property
    def h_coefficient(self):
        # 1 - e^{-x} >= x - x^2/2
        return 0.5 * self.R * self.b**2


# ---------------------------------------------------------------------------
# reaction terms f
# ---------------------------------------------------------------------------


class ReactionTerm:
    family = ""

    def __call__(self, u):
        raise NotImplementedError

    @property
    def fprime0(self) -> float:
        raise NotImplementedError

    @property
    def h_coefficient(self) -> float:
        """Coefficient of the quadratic witness in f'(0) N - h(N) <= f(N)."""
        return 0.0

    def witness(self, N):
        return self.h_coefficient * np.square(N)

    def params(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def spec(self) -> str:
        return f"{self.family}:" + ",".join(repr(v) for v in self.params().values())


@dataclass(frozen=True)
class Logistic(ReactionTerm):
    """f(u) = r u (1 - u)."""

    r: float
    family = "logistic"

    def __post_init__(self):
        _positive("r", self.r)

    def __call__(self, u):
        return self.r * u * (1.0 - u)

    @property
    def fprime0(self):
        return float(self.r)

    @property
    def h_coefficient(self):
        return float(self.r)


@dataclass(frozen=True)
class LinearReaction(ReactionTerm):
    """f(u) = b u with b of either sign."""

    b: float
    family = "linear"

    def __post_init__(self):
        if not math.isfinite(self.b) or self.b == 0:
            raise ParameterError("linear reaction needs a finite nonzero rate")

    def __call__(self, u):
        return self.b * u

    @property
    def fprime0(self):
        return float(self.b)


@dataclass(frozen=True)
class QuadraticGrowth(ReactionTerm):
    """f(u) = alpha u - beta u^2."""

    alpha: float
    beta: float
    family = "quadratic"

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha == 0:
            raise ParameterError("alpha must be finite and nonzero")
        _positive("beta", self.beta)

    def __call__(self, u):
        return self.alpha * u - self.beta * u * u

    @property
    def fprime0(self):
        return float(self.alpha)

    @property
    def h_coefficient(self):
        return float(self.beta)


# ---------------------------------------------------------------------------
# textual specs, e.g. "ricker:1" or "quadratic:1,0.5"
# ---------------------------------------------------------------------------

_GROWTH_FAMILIES = {
    "linear": LinearMap,
    "ricker": Ricker,
    "beverton_holt": BevertonHolt,
    "bevertonholt": BevertonHolt,
    "bh": BevertonHolt,
    "skellam": Skellam,
}

_REACTION_FAMILIES = {
    "logistic": Logistic,
    "linear": LinearReaction,
    "quadratic": QuadraticGrowth,
}


def _parse(spec, table, what):
    if not isinstance(spec, str) or ":" not in spec:
        raise ParameterError(f"{what} spec must look like family:p1[,p2], got {spec!r}")
    name, _, args = spec.partition(":")
    cls = table.get(name.strip().lower())
    if cls is None:
        raise ParameterError(f"unknown {what} family {name!r}; choose from {sorted(set(table))}")
    try:
        values = [float(v) for v in args.split(",") if v.strip()]
    except ValueError as exc:
        raise ParameterError(f"bad {what} parameters in {spec!r}") from exc
    try:
        return cls(*values)
    except TypeError as exc:
        raise ParameterError(f"wrong number of parameters for {what} {name!r}") from exc


def parse_growth_map(spec: str) -> GrowthMap:
    return _parse(spec, _GROWTH_FAMILIES, "growth map")


def parse_reaction(spec: str) -> ReactionTerm:
    return _parse(spec, _REACTION_FAMILIES, "reaction term")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def eval_growth(g: GrowthMap, N):
    """Evaluate g at a nonnegative density (scalar or array)."""
    arr = np.asarray(N, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("growth maps are defined for nonnegative densities only")
    out = g(arr)
    return float(out) if out.ndim == 0 else out


def gprime_at_zero(g: GrowthMap) -> float:
    return g.gprime0


class Viability(NamedTuple):
    viable: bool
    margin: float


def check_viability(f: ReactionTerm, g: GrowthMap) -> Viability:
    """Test e^{f'(0)} g'(0) > 1 in its logarithmic form."""
    margin = f.fprime0 + math.log(g.gprime0)
    return Viability(margin > 0, margin)


def _season_integral(f, lower, upper, epsabs=1e-12):
    """Integral of 1/f over [lower, upper] (signed); raises if f vanishes inside."""
    if lower == upper:
        return 0.0
    lo, hi = min(lower, upper), max(lower, upper)
    sampled = f(np.linspace(lo, hi, 257))
    # a sign change means a zero between samples even if none is hit exactly
    if np.any(np.abs(sampled) < 1e-14) or np.any(np.sign(sampled) != np.sign(sampled[0])):
        raise SingularIntegrandError(
            "reaction term vanishes on the integration interval", interval=(lo, hi)
        )
    try:
        value, _ = integrate.quad(lambda w: 1.0 / f(w), lower, upper, epsabs=epsabs, epsrel=1e-13, limit=200)
    except ZeroDivisionError as exc:
        raise SingularIntegrandError("reaction term vanishes inside the interval", interval=(lo, hi)) from exc
    return value


def equilibrium_residual(f: ReactionTerm, g: GrowthMap, N: float) -> float:
    """int_{g(N)}^{N} dw / f(w) - 1."""
    return _season_integral(f, float(g(N)), float(N)) - 1.0


def solve_equilibrium(f: ReactionTerm, g: GrowthMap, n_max: float | None = None, samples: int = 400):
    """Smallest positive constant equilibrium of the nonspatial recurrence.

    Scans (0, n_max] for a sign change of the season-integral residual and
    refines it with Brent's method. Returns None when no bracket exists.
    """
    if not check_viability(f, g).viable:
        return None
    if n_max is None:
        n_max = 10.0 * max(1.0, 1.0 / g.gprime0)
    grid = np.geomspace(n_max * 1e-6, n_max, samples)

    def residual(N):
        try:
            return equilibrium_residual(f, g, N)
        except SingularIntegrandError:
            return math.nan

    points = []
    for a, b in zip(grid, grid[1:]):
        points.append(a)
        if not math.isnan(residual(a)) and math.isnan(residual(b)):
            # approach the singular point geometrically so a root next to it is bracketed
            points.extend(b - (b - a) * 0.5**k for k in range(1, 48))
    points.append(grid[-1])
    grid = points
    values = [residual(N) for N in grid]
    for (a, fa), (b, fb) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if math.isnan(fa) or math.isnan(fb) or fa * fb > 0:
            continue
        if fa == 0:
            return float(a)
        try:
            root = optimize.brentq(residual, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        except ValueError:
            continue
        # a jump across a singular point can masquerade as a sign change
        if abs(residual(root)) <= 1e-10:
            return float(root)
    return None


def _rk4_season(f, u, dt, steps):
    for _ in range(steps):
        k1 = f(u)
        k2 = f(u + 0.5 * dt * k1)
        k3 = f(u + 0.5 * dt * k2)
        k4 = f(u + dt * k3)
        u = u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not abs(u) <= 1e12:
            raise DivergenceError("nonspatial trajectory blew up", value=u)
    return u


def iterate_nonspatial(f: ReactionTerm, g: GrowthMap, N0: float, cycles: int, dt: float = 1e-3) -> list[float]:
    """Return [N_0, N_1, ..., N_cycles] of the nonspatial impulsive recurrence."""
    if N0 < 0:
        raise DomainError("initial density must be nonnegative")
    steps = int(round(1.0 / dt))
    dt = 1.0 / steps
    out = [float(N0)]
    N = float(N0)
    for _ in range(cycles):
        N = _rk4_season(f, float(g(N)), dt, steps)
        out.append(N)
    return out
