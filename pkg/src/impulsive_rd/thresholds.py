"""Critical habitat sizes, extreme volumes and the application presets.

Every size is driven by the viability margin ``f'(0) + ln g'(0)``: a habitat
supports the population when its principal eigenvalue lies below the margin.
Quantities that become unbounded are reported as ``math.inf`` with the regime
note ``"arbitrarily large"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .kinetics import BevertonHolt, GrowthMap, LinearMap, LinearReaction, Logistic, ReactionTerm, Ricker
from .spectral import ball_bessel_zero

__all__ = [
    "ThresholdReport",
    "viability_margin",
    "critical_rect_constraint",
    "critical_hypercube_L",
    "critical_radius_ball",
    "extreme_volume",
    "fisher_speeds",
    "fisher_critical_length",
    "application_preset",
    "predict_rect",
    "predict_volume",
    "EXTINCTION",
    "PERSISTENCE",
    "INCONCLUSIVE",
]

FINITE = "finite"
UNBOUNDED = "arbitrarily large"

EXTINCTION = "Extinction"
PERSISTENCE = "Persistence"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ThresholdReport:
    kind: str
    value: float
    regime: str = FINITE
    inputs: dict = field(default_factory=dict)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def to_dict(self) -> dict:
        value = self.value if math.isfinite(self.value) else str(self.value)
        return {"kind": self.kind, "value": value, "regime": self.regime, "inputs": dict(self.inputs)}


def viability_margin(f: ReactionTerm, g: GrowthMap) -> float:
    return f.fprime0 + math.log(g.gprime0)


def _drift_sq(a) -> float:
    if a is None:
        return 0.0
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return float(a @ a)


def _check_d(d):
    if not (d > 0 and math.isfinite(d)):
        raise ParameterError("diffusivity must be positive")


def _echo(d, a, f, g, **extra):
    out = {
        "d": d,
        "a": None if a is None else [float(v) for v in np.atleast_1d(a)],
        "fprime0": f.fprime0,
        "gprime0": g.gprime0,
    }
    out.update(extra)
    return out


def critical_rect_constraint(d: float, a, f: ReactionTerm, g: GrowthMap) -> ThresholdReport:
    """Target S* for sum 1/L_i^2; boxes with a larger sum go extinct."""
    _check_d(d)
    excess = viability_margin(f, g) - _drift_sq(a) / (4 * d)
    inputs = _echo(d, a, f, g, method="rect")
    if excess <= 0:
        return ThresholdReport("LengthConstraint", math.inf, UNBOUNDED, inputs)
    return ThresholdReport("LengthConstraint", excess / (d * math.pi**2), FINITE, inputs)


def _hypercube_L(d, a, margin, n, inputs):
    radicand = 4 * d * margin - _drift_sq(a)
    if radicand <= 0:
        return ThresholdReport("CriticalLength", math.inf, UNBOUNDED, inputs)
    return ThresholdReport("CriticalLength", 2 * math.pi * d * math.sqrt(n / radicand), FINITE, inputs)


def _ball_radius(d, margin, n, inputs):
    if margin <= 0:
        return ThresholdReport("CriticalRadius", math.inf, UNBOUNDED, inputs)
    return ThresholdReport("CriticalRadius", ball_bessel_zero(n) * math.sqrt(d / margin), FINITE, inputs)


def critical_hypercube_L(d: float, a, f: ReactionTerm, g: GrowthMap, n: int) -> ThresholdReport:
    _check_d(d)
    if n < 1:
        raise ParameterError("dimension must be at least 1")
    return _hypercube_L(d, a, viability_margin(f, g), n, _echo(d, a, f, g, n=n, method="rect"))


def fisher_critical_length(d: float, fprime0: float, a: float = 0.0) -> float:
    """One-dimensional Fisher critical length 2 pi d / sqrt(4 d f'(0) - a^2)."""
    radicand = 4 * d * fprime0 - a * a
    return 2 * math.pi * d / math.sqrt(radicand) if radicand > 0 else math.inf


def critical_radius_ball(d: float, f: ReactionTerm, g: GrowthMap, n: int) -> ThresholdReport:
    _check_d(d)
    return _ball_radius(d, viability_margin(f, g), n, _echo(d, None, f, g, n=n, method="ball"))


def extreme_volume(method: str, d: float, a, f: ReactionTerm, g: GrowthMap, n: int) -> ThresholdReport:
    """Volume below which every habitat of the given class goes extinct.

    ``method`` is ``"RFK"`` (Faber-Krahn, any smooth domain, divergence-free
    drift), ``"LiYau"`` (same class, Bessel-free and smaller) or ``"Rect"``
    (boxes with constant drift).
    """
    _check_d(d)
    margin = viability_margin(f, g)
    key = method.lower()
    inputs = _echo(d, a, f, g, n=n, method=method)
    if key == "rect":
        radicand = 4 * d * margin - _drift_sq(a)
        if radicand <= 0:
            return ThresholdReport("ExtremeVolume", math.inf, UNBOUNDED, inputs)
        return ThresholdReport("ExtremeVolume", (4 * d * d * math.pi**2 * n / radicand) ** (n / 2), FINITE, inputs)
    if key not in ("rfk", "liyau"):
        raise ParameterError(f"unknown extreme-volume method {method!r}")
    if margin <= 0:
        raise ParameterError("extreme volume is undefined for a nonpositive viability margin")
    if key == "rfk":
        j = ball_bessel_zero(n)
        value = (d * math.pi * j * j / margin) ** (n / 2) / math.gamma(1 + n / 2)
    else:
        value = math.gamma(1 + n / 2) * (4 * d * n * math.pi / ((n + 2) * margin)) ** (n / 2)
    return ThresholdReport("ExtremeVolume", value, FINITE, inputs)


def fisher_speeds(d: float, f: ReactionTerm, a: float = 0.0) -> tuple[float, float]:
    """Rightward and leftward spreading speeds 2 sqrt(d f'(0)) +/- a."""
    _check_d(d)
    if f.fprime0 <= 0:
        raise ParameterError("spreading speeds need f'(0) > 0")
    c = 2 * math.sqrt(d * f.fprime0)
    return c + a, c - a


# ---------------------------------------------------------------------------
# predictions from the theorems (no simulation)
# ---------------------------------------------------------------------------


def predict_rect(d: float, a, f: ReactionTerm, g: GrowthMap, lengths) -> str:
    """Extinction / Persistence / Inconclusive for a box from its exact eigenvalue."""
    lam = _drift_sq(a) / (4 * d) + d * math.pi**2 * sum(1.0 / L**2 for L in lengths)
    margin = viability_margin(f, g)
    if lam > margin:
        return EXTINCTION
    if lam < margin:
        return PERSISTENCE
    return INCONCLUSIVE


def predict_volume(volume: float, report: ThresholdReport) -> str:
    """Only extinction can be certified from volume alone."""
    return EXTINCTION if volume < report.value else INCONCLUSIVE


# ---------------------------------------------------------------------------
# application presets
# ---------------------------------------------------------------------------


def _require(cond, message):
    if not cond:
        raise ParameterError(message)


def _marine(gamma, d=1.0, a=None, n=2, lam=None, r=None, area=None):
    _require(gamma >= 0, "mortality gamma must be nonnegative")
    _require(n in (2, 3), "marine presets are defined for n = 2 or 3")
    _require((lam is None) != (r is None), "give exactly one of lam (Beverton-Holt) or r (Ricker)")
    _check_d(d)
    g = BevertonHolt(lam) if lam is not None else Ricker(r)
    margin = math.log(g.gprime0) - gamma
    inputs = {"d": d, "a": None if a is None else [float(v) for v in np.atleast_1d(a)],
              "gamma": gamma, "gprime0": g.gprime0, "n": n}
    out = {
        "L_star": _hypercube_L(d, a, margin, n, inputs),
        "R_star": _ball_radius(d, margin, n, inputs),
    }
    if area is not None:
        _require(area > 0, "area must be positive")
        # extinction for every smooth domain of this size once gamma exceeds gamma_ex
        if n == 2:
            shift = d * math.pi * ball_bessel_zero(2) ** 2 / area
        else:
            shift = d * (4 * math.pi**4 / (3 * area)) ** (2 / 3)
        out["gamma_ex"] = ThresholdReport(
            "PresetParameter", math.log(g.gprime0) - shift, FINITE,
            {"d": d, "area": area, "n": n, "rule": "extinction for gamma > gamma_ex"},
        )
    return out


def _terrestrial(L1, L2, lam, gamma, area=None):
    _require(L1 > 0 and L2 > 0, "side lengths must be positive")
    _require(lam > 0 and gamma >= 0, "need lambda > 0 and gamma >= 0")
    margin = math.log1p(lam) - gamma
    _require(margin > 0, "terrestrial preset needs ln(1 + lambda) > gamma")
    area = L1 * L2 if area is None else area
    j = ball_bessel_zero(2)
    inputs = {"L1": L1, "L2": L2, "lam": lam, "gamma": gamma, "area": area}
    return {
        "d_star": ThresholdReport(
            "PresetParameter", margin / math.pi**2 * L1**2 * L2**2 / (L1**2 + L2**2), FINITE,
            dict(inputs, rule="extinction for d > d_star, persistence for d < d_star"),
        ),
        "d_ex": ThresholdReport(
            "PresetParameter", area * margin / (math.pi * j * j), FINITE,
            dict(inputs, rule="extinction for d > d_ex on any smooth domain of this area"),
        ),
    }


def _insect(d, r, L1, L2, area=None):
    _check_d(d)
    _require(r > 0 and L1 > 0 and L2 > 0, "need r, L1, L2 > 0")
    area = L1 * L2 if area is None else area
    j = ball_bessel_zero(2)
    lam_rect = d * math.pi**2 * (L1**2 + L2**2) / (L1**2 * L2**2)
    lam_fk = d * math.pi * j * j / area
    inputs = {"d": d, "r": r, "L1": L1, "L2": L2, "area": area}

    def report(lam, rule):
        s = -math.expm1(lam - r)
        regime = FINITE if 0 < s < 1 else "extinction for every s in (0, 1)"
        return ThresholdReport("PresetParameter", s, regime, dict(inputs, rule=rule))

    return {
        "s_star": report(lam_rect, "extinction for s > s_star, persistence for s < s_star"),
        "s_ex": report(lam_fk, "extinction for s > s_ex on any smooth domain of this area"),
    }


def _climate(d, lam, gamma, L1, L2):
    _check_d(d)
    _require(L1 > 0 and L2 > 0 and lam > 0 and gamma >= 0, "need L1, L2, lambda > 0 and gamma >= 0")
    c2 = 4 * d * (math.log1p(lam) - gamma) - (2 * d * math.pi) ** 2 * (L1**2 + L2**2) / (L1**2 * L2**2)
    inputs = {"d": d, "lam": lam, "gamma": gamma, "L1": L1, "L2": L2}
    if c2 <= 0:
        return {"c_max": ThresholdReport("PresetParameter", math.nan, "no persistence possible", inputs)}
    return {
        "c_max": ThresholdReport(
            "Speed", math.sqrt(c2), FINITE, dict(inputs, rule="persistence needs |c| < c_max")
        )
    }


_PRESETS = {
    "marine": _marine,
    "marinereserve": _marine,
    "terrestrial": _terrestrial,
    "terrestrialreserve": _terrestrial,
    "insect": _insect,
    "insectpest": _insect,
    "climate": _climate,
    "climatechange": _climate,
}


def application_preset(preset: str, **params) -> dict[str, ThresholdReport]:
    """Threshold reports for one of the four biological scenarios.

    marine:      gamma, lam | r, d=1, a=None, n=2, area=None
    terrestrial: L1, L2, lam, gamma, area=None
    insect:      d, r, L1, L2, area=None
    climate:     d, lam, gamma, L1, L2
    """
    fn = _PRESETS.get(preset.replace("_", "").replace("-", "").lower())
    if fn is None:
        raise ParameterError(f"unknown preset {preset!r}")
    try:
        return fn(**params)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for preset {preset!r}: {exc}") from exc


def preset_kinetics(preset: str, **params):
    """(f, g) pair used by a preset, for simulation."""
    key = preset.replace("_", "").replace("-", "").lower()
    if key.startswith("marine") or key.startswith("terrestrial") or key.startswith("climate"):
        g = Ricker(params["r"]) if params.get("r") is not None else BevertonHolt(params["lam"])
        return LinearReaction(-params["gamma"]), g
    if key.startswith("insect"):
        return Logistic(params["r"]), LinearMap(1 - params["s"])
    raise ParameterError(f"unknown preset {preset!r}")
