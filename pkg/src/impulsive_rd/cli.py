"""Command-line front end.

    impulsive-rd eigen    --domain rect:1,1 --d 1
    impulsive-rd critical --preset marine --gamma 0.5 --lambda 1.71828 --n 2
    impulsive-rd classify --domain rect:5.65,5.65 --f linear:-0.5 --g ricker:1
    impulsive-rd sweep    --domain rect:0.3 --d 0.01 --f logistic:1 --g linear:1 \\
                          --axis L:0.157:0.471:11 --csv sweep.csv

Every subcommand writes a JSON report (stdout, or ``--out``). Exit status is
0 on success, 2 for invalid input, 3 for numerical or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericError, ParameterError
from .geometry import Ball, HyperRect, Masked, parse_domain, rasterize, volume
from .kinetics import parse_growth_map, parse_reaction
from .simulation import (
    SeasonPropagator,
    Tolerances,
    default_initial_state,
    iterate_and_classify,
)
from .spectral import lambda1_closed, lambda1_numeric, liyau_bound, rfk_bound
from .thresholds import (
    application_preset,
    critical_hypercube_L,
    critical_radius_ball,
    critical_rect_constraint,
    extreme_volume,
    predict_rect,
    predict_volume,
)

COMMANDS = ("eigen", "critical", "volume", "simulate", "classify", "preset", "sweep")
AXIS_NAMES = ("L", "L1", "L2", "L3", "R", "d", "a", "a1", "a2", "a3", "c")
GRID_CELLS = 32


@dataclasses.dataclass
class RunConfig:
    command: str
    domain: str | None = None
    d: float = 1.0
    a: list | None = None
    f: str | None = None
    g: str | None = None
    n: int | None = None
    h: float | None = None
    dt: float = 1e-3
    max_cycles: int = 200
    cycles: int = 10
    eps_ext: float = 1e-8
    delta_per: float = 1e-4
    tol_stat: float = 1e-5
    window: int = 10
    eig_tol: float = 1e-6
    numeric: bool = True
    preset: str | None = None
    preset_params: dict = dataclasses.field(default_factory=dict)
    axes: list = dataclasses.field(default_factory=list)
    jobs: int = 1
    out: str | None = None
    field: str | None = None
    csv: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ParameterError(f"unknown command {self.command!r}")
        for name in ("d", "dt", "eps_ext", "delta_per", "tol_stat", "eig_tol"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise ParameterError(f"{name} must be a positive number")
        for name in ("max_cycles", "cycles", "window", "jobs"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be at least 1")
        if self.h is not None and not self.h > 0:
            raise ParameterError("h must be positive")
        if self.domain is not None:
            kind, _, rest = self.domain.partition(":")
            if kind == "mask" and not Path(rest).is_file():
                raise ParameterError(f"mask file not found: {rest}")
            dim = parse_domain(self.domain).dim
            if self.a is not None and len(self.a) not in (dim,) and any(self.a):
                raise ParameterError(f"drift has {len(self.a)} components, domain is {dim}-dimensional")
        if self.f is not None:
            parse_reaction(self.f)
        if self.g is not None:
            parse_growth_map(self.g)
        if self.command == "sweep":
            parse_axes(self.axes)

    # derived objects -------------------------------------------------------

    def domain_obj(self):
        if self.domain is None:
            raise ParameterError("--domain is required for this command")
        return parse_domain(self.domain)

    def kinetics(self):
        if self.f is None or self.g is None:
            raise ParameterError("--f and --g are required for this command")
        return parse_reaction(self.f), parse_growth_map(self.g)

    def drift(self, dim):
        if self.a is None or not any(self.a):
            return np.zeros(dim)
        if len(self.a) != dim:
            raise ParameterError(f"drift has {len(self.a)} components, expected {dim}")
        return np.asarray(self.a, dtype=float)

    def dimension(self):
        if self.n is not None:
            return int(self.n)
        if self.domain is not None:
            return self.domain_obj().dim
        if self.a is not None:
            return len(self.a)
        raise ParameterError("give --n, --domain or --a to fix the dimension")

    def tolerances(self) -> Tolerances:
        return Tolerances(self.eps_ext, self.delta_per, self.tol_stat, int(self.window), int(self.max_cycles))

    def grid(self):
        dom = self.domain_obj()
        if isinstance(dom, Masked):
            return rasterize(dom)
        return rasterize(dom, self.h if self.h is not None else default_spacing(dom))


def default_spacing(dom) -> float:
    if isinstance(dom, HyperRect):
        return min(dom.lengths) / GRID_CELLS
    if isinstance(dom, Ball):
        return 2 * dom.radius / GRID_CELLS
    return dom.spacing


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def parse_axes(specs):
    if not 1 <= len(specs) <= 2:
        raise ParameterError("a sweep needs one or two --axis NAME:MIN:MAX:STEPS")
    axes = []
    for spec in specs:
        parts = spec.split(":")
        if len(parts) != 4 or parts[0] not in AXIS_NAMES:
            raise ParameterError(f"bad axis {spec!r}; use NAME:MIN:MAX:STEPS with NAME in {AXIS_NAMES}")
        try:
            lo, hi, steps = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ParameterError(f"bad axis {spec!r}") from exc
        if steps < 1 or hi < lo:
            raise ParameterError(f"axis {spec!r} needs steps >= 1 and max >= min")
        axes.append((parts[0], np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])))
    names = [n for n, _ in axes]
    groups = [{"L", "L1", "L2", "L3", "R"}, {"a", "a1", "a2", "a3", "c"}]
    if len(set(names)) != len(names):
        raise ParameterError("duplicate sweep axes")
    for grp in groups:
        hit = [n for n in names if n in grp]
        if len(hit) > 1 and ("L" in hit or "a" in hit or "c" in hit or "R" in hit):
            raise ParameterError(f"conflicting sweep axes {hit}")
    return axes


def _apply_axis(cfg: RunConfig, name: str, value: float) -> RunConfig:
    dom = cfg.domain_obj() if cfg.domain else None
    if name == "d":
        return dataclasses.replace(cfg, d=value)
    if name in ("L", "L1", "L2", "L3"):
        if not isinstance(dom, HyperRect):
            raise ParameterError(f"axis {name} needs a rect domain")
        lengths = list(dom.lengths)
        if name == "L":
            lengths = [value] * len(lengths)
        else:
            k = int(name[1]) - 1
            if k >= len(lengths):
                raise ParameterError(f"axis {name} exceeds domain dimension")
            lengths[k] = value
        return dataclasses.replace(cfg, domain="rect:" + ",".join(repr(float(v)) for v in lengths))
    if name == "R":
        if not isinstance(dom, Ball):
            raise ParameterError("axis R needs a ball domain")
        return dataclasses.replace(cfg, domain=f"ball:{value!r}@{dom.dim}")
    dim = cfg.dimension()
    a = list(cfg.drift(dim))
    if name == "a":
        a[0] = value
    elif name == "c":
        a[0] = -value
    else:
        k = int(name[1]) - 1
        if k >= dim:
            raise ParameterError(f"axis {name} exceeds domain dimension")
        a[k] = value
    return dataclasses.replace(cfg, a=[float(v) for v in a])


def _classify_point(cfg: RunConfig) -> dict:
    f, g = cfg.kinetics()
    grid = cfg.grid()
    a = cfg.drift(grid.dim)
    N0, eig = default_initial_state(grid, cfg.d, a)
    cls = iterate_and_classify(N0, g, cfg.d, a, f, tolerances=cfg.tolerances(), lambda1=eig.lambda1, dt=cfg.dt)
    return {"lambda1": eig.lambda1, "residual": eig.residual, "classification": cls}


def _sweep_point(args):
    cfg, names, values = args
    for name, value in zip(names, values):
        cfg = _apply_axis(cfg, name, float(value))
    res = _classify_point(cfg)
    c = res["classification"]
    return [*(float(v) for v in values), res["lambda1"], c.rho, c.verdict, c.growth_factor_estimate,
            c.cycles_run, c.threshold_margin]


def run_sweep(cfg: RunConfig):
    """Classify every point of the axis grid; rows come back in lexicographic order."""
    axes = parse_axes(cfg.axes)
    names = [n for n, _ in axes]
    points = list(itertools.product(*(vals for _, vals in axes)))
    tasks = [(cfg, names, p) for p in points]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=int(cfg.jobs)) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    header = [*names, "lambda1", "rho", "verdict", "growth_factor", "cycles", "threshold_margin"]
    return header, rows


# ---------------------------------------------------------------------------
# emitters
# ---------------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    return obj


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def write_field(path, grid, values) -> None:
    coords = [c.ravel() for c in grid.coordinates()]
    names = ["x", "y", "z"][: grid.dim]
    rows = zip(*coords, np.asarray(values).ravel())
    write_csv(path, [*names, "value"], rows)


def emit_report(report: dict, cfg: RunConfig) -> str:
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    return text


def _base_report(cfg: RunConfig) -> dict:
    return {
        "config": cfg.to_dict(),
        "lambda1": None,
        "thresholds": {},
        "classification": None,
        "provenance": {
            "version": __version__,
            "tolerances": {**cfg.tolerances().to_dict(), "eig_tol": cfg.eig_tol, "dt": cfg.dt},
        },
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_eigen(cfg: RunConfig) -> dict:
    report = _base_report(cfg)
    dom = cfg.domain_obj()
    a = cfg.drift(dom.dim)
    closed = None
    try:
        closed = lambda1_closed(cfg.d, a, dom)
    except ParameterError:
        pass
    numeric = None
    if cfg.numeric or closed is None:
        numeric = lambda1_numeric(cfg.grid(), cfg.d, a, tol=cfg.eig_tol)
        if cfg.field:
            write_field(cfg.field, numeric.grid, numeric.eigenfunction)
    best = closed or numeric
    report["lambda1"] = {"value": best.lambda1, "method": best.method, "residual": best.residual}
    if numeric is not None:
        report["lambda1"]["numeric"] = {
            "value": numeric.lambda1, "residual": numeric.residual, "spacing": list(numeric.spacing),
            "iterations": numeric.iterations, "notes": list(numeric.notes),
        }
    report["thresholds"] = {
        "volume": volume(dom),
        "rfk_bound": rfk_bound(cfg.d, dom).lambda1,
        "liyau_bound": liyau_bound(1, cfg.d, dom).lambda1,
    }
    return report


def _preset_params(cfg: RunConfig) -> dict:
    params = {k: v for k, v in cfg.preset_params.items() if v is not None}
    key = (cfg.preset or "").lower()
    if key.startswith(("marine", "insect", "climate")):
        params.setdefault("d", cfg.d)
    if key.startswith("marine"):
        params.setdefault("n", cfg.n or 2)
        if cfg.a is not None:
            params.setdefault("a", cfg.a)
    return params


def cmd_preset(cfg: RunConfig) -> dict:
    if not cfg.preset:
        raise ParameterError("--preset is required")
    report = _base_report(cfg)
    reports = application_preset(cfg.preset, **_preset_params(cfg))
    report["thresholds"] = {k: r.to_dict() for k, r in reports.items()}
    return report


def cmd_critical(cfg: RunConfig) -> dict:
    if cfg.preset:
        return cmd_preset(cfg)
    report = _base_report(cfg)
    f, g = cfg.kinetics()
    n = cfg.dimension()
    a = cfg.drift(n)
    th = {
        "S_star": critical_rect_constraint(cfg.d, a, f, g).to_dict(),
        "L_star": critical_hypercube_L(cfg.d, a, f, g, n).to_dict(),
        "R_star": critical_radius_ball(cfg.d, f, g, n).to_dict(),
    }
    if cfg.domain:
        dom = cfg.domain_obj()
        if isinstance(dom, HyperRect):
            th["prediction"] = predict_rect(cfg.d, a, f, g, dom.lengths)
    report["thresholds"] = th
    return report


def cmd_volume(cfg: RunConfig) -> dict:
    report = _base_report(cfg)
    f, g = cfg.kinetics()
    n = cfg.dimension()
    a = cfg.drift(n)
    th = {"Rect": extreme_volume("Rect", cfg.d, a, f, g, n).to_dict()}
    for method in ("RFK", "LiYau"):
        try:
            th[method] = extreme_volume(method, cfg.d, a, f, g, n).to_dict()
        except ParameterError as exc:
            th[method] = {"kind": "ExtremeVolume", "value": None, "regime": str(exc)}
    if cfg.domain:
        dom = cfg.domain_obj()
        vol = volume(dom)
        th["domain_volume"] = vol
        rfk = extreme_volume("RFK", cfg.d, a, f, g, n) if th["RFK"]["value"] is not None else None
        th["prediction"] = predict_volume(vol, rfk) if rfk is not None else "Extinction"
    report["thresholds"] = th
    return report


def cmd_simulate(cfg: RunConfig) -> dict:
    report = _base_report(cfg)
    f, g = cfg.kinetics()
    grid = cfg.grid()
    a = cfg.drift(grid.dim)
    N0, eig = default_initial_state(grid, cfg.d, a)
    prop = SeasonPropagator(grid, cfg.d, a, f, cfg.dt, cfg.tolerances())
    u = N0.interior_values
    rows = [(0, float(u.max()), float(u.sum() * grid.cell_volume))]
    for m in range(1, int(cfg.cycles) + 1):
        u = prop.cycle(u, g)
        rows.append((m, float(u.max()), float(u.sum() * grid.cell_volume)))
    if cfg.csv:
        write_csv(cfg.csv, ["season", "sup", "mass"], rows)
    if cfg.field:
        write_field(cfg.field, grid, grid.to_full(u))
    report["lambda1"] = {"value": eig.lambda1, "method": eig.method, "residual": eig.residual}
    rho = g.gprime0 * math.exp(f.fprime0 - eig.lambda1)
    report["thresholds"] = {"rho": rho}
    report["trajectory"] = {"seasons": int(cfg.cycles), "final_sup": rows[-1][1], "final_mass": rows[-1][2],
                            "last_ratio": rows[-1][1] / rows[-2][1] if rows[-2][1] > 0 else 0.0}
    return report


def cmd_classify(cfg: RunConfig) -> dict:
    report = _base_report(cfg)
    res = _classify_point(cfg)
    c = res["classification"]
    report["lambda1"] = {"value": res["lambda1"], "method": "NumericGrid", "residual": res["residual"]}
    report["thresholds"] = {"rho": c.rho, "threshold_margin": c.threshold_margin}
    report["classification"] = c.to_dict()
    if cfg.csv:
        write_csv(cfg.csv, ["season", "sup"], list(enumerate(c.sup_history)))
    return report


def cmd_sweep(cfg: RunConfig) -> dict:
    report = _base_report(cfg)
    header, rows = run_sweep(cfg)
    if cfg.csv:
        write_csv(cfg.csv, header, rows)
    report["sweep"] = {"header": header, "rows": rows}
    return report


HANDLERS = {
    "eigen": cmd_eigen,
    "critical": cmd_critical,
    "volume": cmd_volume,
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "preset": cmd_preset,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _vector(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    common.add_argument("--domain", help="rect:L1[,L2[,L3]] | ball:R@n | mask:PATH")
    common.add_argument("--d", type=float, help="diffusivity")
    common.add_argument("--a", type=_vector, help="constant drift, comma-separated")
    common.add_argument("--f", help="reaction term, e.g. logistic:1, linear:-0.5, quadratic:1,2")
    common.add_argument("--g", help="growth map, e.g. linear:1, ricker:1, bh:1.718, skellam:2,1")
    common.add_argument("--n", type=int, help="spatial dimension when no domain is given")
    common.add_argument("--h", type=float, help="grid spacing")
    common.add_argument("--dt", type=float, help="time step within a season")
    common.add_argument("--max-cycles", dest="max_cycles", type=int)
    common.add_argument("--cycles", type=int, help="seasons to run (simulate)")
    common.add_argument("--eps-ext", dest="eps_ext", type=float)
    common.add_argument("--delta-per", dest="delta_per", type=float)
    common.add_argument("--tol-stat", dest="tol_stat", type=float)
    common.add_argument("--window", type=int)
    common.add_argument("--eig-tol", dest="eig_tol", type=float, help="eigen-solver residual tolerance")
    common.add_argument("--no-numeric", dest="numeric", action="store_false",
                        help="skip the numerical eigenvalue cross-check")
    common.add_argument("--preset", help="marine | terrestrial | insect | climate")
    for key, flag in (("gamma", "--gamma"), ("lam", "--lambda"), ("r", "--r"), ("s", "--s"),
                      ("L1", "--L1"), ("L2", "--L2"), ("area", "--area")):
        common.add_argument(flag, dest=f"preset:{key}", type=float)
    common.add_argument("--axis", dest="axes", action="append", help="NAME:MIN:MAX:STEPS (sweep)")
    common.add_argument("--jobs", type=int)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--field", help="CSV dump of the final or eigen field")
    common.add_argument("--csv", help="CSV trajectory or sweep table")

    parser = argparse.ArgumentParser(prog="impulsive-rd", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=f"{name} subcommand")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    given = vars(ns).copy()
    data = {}
    path = given.pop("config", None)
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config file {path}: {exc}") from exc
        if "config" in data and "command" not in data:
            data = data["config"]
    data["command"] = given.pop("command")
    preset_params = dict(data.get("preset_params", {}))
    for key in list(given):
        if key.startswith("preset:"):
            preset_params[key.split(":", 1)[1]] = given.pop(key)
    data.update(given)
    data["preset_params"] = preset_params
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        report = HANDLERS[cfg.command](cfg)
        text = emit_report(report, cfg)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numerical failure: {exc} {getattr(exc, 'diagnostics', '')}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 3
    if not cfg.out:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
