"""Habitats and the lattices the numerical solvers run on.

Three shapes are supported: axis-aligned boxes ``[0, L_1] x ... x [0, L_n]``,
balls centred at the origin, and rasterized regions given by a boolean mask
on a uniform lattice. Grids are vertex-centred; every node that is not
strictly inside the shape carries the hostile (zero) boundary value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .errors import ParameterError, ResolutionError

__all__ = [
    "HyperRect",
    "Ball",
    "Masked",
    "Domain",
    "Grid",
    "unit_ball_volume",
    "volume",
    "symmetrize",
    "rasterize",
    "parse_domain",
    "read_mask",
    "write_mask",
    "MIN_CELLS_PER_AXIS",
]

# cells (not interior nodes) per axis; [1,1] at h=1/8 gives 7x7 interior nodes
MIN_CELLS_PER_AXIS = 8


@dataclass(frozen=True)
class HyperRect:
    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if not lengths or any(not (v > 0 and math.isfinite(v)) for v in lengths):
            raise ParameterError(f"box side lengths must be positive, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.lengths)

    def describe(self) -> str:
        return "rect:" + ",".join(repr(v) for v in self.lengths)


@dataclass(frozen=True)
class Ball:
    radius: float
    dim: int = 2

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ParameterError("ball radius must be positive")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ParameterError("ball dimension must be a positive integer")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "dim", int(self.dim))

    def describe(self) -> str:
        return f"ball:{self.radius!r}@{self.dim}"


@dataclass(frozen=True, eq=False)
class Masked:
    """Rasterized region: ``mask[i, j(, k)]`` is True for nodes inside.

    Node ``(i, j, ...)`` sits at ``origin + spacing * (i, j, ...)``. Nodes
    outside the array are treated as outside the region. The mask need not
    be connected.
    """

    mask: np.ndarray
    spacing: float
    origin: tuple = field(default=None)
    source: str | None = None

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        if mask.ndim not in (2, 3):
            raise ParameterError("masks must be two- or three-dimensional")
        if not mask.any():
            raise ParameterError("mask has no inside nodes")
        if not (self.spacing > 0 and math.isfinite(self.spacing)):
            raise ParameterError("mask spacing must be positive")
        origin = (0.0,) * mask.ndim if self.origin is None else tuple(float(v) for v in self.origin)
        if len(origin) != mask.ndim:
            raise ParameterError("origin length must match mask dimension")
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "origin", origin)

    @property
    def dim(self) -> int:
        return self.mask.ndim

    @classmethod
    def from_predicate(cls, inside: Callable[..., np.ndarray], lower: Sequence[float],
                       upper: Sequence[float], h: float) -> "Masked":
        """Sample ``inside(x, y[, z])`` on the lattice covering [lower, upper]."""
        axes = [lo + h * np.arange(int(math.floor((hi - lo) / h + 1e-9)) + 1) for lo, hi in zip(lower, upper)]
        coords = np.meshgrid(*axes, indexing="ij")
        return cls(inside(*coords), h, origin=tuple(ax[0] for ax in axes))

    def describe(self) -> str:
        return f"mask:{self.source}" if self.source else f"mask:<{'x'.join(map(str, self.mask.shape))}>"


Domain = Union[HyperRect, Ball, Masked]


@dataclass(frozen=True, eq=False)
class Grid:
    """Vertex-centred lattice with an interior/Dirichlet classification.

    ``axes[k]`` holds the node coordinates along axis ``k``; ``interior`` is a
    boolean array of shape ``tuple(len(ax) for ax in axes)``.
    """

    axes: tuple
    interior: np.ndarray
    domain: Domain | None = None

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple:
        return self.interior.shape

    @property
    def spacing(self) -> tuple:
        return tuple(float(ax[1] - ax[0]) for ax in self.axes)

    @property
    def n_interior(self) -> int:
        return int(self.interior.sum())

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def coordinates(self):
        return np.meshgrid(*self.axes, indexing="ij")

    def interior_coordinates(self) -> np.ndarray:
        """(n_interior, dim) array of interior node positions, in storage order."""
        return np.stack([c[self.interior] for c in self.coordinates()], axis=1)

    def to_full(self, values) -> np.ndarray:
        full = np.zeros(self.shape)
        full[self.interior] = values
        return full

    def to_interior(self, full) -> np.ndarray:
        return np.asarray(full, dtype=float)[self.interior]


def unit_ball_volume(n: int) -> float:
    if n < 1:
        raise ParameterError("dimension must be at least 1")
    return math.pi ** (n / 2) / math.gamma(1 + n / 2)


def volume(domain: Domain) -> float:
    if isinstance(domain, HyperRect):
        return float(np.prod(domain.lengths))
    if isinstance(domain, Ball):
        return unit_ball_volume(domain.dim) * domain.radius**domain.dim
    if isinstance(domain, Masked):
        return domain.spacing**domain.dim * int(domain.mask.sum())
    raise TypeError(f"not a domain: {domain!r}")


def symmetrize(domain: Domain) -> Ball:
    """Ball centred at the origin with the same volume (Schwarz rearrangement)."""
    if isinstance(domain, Ball):
        return domain
    n = domain.dim
    return Ball((volume(domain) / unit_ball_volume(n)) ** (1.0 / n), n)


def _check_resolution(counts):
    if min(counts) < MIN_CELLS_PER_AXIS:
        raise ResolutionError(
            f"grid too coarse: {min(counts)} cells across the narrowest axis, need {MIN_CELLS_PER_AXIS}"
        )


def rasterize(domain: Domain, h: float | None = None) -> Grid:
    if isinstance(domain, Masked):
        if h is not None and not math.isclose(h, domain.spacing, rel_tol=1e-12):
            raise ParameterError("a mask carries its own spacing; pass h=None or the mask spacing")
        spans = np.nonzero(domain.mask)
        _check_resolution([int(s.max() - s.min()) + 2 for s in spans])
        axes = tuple(o + domain.spacing * np.arange(m) for o, m in zip(domain.origin, domain.mask.shape))
        return Grid(axes, np.array(domain.mask), domain)

    if h is None or not (h > 0):
        raise ParameterError("grid spacing h must be positive")

    if isinstance(domain, HyperRect):
        counts = [max(1, int(round(L / h))) for L in domain.lengths]
        _check_resolution(counts)
        axes = tuple(np.linspace(0.0, L, m + 1) for L, m in zip(domain.lengths, counts))
        interior = np.zeros(tuple(m + 1 for m in counts), dtype=bool)
        interior[tuple(slice(1, m) for m in counts)] = True
        return Grid(axes, interior, domain)

    if isinstance(domain, Ball):
        half = int(math.ceil(domain.radius / h)) + 1
        _check_resolution([int(2 * domain.radius / h)])
        ax = h * np.arange(-half, half + 1)
        axes = (ax,) * domain.dim
        r2 = sum(c**2 for c in np.meshgrid(*axes, indexing="ij"))
        return Grid(axes, r2 < domain.radius**2, domain)

    raise TypeError(f"not a domain: {domain!r}")


# ---------------------------------------------------------------------------
# textual specs and mask files
# ---------------------------------------------------------------------------


def read_mask(path) -> Masked:
    """Read a mask file: header ``rows cols spacing`` then rows of 0/1 tokens."""
    path = Path(path)
    lines = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 3:
        raise ParameterError(f"{path}: first line must be 'rows cols spacing'")
    try:
        rows, cols, spacing = int(lines[0][0]), int(lines[0][1]), float(lines[0][2])
        body = np.array([[int(tok) for tok in ln] for ln in lines[1:]])
    except ValueError as exc:
        raise ParameterError(f"{path}: malformed mask file") from exc
    if body.shape != (rows, cols) or not np.isin(body, (0, 1)).all():
        raise ParameterError(f"{path}: expected {rows}x{cols} grid of 0/1, got shape {body.shape}")
    return Masked(body.astype(bool), spacing, source=str(path))


def write_mask(mask: Masked, path) -> None:
    if mask.dim != 2:
        raise ParameterError("mask files hold two-dimensional masks")
    rows, cols = mask.mask.shape
    out = [f"{rows} {cols} {mask.spacing!r}"]
    out += [" ".join("1" if v else "0" for v in row) for row in mask.mask]
    Path(path).write_text("\n".join(out) + "\n")


def parse_domain(spec: str) -> Domain:
    """``rect:L1[,L2[,L3]]``, ``ball:R@n`` or ``mask:PATH``."""
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "rect":
            return HyperRect(tuple(float(v) for v in rest.split(",")))
        if kind == "ball":
            radius, _, n = rest.partition("@")
            return Ball(float(radius), int(n) if n else 2)
        if kind == "mask":
            return read_mask(rest)
    except ValueError as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"malformed domain spec {spec!r}") from exc
    raise ParameterError(f"unknown domain kind in {spec!r}; use rect:, ball: or mask:")
