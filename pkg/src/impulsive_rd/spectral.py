"""Principal Dirichlet eigenvalues of ``-d Laplacian + a . grad``.

Closed forms cover boxes (any constant drift) and balls (no drift). Other
shapes go through a finite-difference discretization and inverse power
iteration. The Rayleigh-Faber-Krahn and Li-Yau lower bounds depend only on
the volume of the habitat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import NumericError, ParameterError, UnsupportedError
from .geometry import Ball, Domain, Grid, HyperRect, unit_ball_volume, volume

__all__ = [
    "SpectralResult",
    "bessel_j",
    "bessel_first_zero",
    "ball_bessel_zero",
    "lambda1_closed",
    "lambda1_numeric",
    "assemble_operator",
    "mesh_peclet",
    "rfk_bound",
    "liyau_bound",
]

CLOSED_RECT = "ClosedFormRect"
CLOSED_BALL = "ClosedFormBall"
NUMERIC = "NumericGrid"
BOUND_RFK = "BoundRFK"
BOUND_LIYAU = "BoundLiYau"


@dataclass(frozen=True, eq=False)
class SpectralResult:
    lambda1: float
    method: str
    residual: float = 0.0
    eigenfunction: np.ndarray | None = None
    grid: Grid | None = None
    iterations: int = 0
    notes: tuple = field(default_factory=tuple)

    @property
    def spacing(self):
        return None if self.grid is None else self.grid.spacing

    def __float__(self):
        return float(self.lambda1)


# ---------------------------------------------------------------------------
# Bessel functions of the first kind
# ---------------------------------------------------------------------------


def bessel_j(m: float, x: float) -> float:
    """J_m(x) from the ascending series, for m >= 0 and |x| <= 12."""
    if m < 0:
        raise ParameterError("order must be nonnegative")
    if abs(x) > 12:
        raise ParameterError("series evaluation is limited to |x| <= 12")
    half = 0.5 * x
    if half == 0:
        return 1.0 if m == 0 else 0.0
    term = half**m / math.gamma(m + 1)
    q = half * half
    terms = [term]
    biggest = abs(term)
    k = 0
    while True:
        k += 1
        term *= -q / (k * (k + m))
        terms.append(term)
        biggest = max(biggest, abs(term))
        if abs(term) <= 1e-18 * biggest:
            break
    return math.fsum(terms)


def bessel_first_zero(m: float, tol: float = 1e-13) -> float:
    """First positive zero j_{m,1} of J_m, 0 <= m <= 5, by scan and bisection."""
    if not 0 <= m <= 5:
        raise ParameterError("bessel_first_zero supports orders 0 <= m <= 5")
    # J_m > 0 on (0, m]; the first zero lies in (m, m + pi + 2]
    hi_end = m + math.pi + 2.0
    lo = m
    step = 0.05
    x = lo
    while True:
        nxt = min(x + step, hi_end)
        if bessel_j(m, nxt) <= 0:
            lo, hi = x, nxt
            break
        if nxt >= hi_end:
            raise NumericError("no sign change of J_m found in bracket", order=m, bracket=(m, hi_end))
        x = nxt
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bessel_j(m, mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ball_bessel_zero(n: int) -> float:
    """j_{n/2-1,1}, the zero governing the Dirichlet ball in dimension n."""
    if n == 1:
        # J_{-1/2}(x) = sqrt(2/(pi x)) cos x
        return math.pi / 2
    return bessel_first_zero(n / 2 - 1)


# ---------------------------------------------------------------------------
# closed forms and bounds
# ---------------------------------------------------------------------------


def _drift(a, n):
    a = np.zeros(n) if a is None else np.atleast_1d(np.asarray(a, dtype=float))
    if a.size == 1 and n > 1 and a[0] == 0:
        a = np.zeros(n)
    if a.size != n:
        raise ParameterError(f"drift has {a.size} components but the domain is {n}-dimensional")
    return a


def lambda1_closed(d: float, a, domain: Domain) -> SpectralResult:
    if not d > 0:
        raise ParameterError("diffusivity must be positive")
    if isinstance(domain, HyperRect):
        a = _drift(a, domain.dim)
        value = float(a @ a) / (4 * d) + d * math.pi**2 * sum(1.0 / L**2 for L in domain.lengths)
        return SpectralResult(value, CLOSED_RECT)
    if isinstance(domain, Ball):
        a = _drift(a, domain.dim)
        if np.any(a != 0):
            raise UnsupportedError(
                "no closed form for a ball with drift; use rfk_bound for a lower bound"
            )
        return SpectralResult(d * ball_bessel_zero(domain.dim) ** 2 / domain.radius**2, CLOSED_BALL)
    raise UnsupportedError(f"no closed-form eigenvalue for {type(domain).__name__} domains")


def rfk_bound(d_ellipticity: float, domain: Domain) -> SpectralResult:
    """Rayleigh-Faber-Krahn lower bound d (|B_1|/|Omega|)^{2/n} j^2_{n/2-1,1}."""
    n = domain.dim
    value = d_ellipticity * (unit_ball_volume(n) / volume(domain)) ** (2 / n) * ball_bessel_zero(n) ** 2
    return SpectralResult(value, BOUND_RFK)


def liyau_bound(k: int, d: float, domain: Domain) -> SpectralResult:
    """Li-Yau lower bound for the k-th Dirichlet eigenvalue."""
    if k < 1:
        raise ParameterError("eigenvalue index starts at 1")
    n = domain.dim
    value = d * n / (n + 2) * (2 * math.pi) ** 2 * unit_ball_volume(n) ** (-2 / n) * (k / volume(domain)) ** (2 / n)
    return SpectralResult(value, BOUND_LIYAU)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------


def mesh_peclet(grid: Grid, d: float, a) -> np.ndarray:
    a = _drift(a, grid.dim)
    return np.abs(a) * np.asarray(grid.spacing) / (2 * d)


def assemble_operator(grid: Grid, d: float, a=None):
    """Sparse matrix of ``-d Laplacian + a . grad`` on the interior nodes.

    Dirichlet neighbours are eliminated (they hold zero). Axes whose mesh
    Peclet number reaches 1 switch to first-order upwinding so the matrix
    stays an M-matrix. Returns ``(matrix, notes)``.
    """
    if not d > 0:
        raise ParameterError("diffusivity must be positive")
    a = _drift(a, grid.dim)
    n = grid.n_interior
    if n == 0:
        raise ParameterError("grid has no interior nodes")
    inside = np.pad(grid.interior, 1)
    index = np.full(inside.shape, -1, dtype=np.int64)
    index[inside] = np.arange(n)
    pos = np.argwhere(inside)

    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    notes = []
    for k, (h, ak) in enumerate(zip(grid.spacing, a)):
        diff = d / h**2
        diag += 2 * diff
        if abs(ak) * h / (2 * d) < 1:
            c_plus, c_minus = -diff + ak / (2 * h), -diff - ak / (2 * h)
        else:
            notes.append(f"upwind advection on axis {k} (mesh Peclet {abs(ak) * h / (2 * d):.3g})")
            diag += abs(ak) / h
            c_plus = -diff + (ak / h if ak < 0 else 0.0)
            c_minus = -diff - (ak / h if ak > 0 else 0.0)
        for shift, coef in ((1, c_plus), (-1, c_minus)):
            nb = pos.copy()
            nb[:, k] += shift
            j = index[tuple(nb.T)]
            keep = j >= 0
            rows.append(np.arange(n)[keep])
            cols.append(j[keep])
            vals.append(np.full(keep.sum(), coef))
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)
    A = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    return A, tuple(notes)


def lambda1_numeric(grid: Grid, d: float, a=None, tol: float = 1e-6, max_iter: int = 2000) -> SpectralResult:
    """Principal eigenpair by inverse power iteration on the discrete operator.

    ``residual`` is ``max|A phi - lambda phi| / lambda`` for the max-normalized
    eigenfunction. Converged when successive Rayleigh quotients agree to a
    relative 1e-8 and the residual is below ``tol``.

    When the iteration contracts slowly (close first and second eigenvalues)
    the operator is shifted by the Collatz-Wielandt bound ``min(A v / v)``,
    which never exceeds the principal eigenvalue of an M-matrix for positive
    ``v``, so the shifted iteration keeps targeting the principal mode.
    """
    A, notes = assemble_operator(grid, d, a)
    A = A.tocsc()
    n = A.shape[0]
    lu = splu(A)
    sigma = 0.0
    v = np.full(n, 1.0 / math.sqrt(n))
    lam = res = math.nan
    lam_prev = delta_prev = math.nan
    since_shift = 0
    for it in range(1, max_iter + 1):
        w = lu.solve(v)
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0:
            raise NumericError("inverse iteration broke down", iteration=it, shift=sigma)
        v = w / norm
        if v.sum() < 0:
            v = -v
        Av = A @ v
        lam = float(v @ Av)
        vmax = np.max(np.abs(v))
        res = float(np.max(np.abs(Av - lam * v)) / (abs(lam) * vmax))
        delta = abs(lam - lam_prev)
        if delta < 1e-8 * abs(lam) and res < tol:
            break
        since_shift += 1
        if since_shift >= 3 and delta > 0.3 * delta_prev:
            live = v > 1e-12 * vmax
            bound = float(np.min(Av[live] / v[live]))
            if sigma < bound < lam:
                try:
                    lu = splu((A - bound * sp.identity(n, format="csc")).tocsc())
                    sigma = bound
                    since_shift = 0
                except RuntimeError:
                    pass
        lam_prev, delta_prev = lam, delta
    else:
        raise NumericError(
            "inverse power iteration did not converge",
            iterations=max_iter, lambda1=lam, residual=res, tol=tol, shift=sigma,
        )
    v = v / v.max()
    return SpectralResult(lam, NUMERIC, res, grid.to_full(v), grid, it, notes)
