"""Distances on the time-frequency plane.

The mixed norm of a field F against a weight chi is

    ||F||_L(chi) = ( int ( int_{B_1(tau)} |F|^2 )^2 chi(tau) dtau )^{1/4}

i.e. the L^4(chi) norm of the unit-ball L^2 norms.  Ball integrals use the
exact disk indicator on the grid (a point is inside iff its center distance
is < 1) with the uniform cell area; outer integrals use trapezoid weights.
Fields are zero outside the grid for ball sums of F, while the local
deviation truncates the ball at the domain boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.signal import fftconvolve

from .tfcore import Field2D, Grid2D, RealField2D

__all__ = [
    "ChiKind",
    "ChiWeight",
    "PhaseAlignment",
    "weighted_lp_norm",
    "metric_d",
    "ball_norms_sq",
    "ball_norms_sq_direct",
    "mixed_norm",
    "phase_aligned_distance",
    "local_deviation",
    "phaseless_diff_bound_check",
    "disk_offsets",
]

MAX_BALL_SPACING = 0.25


class ChiKind(str, Enum):
    UNIT = "unit"
    CAUCHY_FREQ = "cauchyfreq"
    COMPACT = "compact"
    SAMPLED = "sampled"

    @classmethod
    def parse(cls, name) -> "ChiKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        aliases = {"unit": cls.UNIT, "one": cls.UNIT, "cauchyfreq": cls.CAUCHY_FREQ,
                   "cauchy": cls.CAUCHY_FREQ, "compact": cls.COMPACT,
                   "compactindicator": cls.COMPACT, "indicator": cls.COMPACT,
                   "sampled": cls.SAMPLED}
        if key not in aliases:
            raise ValueError(f"unknown chi kind {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class ChiWeight:
    """Weight chi with values in [0, 1].

    ``unit``       chi = 1
    ``cauchyfreq`` chi(x, xi) = 1 / (1 + xi^2)
    ``compact``    indicator of the rectangle ``rect = (x0, x1, xi0, xi1)``;
                   boundary points get 1/2 (edges) or 1/4 (corners)
    ``sampled``    explicit values on a grid
    """

    kind: ChiKind = ChiKind.UNIT
    rect: tuple | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ChiKind.parse(self.kind))
        if self.kind is ChiKind.COMPACT:
            if self.rect is None or len(self.rect) != 4:
                raise ValueError("compact chi needs rect=(x0, x1, xi0, xi1)")
            x0, x1, y0, y1 = map(float, self.rect)
            if not (x1 > x0 and y1 > y0):
                raise ValueError("degenerate rectangle")
        if self.kind is ChiKind.SAMPLED:
            v = np.asarray(self.values, float)
            if np.any(v < 0) or np.any(v > 1 + 1e-12):
                raise ValueError("sampled chi must take values in [0, 1]")

    @classmethod
    def unit(cls):
        return cls(ChiKind.UNIT)

    @classmethod
    def cauchy_freq(cls):
        return cls(ChiKind.CAUCHY_FREQ)

    @classmethod
    def compact(cls, rect):
        return cls(ChiKind.COMPACT, rect=tuple(float(r) for r in rect))

    def on(self, grid: Grid2D) -> np.ndarray:
        X, XI = grid.mesh()
        if self.kind is ChiKind.UNIT:
            return np.ones(grid.shape)
        if self.kind is ChiKind.CAUCHY_FREQ:
            return 1.0 / (1.0 + XI ** 2)
        if self.kind is ChiKind.COMPACT:
            x0, x1, y0, y1 = self.rect
            tol = 1e-9 * max(grid.hx, grid.hxi)
            return _soft_indicator(X, x0, x1, tol) * _soft_indicator(XI, y0, y1, tol)
        v = np.asarray(self.values, float)
        if v.shape != grid.shape:
            raise ValueError("sampled chi does not match the grid")
        return v


def _soft_indicator(t, lo, hi, tol):
    out = ((t > lo + tol) & (t < hi - tol)).astype(float)
    out[np.abs(t - lo) <= tol] = 0.5
    out[np.abs(t - hi) <= tol] = 0.5
    return out


def _values(F) -> np.ndarray:
    return F.values if isinstance(F, (Field2D, RealField2D)) else np.asarray(F)


def _require_same_grid(*fields):
    g0 = fields[0].grid
    for f in fields[1:]:
        if not g0.same_as(f.grid):
            raise ValueError("fields live on different grids")
    return g0


def weighted_lp_norm(F, p: float, chi: ChiWeight | None = None) -> float:
    """(sum |F|^p chi w_trap)^{1/p} for p in {1, 2, 4}."""
    if p not in (1, 2, 4):
        raise ValueError(f"p={p} not supported (use 1, 2 or 4)")
    grid = F.grid
    chi_v = (chi or ChiWeight.unit()).on(grid)
    a = np.abs(F.values)
    scale = float(a.max()) if a.size else 0.0
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    # factor out max|F| so |F|^p neither underflows nor overflows
    s = float(np.sum((a / scale) ** p * chi_v * grid.quad_weights()))
    return scale * s ** (1.0 / p)


def metric_d(phi: RealField2D, psi: RealField2D) -> float:
    """||phi^2 - psi^2||_{L^2}^{1/2}."""
    grid = _require_same_grid(phi, psi)
    diff = phi.values ** 2 - psi.values ** 2
    return float(np.sum(diff ** 2 * grid.quad_weights())) ** 0.25


def disk_offsets(grid: Grid2D) -> tuple[np.ndarray, np.ndarray]:
    """Integer offsets (p, q) with (p hx)^2 + (q hxi)^2 < 1."""
    px = int(math.floor(1.0 / grid.hx))
    qx = int(math.floor(1.0 / grid.hxi))
    P, Q = np.meshgrid(np.arange(-px, px + 1), np.arange(-qx, qx + 1), indexing="ij")
    inside = (P * grid.hx) ** 2 + (Q * grid.hxi) ** 2 < 1.0
    return P[inside], Q[inside]


def _disk_kernel(grid: Grid2D) -> np.ndarray:
    P, Q = disk_offsets(grid)
    px, qx = int(np.abs(P).max()), int(np.abs(Q).max())
    K = np.zeros((2 * px + 1, 2 * qx + 1))
    K[P + px, Q + qx] = 1.0
    return K


def _check_ball_resolution(grid: Grid2D):
    if grid.hx > MAX_BALL_SPACING or grid.hxi > MAX_BALL_SPACING:
        raise ValueError(f"grid spacing ({grid.hx:.3g}, {grid.hxi:.3g}) too coarse to "
                         f"resolve the unit ball; need <= {MAX_BALL_SPACING}")


def ball_norms_sq(F) -> np.ndarray:
    """tau -> int_{B_1(tau)} |F|^2 at grid points, via FFT convolution."""
    grid = F.grid
    _check_ball_resolution(grid)
    return _ball_conv(np.abs(F.values) ** 2, grid)


def _ball_conv(a: np.ndarray, grid: Grid2D) -> np.ndarray:
    K = _disk_kernel(grid)
    if np.iscomplexobj(a):
        out = fftconvolve(a.real, K, mode="same") + 1j * fftconvolve(a.imag, K, mode="same")
    else:
        out = np.maximum(fftconvolve(a, K, mode="same"), 0.0)
    return out * grid.cell_area


def ball_norms_sq_direct(F) -> np.ndarray:
    """Same quantity as :func:`ball_norms_sq` by an explicit stencil sum."""
    grid = F.grid
    _check_ball_resolution(grid)
    a = np.abs(F.values) ** 2
    out = np.zeros_like(a)
    nx, nxi = grid.shape
    for p, q in zip(*disk_offsets(grid)):
        # out[i, j] += a[i + p, j + q]
        i0, i1 = max(0, -p), min(nx, nx - p)
        j0, j1 = max(0, -q), min(nxi, nxi - q)
        if i1 > i0 and j1 > j0:
            out[i0:i1, j0:j1] += a[i0 + p:i1 + p, j0 + q:j1 + q]
    return out * grid.cell_area


def mixed_norm(F, chi: ChiWeight | None = None) -> float:
    """||F||_L(chi); raises if the grid does not resolve the unit ball."""
    grid = F.grid
    b = ball_norms_sq(F)
    chi_v = (chi or ChiWeight.unit()).on(grid)
    return float(np.sum(b ** 2 * chi_v * grid.quad_weights())) ** 0.25


class NormKind(str, Enum):
    MIXED = "mixed"
    L2 = "l2"


@dataclass(frozen=True)
class PhaseAlignment:
    lambda_star: complex
    value: float
    iterations: int
    value_at_one: float


def _golden_min(fun, lo, hi, tol):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    it = 0
    while b - a > tol and it < 200:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
        it += 1
    x = (a + b) / 2
    return x, fun(x), it


def phase_aligned_distance(F: Field2D, H: Field2D, chi: ChiWeight | None = None,
                           norm_kind: str = "mixed", scan: int = 64,
                           angle_tol: float = 1e-8) -> PhaseAlignment:
    """inf over |lambda| = 1 of ||H - lambda F|| in the mixed or weighted L^2 norm.

    For the mixed norm the ball integrals of |H - e^{it} F|^2 are affine in
    (cos t, sin t), so three convolutions are done once and the angle search
    (scan + golden section) only touches cheap sums.
    """
    grid = _require_same_grid(F, H)
    kind = norm_kind if isinstance(norm_kind, NormKind) else NormKind(str(norm_kind).lower())
    chi_v = (chi or ChiWeight.unit()).on(grid)
    wq = grid.quad_weights() * chi_v
    f, h = F.values, H.values
    if kind is NormKind.L2:
        pair = complex(np.sum(h * np.conj(f) * wq))
        lam = pair / abs(pair) if abs(pair) > 0 else 1.0 + 0j
        val = float(np.sum(np.abs(h - lam * f) ** 2 * wq)) ** 0.5
        one = float(np.sum(np.abs(h - f) ** 2 * wq)) ** 0.5
        return PhaseAlignment(complex(lam), val, 0, one)

    _check_ball_resolution(grid)
    A = _ball_conv(np.abs(h) ** 2 + np.abs(f) ** 2, grid)
    C = _ball_conv(h * np.conj(f), grid)

    def objective(theta):
        # |h - e^{i theta} f|^2 = |h|^2 + |f|^2 - 2 Re(e^{-i theta} h conj f)
        b = np.maximum(A - 2.0 * np.real(np.exp(-1j * theta) * C), 0.0)
        return float(np.sum(b ** 2 * wq))

    thetas = 2 * math.pi * np.arange(scan) / scan
    vals = [objective(t) for t in thetas]
    k = int(np.argmin(vals))
    step = 2 * math.pi / scan
    theta, best, iters = _golden_min(objective, thetas[k] - step, thetas[k] + step, angle_tol)
    if vals[k] < best:
        theta, best = thetas[k], vals[k]
    def direct(lam_):
        # the expanded objective cancels to ~1e-16 * A; re-sum without cancellation
        b = _ball_conv(np.abs(h - lam_ * f) ** 2, grid)
        return float(np.sum(b ** 2 * wq)) ** 0.25

    lam = complex(np.exp(1j * theta))
    value = direct(lam)
    # the L2-optimal phase is exact for lambda-multiples; keep it when it wins
    pair = complex(np.sum(h * np.conj(f) * wq))
    if abs(pair) > 0:
        lam0 = pair / abs(pair)
        v0 = direct(lam0)
        if v0 < value:
            lam, value = lam0, v0
    return PhaseAlignment(lam, value, iters + scan, direct(1.0))


def local_deviation(u, grid: Grid2D | None = None) -> RealField2D:
    """delta_1[u](x) = ( int_{B_1(x) cap domain} |u(y) - u(x)|^2 dy )^{1/2}."""
    if grid is None:
        grid = u.grid
    vals = _values(u)
    if vals.shape != grid.shape:
        raise ValueError("field does not match grid")
    _check_ball_resolution(grid)
    out = np.zeros(grid.shape)
    nx, nxi = grid.shape
    for p, q in zip(*disk_offsets(grid)):
        if p == 0 and q == 0:
            continue
        i0, i1 = max(0, -p), min(nx, nx - p)
        j0, j1 = max(0, -q), min(nxi, nxi - q)
        if i1 > i0 and j1 > j0:
            d = vals[i0 + p:i1 + p, j0 + q:j1 + q] - vals[i0:i1, j0:j1]
            out[i0:i1, j0:j1] += np.abs(d) ** 2
    return RealField2D(grid, np.sqrt(out * grid.cell_area))


@dataclass(frozen=True)
class PhaselessReport:
    lhs: float
    rhs: float
    ratio: float
    bound: float
    passed: bool


def phaseless_diff_bound_check(F, H, tol: float = 1e-6) -> PhaselessReport:
    """Compare || |H| - |F| ||_L with d(|F|, |H|); the ratio stays below |B_1|^{1/2}."""
    grid = _require_same_grid(F, H)
    aF, aH = np.abs(F.values), np.abs(H.values)
    lhs = mixed_norm(RealField2D(grid, aH - aF))
    rhs = metric_d(RealField2D(grid, aF), RealField2D(grid, aH))
    if rhs == 0.0:
        ratio = 1.0 if lhs == 0.0 else math.inf
    else:
        ratio = lhs / rhs
    bound = math.sqrt(math.pi)
    return PhaselessReport(lhs, rhs, ratio, bound, ratio <= bound * (1 + tol))
