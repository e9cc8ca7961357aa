"""Weighted Poincare and Cheeger constants on 1-D and 2-D grids.

Discretization
--------------
For weights v <= w sampled on a uniform lattice, the Poincare quotient

    inf_c ||u - c||^2_{L^2(v)} / ||grad u||^2_{L^2(w)}

becomes the pencil (M, K) with

    M = diag(v_i vol_i)                         (trapezoid cell volumes)
    K = sum over lattice edges e=(i,j) of  w_e (u_i - u_j)^2 / h_e^2 * vol_e

where w_e is the mean of the endpoint weights and vol_e = h_e times the
transversal trapezoid weight.  No flux is imposed at the boundary.  C_P is
the largest theta of M u = theta K u on the v-mean-zero subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import quad
from scipy.sparse.linalg import splu
from scipy.special import exp1

from .norms import local_deviation
from .tfcore import Field2D, Grid2D, RealField2D
from .weights import GammaWeight

__all__ = [
    "WeightPair",
    "PoincareEstimate",
    "CheegerEstimate",
    "EigenSolverError",
    "weight_from_spectrogram",
    "separable_convolve",
    "estimate_poincare",
    "estimate_cheeger",
    "domain_doubling_study",
    "bobkov_moment_bound",
    "cauchy_pair_bound",
    "tensor_bound",
    "modified_poincare_check",
    "bump_h1_constant",
    "log_concavity_check",
    "sinh_inequality_check",
    "convolution_equivalence_check",
    "trapezoid_volumes",
    "local_deviation_1d",
]

DENSE_MAX = 1024


class EigenSolverError(RuntimeError):
    pass


def trapezoid_volumes(shape, spacing) -> np.ndarray:
    vols = []
    for n, h in zip(shape, spacing):
        w = np.full(n, float(h))
        w[[0, -1]] *= 0.5
        vols.append(w)
    out = vols[0]
    for w in vols[1:]:
        out = np.multiply.outer(out, w)
    return out


@dataclass(frozen=True)
class WeightPair:
    """Weights v <= w on a common 1-D or 2-D lattice with the given spacing."""

    v: np.ndarray
    w: np.ndarray
    spacing: tuple
    origin: tuple | None = None

    def __post_init__(self):
        v = np.asarray(self.v, float)
        w = np.asarray(self.w, float)
        if v.shape != w.shape:
            raise ValueError("v and w must share a lattice")
        if v.ndim not in (1, 2) or len(self.spacing) != v.ndim:
            raise ValueError("need 1-D or 2-D weights with one spacing per axis")
        if np.any(v < 0) or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        if np.any(v > w * (1 + 1e-12) + 1e-300):
            raise ValueError("need v <= w pointwise")
        if not np.sum(v) > 0:
            raise ValueError("v has zero mass")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "spacing", tuple(float(h) for h in self.spacing))
        if self.origin is None:
            object.__setattr__(self, "origin", tuple(0.0 for _ in self.spacing))

    @classmethod
    def symmetric(cls, w, spacing, origin=None):
        return cls(w, w, spacing, origin)

    @classmethod
    def from_fields(cls, v: RealField2D, w: RealField2D):
        g = w.grid
        return cls(v.values, w.values, (g.hx, g.hxi), (g.x_min, g.xi_min))

    @classmethod
    def on_interval(cls, v_fun, w_fun, lo, hi, n):
        x = np.linspace(lo, hi, n)
        return cls(v_fun(x), w_fun(x), ((hi - lo) / (n - 1),), (lo,))

    @property
    def shape(self):
        return self.v.shape

    @property
    def size(self) -> int:
        return self.v.size

    def coords(self) -> list[np.ndarray]:
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.shape)]

    def volumes(self) -> np.ndarray:
        return trapezoid_volumes(self.shape, self.spacing)


def _edges(shape, spacing):
    """Yield (i, j, face width, h) for the lattice edges along each axis."""
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    vols = [np.full(n, h) for n, h in zip(shape, spacing)]
    for w in vols:
        w[[0, -1]] *= 0.5
    for ax, (n, h) in enumerate(zip(shape, spacing)):
        if n < 2:
            continue
        a = np.take(idx, np.arange(n - 1), axis=ax)
        b = np.take(idx, np.arange(1, n), axis=ax)
        trans = np.ones(a.shape)
        for other in range(len(shape)):
            if other != ax:
                sh = [1] * len(shape)
                sh[other] = shape[other]
                trans = trans * vols[other].reshape(sh)
        yield a.ravel(), b.ravel(), trans.ravel(), h


def _stiffness(w: np.ndarray, spacing):
    n = w.size
    wf = w.ravel()
    rows, cols, data = [], [], []
    edge_list = []
    for a, b, face, h in _edges(w.shape, spacing):
        ce = 0.5 * (wf[a] + wf[b]) * face / h
        edge_list.append((a, b, ce))
        rows += [a, b, a, b]
        cols += [a, b, b, a]
        data += [ce, ce, -ce, -ce]
    K = sp.csr_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(n, n))
    return K, edge_list


@dataclass
class PoincareEstimate:
    c_p: float
    eigenvalue: float
    resolution: tuple
    convergence: list = field(default_factory=list)
    divergent: bool = False
    residual: float = 0.0
    iterations: int = 0
    method: str = ""
    eigenvector: np.ndarray | None = field(default=None, repr=False)

    def relative_changes(self) -> list[float]:
        c = [v for _, v in self.convergence]
        return [abs(b - a) / abs(a) for a, b in zip(c[:-1], c[1:]) if a]


def _residual(K, M, u, theta) -> float:
    Mu, Ku = M * u, theta * (K @ u)
    return float(np.linalg.norm(Mu - Ku) / max(np.linalg.norm(Mu) + np.linalg.norm(Ku), 1e-300))


def _dense_top(K, M, m, ground):
    """Largest theta of P u = theta K u with one node grounded.

    The v-variance u^T P u, P = M - m m^T / sum(m), and u^T K u both ignore
    constants, so fixing u at the heaviest node loses nothing and keeps K's
    diagonally dominant grading intact for the Cholesky factorization.
    """
    n = m.size
    keep = np.r_[0:ground, ground + 1:n]
    Kg = K[keep][:, keep].toarray()
    mk = m[keep]
    Pg = np.diag(M[keep]) - np.outer(mk, mk) / m.sum()
    vals, vecs = sla.eigh(Pg, 0.5 * (Kg + Kg.T), subset_by_index=[n - 2, n - 2])
    u = np.zeros(n)
    u[keep] = vecs[:, 0]
    u -= (m @ u) / m.sum()
    theta = float(vals[0])
    res = _residual(K, M, u, theta)
    return theta, u, res


def _start_vectors(pair: WeightPair, k: int) -> np.ndarray:
    cs = pair.coords()
    grids = np.meshgrid(*cs, indexing="ij")
    ramps = []
    for g in grids:
        s = (g - g.mean()) / (np.ptp(g) or 1.0)
        ramps += [s, s ** 2, s ** 3, np.sign(s) * np.abs(s) ** 0.5]
    if len(grids) == 2:
        a, b = [(g - g.mean()) / (np.ptp(g) or 1.0) for g in grids]
        ramps += [a * b, a ** 2 * b, a * b ** 2]
    cols = [r.ravel() for r in ramps][: max(k, 1)]
    while len(cols) < k:
        cols.append(np.cos((len(cols) + 1) * np.pi * np.linspace(0, 1, pair.size)))
    return np.column_stack(cols)


def _iterative_top(K, M, m, pair: WeightPair, block: int, tol: float, max_iter: int):
    n = m.size
    ground = int(np.argmax(pair.w.ravel()))
    keep = np.r_[0:ground, ground + 1:n]
    lu = splu(sp.csc_matrix(K[keep][:, keep]))
    mass = m.sum()

    def project(Y):
        return Y - np.outer(np.ones(n), (m @ Y) / mass)

    def apply(U):
        R = M[:, None] * U
        R -= np.outer(m / mass, R.sum(axis=0))  # remove roundoff in 1^T M u, scaled like M
        Y = np.zeros_like(U)
        Y[keep] = lu.solve(R[keep])
        return project(Y)

    # Ritz step in Jacobi-scaled coordinates: weights spanning many orders of
    # magnitude would otherwise make the projected K numerically indefinite
    diagK = K.diagonal()
    d = np.sqrt(np.maximum(diagK, diagK.max() * 1e-300) + 1e-300)
    U = project(_start_vectors(pair, block))
    theta_prev = None
    theta, res = math.nan, math.inf
    for it in range(1, max_iter + 1):
        Y = apply(U)
        Z, _ = np.linalg.qr(d[:, None] * Y)
        Y = Z / d[:, None]
        Kr = Y.T @ (K @ Y)
        Mr = Y.T @ (M[:, None] * Y)
        Kr = 0.5 * (Kr + Kr.T)
        Mr = 0.5 * (Mr + Mr.T)
        s_k, V = np.linalg.eigh(Kr)
        keep_dirs = s_k > 1e-13 * s_k.max()
        T = V[:, keep_dirs] / np.sqrt(s_k[keep_dirs])
        vals, vecs = np.linalg.eigh(T.T @ Mr @ T)
        order = np.argsort(vals)[::-1]
        vals, vecs = vals[order], T @ vecs[:, order]
        U = Y @ vecs
        if U.shape[1] < block:
            U = np.column_stack([U, project(_start_vectors(pair, block))[:, : block - U.shape[1]]])
        theta = float(vals[0])
        u = U[:, 0]
        res = _residual(K, M, u, theta)
        if theta_prev is not None and abs(theta - theta_prev) <= tol * abs(theta) and res < 1e-6:
            return theta, u, res, it
        theta_prev = theta
    raise EigenSolverError(f"inverse iteration did not converge in {max_iter} steps "
                           f"(theta={theta:.6g}, residual={res:.3g})")


def estimate_poincare(pair: WeightPair, method: str = "auto", block: int = 4,
                      tol: float = 1e-10, max_iter: int = 2000,
                      keep_vector: bool = False) -> PoincareEstimate:
    """C_P(v, w) = 1 / (smallest nonzero eigenvalue of K u = lambda M u on v-mean-zero u).

    ``method`` is ``dense`` (full generalized eigensolve, the reference path),
    ``iterative`` (block inverse iteration with deflation of constants) or
    ``auto`` (dense up to DENSE_MAX unknowns).
    """
    vol = pair.volumes()
    M = (pair.v * vol).ravel()
    m = M.copy()
    if not m.sum() > 0:
        raise ValueError("v has zero mass")
    K, _ = _stiffness(pair.w, pair.spacing)
    n = pair.size
    if method == "auto":
        method = "dense" if n <= DENSE_MAX else "iterative"
    if method == "dense":
        theta, u, res = _dense_top(K, M, m, int(np.argmax(pair.w.ravel())))
        it = 1
    elif method == "iterative":
        theta, u, res, it = _iterative_top(K, M, m, pair, block, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    c_p = theta
    return PoincareEstimate(
        c_p=c_p,
        eigenvalue=1.0 / c_p if c_p > 0 else math.inf,
        resolution=pair.shape,
        convergence=[(pair.shape, c_p)],
        residual=res,
        iterations=it,
        method=method,
        eigenvector=u.reshape(pair.shape) if keep_vector else None,
    )


def domain_doubling_study(build, levels, growth: float = 2.0, streak: int = 3,
                          **kwargs) -> PoincareEstimate:
    """Estimate C_P for ``build(level) -> WeightPair`` over successive levels.

    Flags divergence when the estimate grows by >= ``growth`` at each of the
    last ``streak`` doublings.
    """
    conv = []
    last = None
    for lev in levels:
        pair = build(lev)
        last = estimate_poincare(pair, **kwargs)
        conv.append((pair.shape, last.c_p))
    ratios = [b / a for (_, a), (_, b) in zip(conv[:-1], conv[1:])]
    divergent = len(ratios) >= streak and all(r >= growth for r in ratios[-streak:])
    last.convergence = conv
    last.divergent = divergent
    if divergent:
        last.c_p = math.inf
        last.eigenvalue = 0.0
    return last


@dataclass
class CheegerEstimate:
    h: float
    cut_level: float
    side_masses: tuple
    perimeter: float
    c_p: float
    cheeger_bound: float
    slack: float
    mask: np.ndarray | None = field(default=None, repr=False)

    @property
    def inequality_holds(self) -> bool:
        return self.c_p <= self.cheeger_bound


def estimate_cheeger(w, spacing=None, origin=None) -> CheegerEstimate:
    """Sweep cut over the level sets of the Poincare maximizer of (w, w)."""
    pair = w if isinstance(w, WeightPair) else WeightPair.symmetric(w, spacing, origin)
    if pair.size < 2:
        raise ValueError("degenerate field: need at least two cells")
    est = estimate_poincare(WeightPair.symmetric(pair.w, pair.spacing, pair.origin),
                            keep_vector=True)
    u = est.eigenvector.ravel()
    order = np.argsort(-u, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    n = u.size
    wf = pair.w.ravel()
    # the first k nodes in sweep order form E_k; an edge is cut for lo < k <= hi
    diff = np.zeros(n + 1)
    for a, b, face, _ in _edges(pair.shape, pair.spacing):
        ce = 0.5 * (wf[a] + wf[b]) * face
        lo = np.minimum(rank[a], rank[b])
        hi = np.maximum(rank[a], rank[b])
        np.add.at(diff, lo + 1, ce)
        np.add.at(diff, hi + 1, -ce)
    mass = (pair.w * pair.volumes()).ravel()[order]
    cm = np.cumsum(mass)[: n - 1]
    # complement masses summed from the other end; total - cm loses the small side
    rest = np.cumsum(mass[::-1])[::-1][1:]
    side = np.minimum(cm, rest)
    # same for the perimeter: accumulate from whichever end bounds the smaller side,
    # so only edges near that side enter the rounding error
    fwd = np.cumsum(diff)[1:n]
    bwd = -np.cumsum(diff[::-1])[::-1][2:]
    perim = np.maximum(np.where(cm <= rest, fwd, bwd), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(side > 0, perim / side, np.inf)
    k = int(np.argmin(ratio))
    h_val = float(ratio[k])
    per = float(perim[k])
    sides = (float(cm[k]), float(rest[k]))
    mask = np.zeros(n, bool)
    mask[order[: k + 1]] = True
    bound = 4.0 / h_val ** 2 if h_val > 0 else math.inf
    return CheegerEstimate(
        h=h_val,
        cut_level=float(u[order[k]]),
        side_masses=sides,
        perimeter=per,
        c_p=est.c_p,
        cheeger_bound=bound,
        slack=bound - est.c_p,
        mask=mask.reshape(pair.shape),
    )


# ---------------------------------------------------------------------------
# weights built from spectrograms


def _cell_kernel(c: float, h: float, n: int) -> np.ndarray:
    """Cell averages of e^{-c|s|} at offsets k h, k = -(n-1)..(n-1).

    Averaging over [k h - h/2, k h + h/2] makes the kernel sum to exactly
    2/c, so the discrete convolution conserves mass with no O(h^2) bias, and
    the resulting sequence is still log-concave.
    """
    k = np.abs(np.arange(-(n - 1), n))
    ch = c * h
    out = np.exp(-ch * k) * (2.0 * math.sinh(ch / 2) / ch)
    out[k == 0] = 2.0 * (-math.expm1(-ch / 2)) / ch
    return out


def _toeplitz(c: float, h: float, n: int) -> np.ndarray:
    ker = _cell_kernel(c, h, n)
    idx = np.arange(n)
    return ker[(idx[:, None] - idx[None, :]) + n - 1]


def separable_convolve(values: np.ndarray, gam: GammaWeight, hx: float, hxi: float) -> np.ndarray:
    """(values * gamma) on the grid, summed directly as T_x @ values @ T_xi^T.

    All terms are non-negative for non-negative input, so every output entry
    keeps full relative precision, including in the far tails.
    """
    nx, nxi = values.shape
    Tx = _toeplitz(gam.a, hx, nx) * hx
    Tq = _toeplitz(gam.b, hxi, nxi) * hxi
    return Tx @ values @ Tq.T


def weight_from_spectrogram(F, gam: GammaWeight, check_resolution: bool = True) -> RealField2D:
    """w = (|F|^2 * gamma)^2 for a field F (Field2D or RealField2D of |F|^2 via ``power``)."""
    grid = F.grid
    if check_resolution and (gam.a * grid.hx > 1 + 1e-12 or gam.b * grid.hxi > 1 + 1e-12):
        raise ValueError(f"grid does not resolve gamma: a*hx={gam.a * grid.hx:.3g}, "
                         f"b*hxi={gam.b * grid.hxi:.3g} (need <= 1)")
    power = np.abs(np.asarray(F.values)) ** 2
    conv = separable_convolve(power, gam, grid.hx, grid.hxi)
    return RealField2D(grid, conv ** 2)


# ---------------------------------------------------------------------------
# closed-form bounds


def _as_weight(w, spacing=None, origin=None):
    if isinstance(w, RealField2D):
        g = w.grid
        return np.asarray(w.values, float), (g.hx, g.hxi), (g.x_min, g.xi_min)
    if isinstance(w, WeightPair):
        return w.w, w.spacing, w.origin
    arr = np.asarray(w, float)
    if spacing is None:
        raise ValueError("spacing is required for raw arrays")
    spacing = tuple(np.atleast_1d(spacing).astype(float))
    origin = tuple(np.zeros(arr.ndim)) if origin is None else tuple(np.atleast_1d(origin))
    return arr, spacing, origin


def bobkov_moment_bound(w, spacing=None, origin=None) -> float:
    """int |x - x0|^2 w dx / int w, x0 the barycenter.

    Bobkov's theorem gives C_P(w) <= K * (this value) for log-concave w with
    a universal K that has no known numeric value, so only the moment is
    returned.
    """
    arr, spacing, origin = _as_weight(w, spacing, origin)
    mass_w = arr * trapezoid_volumes(arr.shape, spacing)
    total = mass_w.sum()
    if not total > 0:
        raise ValueError("zero mass")
    coords = [o + h * np.arange(n) for o, h, n in zip(origin, spacing, arr.shape)]
    mesh = np.meshgrid(*coords, indexing="ij")
    out = 0.0
    for x in mesh:
        x0 = np.sum(x * mass_w) / total
        out += np.sum((x - x0) ** 2 * mass_w) / total
    return float(out)


def cauchy_pair_bound(beta: float, d: int) -> float:
    """1/(2 beta): the certified C_P of (w_beta / (1+|x|^2), w_beta), w_beta = (1+|x|^2)^-beta."""
    if d < 1:
        raise ValueError("dimension must be positive")
    if beta < d + 1:
        raise ValueError(f"bound needs beta >= d + 1 (beta={beta}, d={d})")
    return 1.0 / (2.0 * beta)


def cauchy_pair(beta: float, lo: float, hi: float, n: int) -> WeightPair:
    x = np.linspace(lo, hi, n)
    w = (1.0 + x * x) ** (-beta)
    return WeightPair(w / (1.0 + x * x), w, ((hi - lo) / (n - 1),), (lo,))


def tensor_bound(c1: float, c2: float) -> float:
    if c1 < 0 or c2 < 0:
        raise ValueError("Poincare constants are non-negative")
    return max(c1, c2)


# ---------------------------------------------------------------------------
# modified Poincare constant


def _bump_profile(r):
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    inside = r < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def _bump_dprofile(r):
    r = np.asarray(r, float)
    out = np.zeros_like(r)
    inside = r < 1
    ri = r[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ri ** 2)) * (-2.0 * ri / (1.0 - ri ** 2) ** 2)
    return out


def bump_h1_constant(d: int, radius: float = 1.0) -> dict:
    """Norms of phi_R(x) = R^-d phi(x/R), phi = C e^{-1/(1-|x|^2)} with unit integral.

    Returns mass, L2 and gradient norms (squared) and c_star = 2 ||phi_R||_{H^1}^2.
    """
    if d not in (1, 2):
        raise ValueError("only d in {1, 2}")
    if not 0 < radius <= 1:
        raise ValueError("bump must be supported in the unit ball")
    surf = 2.0 if d == 1 else 2.0 * math.pi

    def radial(f):
        return surf * quad(lambda r: r ** (d - 1) * f(r), 0, 1, epsabs=0, epsrel=1e-13, limit=200)[0]

    z = radial(lambda r: float(_bump_profile(r)))
    l2 = radial(lambda r: float(_bump_profile(r)) ** 2) / z ** 2
    grad = radial(lambda r: float(_bump_dprofile(r)) ** 2) / z ** 2
    l2_r = l2 * radius ** (-d)
    grad_r = grad * radius ** (-d - 2)
    return {"l2_sq": l2_r, "grad_sq": grad_r, "h1_sq": l2_r + grad_r,
            "c_star": 2.0 * (l2_r + grad_r)}


def local_deviation_1d(u: np.ndarray, h: float) -> np.ndarray:
    """delta_1[u](x) = (int_{|y-x|<1, y in domain} |u(y)-u(x)|^2 dy)^{1/2} on a 1-D lattice."""
    if h > 0.25:
        raise ValueError(f"spacing {h} too coarse to resolve the unit ball")
    u = np.asarray(u)
    n = u.size
    out = np.zeros(n)
    kmax = int(math.floor(1.0 / h))
    for k in range(1, kmax + 1):
        if k * h >= 1.0:
            break
        d = np.abs(u[k:] - u[:-k]) ** 2
        out[:-k] += d
        out[k:] += d
    return np.sqrt(out * h)


@dataclass
class ModifiedPoincareReport:
    lhs: float
    rhs: float
    ratio: float
    c_star: float
    c_p: float
    bound: float
    passed: bool

    def to_dict(self):
        return dict(self.__dict__)


def modified_poincare_check(u, pair: WeightPair, bump_radius: float = 1.0,
                            c_p: float | None = None) -> ModifiedPoincareReport:
    """Compare inf_c ||u-c||^2_v with ||delta_1[u]||^2_w against c*(1 + C_P(v, w))."""
    u = np.asarray(getattr(u, "values", u))
    if u.shape != pair.shape:
        raise ValueError("u does not live on the pair's lattice")
    if not np.all(np.isfinite(u)):
        raise ValueError("u must be bounded")
    vol = pair.volumes()
    mv = pair.v * vol
    mean = np.sum(mv * u) / mv.sum()
    lhs = float(np.sum(mv * np.abs(u - mean) ** 2))
    if u.ndim == 1:
        dev = local_deviation_1d(u, pair.spacing[0])
    else:
        (x0, q0), (hx, hq) = pair.origin, pair.spacing
        nx, nq = pair.shape
        grid = Grid2D(x0, x0 + hx * (nx - 1), nx, q0, q0 + hq * (nq - 1), nq)
        dev = local_deviation(RealField2D(grid, u)).values
    rhs = float(np.sum(pair.w * vol * dev ** 2))
    if c_p is None:
        c_p = estimate_poincare(pair).c_p
    c_star = bump_h1_constant(u.ndim, bump_radius)["c_star"]
    bound = c_star * (1.0 + c_p)
    if rhs > 0:
        ratio = lhs / rhs
    else:
        ratio = 0.0 if lhs <= 1e-300 else math.inf
    return ModifiedPoincareReport(lhs, rhs, ratio, c_star, c_p, bound, ratio <= bound)


# ---------------------------------------------------------------------------
# auxiliary inequalities


@dataclass
class LogConcavityReport:
    worst_violation: float
    location: tuple
    direction: tuple
    passed: bool
    tol: float


def log_concavity_check(w, grid=None, tol: float = 1e-8, log_values: bool = False) -> LogConcavityReport:
    """Discrete midpoint concavity of log w along axis-parallel and diagonal lines.

    ``w`` may be a 1-D/2-D array, a RealField2D, or a callable evaluated on
    the 1-D coordinates in ``grid``.  With ``log_values`` the input already
    holds log w, which avoids underflow for fast-decaying weights.
    """
    if callable(w):
        if grid is None:
            raise ValueError("a callable weight needs sample points")
        vals = w(np.asarray(grid, float))
    else:
        vals = getattr(w, "values", w)
    vals = np.asarray(vals, float)
    if log_values:
        L = vals
        if not np.all(np.isfinite(L)):
            raise ValueError("log weight must be finite")
    else:
        if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
            raise ValueError("weight must be positive and finite")
        L = np.log(vals)
    dirs = [(1,)] if L.ndim == 1 else [(1, 0), (0, 1), (1, 1), (1, -1)]
    worst, loc, where_dir = 0.0, (), ()
    for d in dirs:
        sl_c, sl_m, sl_p = [], [], []
        ok = True
        for n, s in zip(L.shape, d):
            s = abs(s) * (1 if s >= 0 else -1)
            if n < 3 and s != 0:
                ok = False
                break
            if s == 0:
                sl_c.append(slice(None)); sl_m.append(slice(None)); sl_p.append(slice(None))
            elif s > 0:
                sl_c.append(slice(1, n - 1)); sl_m.append(slice(0, n - 2)); sl_p.append(slice(2, n))
            else:
                sl_c.append(slice(1, n - 1)); sl_m.append(slice(2, n)); sl_p.append(slice(0, n - 2))
        if not ok:
            continue
        viol = 0.5 * (L[tuple(sl_m)] + L[tuple(sl_p)]) - L[tuple(sl_c)]
        k = int(np.argmax(viol))
        if viol.flat[k] > worst:
            worst = float(viol.flat[k])
            idx = np.unravel_index(k, viol.shape)
            loc = tuple(int(i) + (1 if s != 0 else 0) for i, s in zip(idx, d))
            where_dir = d
    return LogConcavityReport(worst, loc, where_dir, worst <= tol, tol)


@dataclass
class SinhReport:
    n: int
    v_max: float
    min_ratio: float
    argmin: float
    passed: bool
    taylor_ok: bool


def sinh_inequality_check(v_max: float, n: int) -> SinhReport:
    """sinh(v)^2 >= v^2 (1 + v^2/pi^2)^2 on n points of (0, v_max].

    Compared as log sinh(v) - log v - log(1 + v^2/pi^2) >= 0, which keeps
    full relative accuracy for small v.
    """
    if not v_max > 0:
        raise ValueError("v_max must be positive")
    v = np.linspace(v_max / n, v_max, n)
    log_sinh_over_v = np.where(
        v < 1e-3,
        np.log1p(v ** 2 / 6 + v ** 4 / 120),
        v + np.log1p(-np.exp(-2 * v)) - math.log(2.0) - np.log(v),
    )
    gap = 2.0 * (log_sinh_over_v - np.log1p(v ** 2 / math.pi ** 2))
    k = int(np.argmin(gap))
    # coefficients of v^{2l}: LHS 2^{2l-1}/(2l)!, RHS 1, 2/pi^2, 1/pi^4 for l = 1, 2, 3
    lhs_c = [2 ** (2 * l - 1) / math.factorial(2 * l) for l in (1, 2, 3)]
    rhs_c = [1.0, 2 / math.pi ** 2, 1 / math.pi ** 4]
    taylor_ok = all(a >= b - 1e-15 for a, b in zip(lhs_c, rhs_c))
    return SinhReport(n, v_max, float(np.exp(gap[k])), float(v[k]), bool(np.all(gap >= 0)), taylor_ok)


def lorentz_exp_convolution(xi, b: float) -> np.ndarray:
    """[(1/(1+pi^2 s^2)) * e^{-b|s|}](xi) in closed form via E1 of complex argument.

    With z1 = -xi + i/pi and z2 = xi - i/pi,
        I(xi) = Re[(i/pi) e^{b z1} E1(b z1) - (i/pi) e^{b z2} E1(b z2)].
    """
    xi = np.asarray(xi, float)
    z1 = b * (-xi + 1j / math.pi)
    z2 = b * (xi - 1j / math.pi)
    val = (1j / math.pi) * (np.exp(z1) * exp1(z1) - np.exp(z2) * exp1(z2))
    return val.real


def lorentz_exp_convolution_quad(xi: float, b: float) -> float:
    f = lambda s: math.exp(-b * abs(s)) / (1 + math.pi ** 2 * (xi - s) ** 2)
    pts = sorted({0.0, float(xi)})
    total = quad(f, -math.inf, pts[0], epsabs=0, epsrel=1e-12, limit=200)[0]
    if len(pts) == 2:
        total += quad(f, pts[0], pts[1], epsabs=0, epsrel=1e-12, limit=200)[0]
    total += quad(f, pts[-1], math.inf, epsabs=0, epsrel=1e-12, limit=200)[0]
    return total


@dataclass
class ConvEquivReport:
    b: float
    xi_max: float
    r_min: float
    r_max: float
    spread: float
    spread_doubled: float
    stable: bool
    passed: bool


def convolution_equivalence_check(b: float, xi_max: float, n: int = 4001,
                                  stability_tol: float = 0.01) -> ConvEquivReport:
    """Bounds of r = [(1+pi^2 .^2)^-1 * e^{-b|.|}] / (1+xi^2)^-1 and their stability under doubling."""
    if not b > 0:
        raise ValueError("b must be positive")

    def bounds(xm):
        xi = np.linspace(-xm, xm, n)
        r = lorentz_exp_convolution(xi, b) * (1 + xi ** 2)
        return float(r.min()), float(r.max())

    lo, hi = bounds(xi_max)
    lo2, hi2 = bounds(2 * xi_max)
    spread, spread2 = hi / lo, hi2 / lo2
    stable = abs(spread2 - spread) <= stability_tol * spread
    ok = 0 < lo <= hi < math.inf and stable
    return ConvEquivReport(b, xi_max, lo, hi, spread, spread2, stable, ok)
