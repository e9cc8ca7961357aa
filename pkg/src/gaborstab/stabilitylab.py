"""End-to-end stability experiments and lemma-level checks.

The main quantity is

    ratio = inf_{|lambda|=1} ||H - lambda F||_L(chi) / ((1 + C_P(w chi, w))^{1/4} d(|F|, |H|))

with w = (|F|^2 * gamma)^2.  For admissible pairs this should stay bounded
over every pair of spectrograms, including pairs whose raw quotient
lhs / d blows up because the spectrogram splits into separated components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize

from .norms import (
    ChiWeight,
    NormKind,
    _ball_conv,
    metric_d,
    mixed_norm,
    phase_aligned_distance,
)
from .poincare import WeightPair, estimate_poincare, weight_from_spectrogram
from .tfcore import (
    Field2D,
    Grid2D,
    RealField2D,
    Signal1D,
    WindowSpec,
    ambiguity_modulus,
    make_window,
    matched_time_axis,
    stft,
    window_values,
)
from .weights import (
    GammaWeight,
    NotAdmissibleError,
    check_admissibility,
    control_function,
    estimate_mu_norm,
    gamma_autocorr,
    slpr_constant,
)

__all__ = [
    "ShiftKind",
    "ExperimentConfig",
    "StabilityReport",
    "check_hilbert2",
    "check_planchshift",
    "check_slpr_bound",
    "make_instability_pair",
    "run_stability_experiment",
    "check_compact_corollary",
    "check_constraint_replacement",
    "standard_suite",
    "time_axis",
    "atoms_signal",
    "bandlimited_noise",
    "RECIPES",
]

ALARM_LHS = 1e-6
ALARM_D = 1e-10
ZERO_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# lifted identities for vectors


@dataclass
class Hilbert2Report:
    a: float
    b: float
    c: float
    min_dist_sq: float
    tensor_dist_sq: float
    identity_err1: float
    identity_err2: float
    lemma_lhs: float
    lemma_rhs: float
    passed: bool


def check_hilbert2(phi, psi, rtol: float = 1e-12) -> Hilbert2Report:
    """Check the two elementary identities and the tensor inequality for one pair.

    min_lambda ||psi - lambda phi||^2 = a + b - 2c and
    ||psi (x) conj psi - phi (x) conj phi||^2 = a^2 + b^2 - 2c^2, where
    a = ||phi||^2, b = ||psi||^2, c = |<psi, phi>|.  Both left sides are
    evaluated directly (vector difference, full outer products).
    """
    phi = np.asarray(phi, complex).ravel()
    psi = np.asarray(psi, complex).ravel()
    if phi.shape != psi.shape:
        raise ValueError(f"length mismatch: {phi.size} vs {psi.size}")
    a = float(np.vdot(phi, phi).real)
    b = float(np.vdot(psi, psi).real)
    inner = complex(np.vdot(phi, psi))  # <psi, phi> = sum psi conj(phi)
    c = abs(inner)
    lam = inner / c if c > 0 else 1.0
    min_dist = float(np.sum(np.abs(psi - lam * phi) ** 2))
    T = np.outer(psi, psi.conj()) - np.outer(phi, phi.conj())
    tensor = float(np.sum(np.abs(T) ** 2))
    e1 = abs(min_dist - (a + b - 2 * c)) / max(a + b, 1e-300)
    e2 = abs(tensor - (a * a + b * b - 2 * c * c)) / max(a * a + b * b, 1e-300)
    lhs = 0.5 * (a + b) * min_dist
    ok = e1 <= rtol and e2 <= rtol and lhs <= tensor + rtol * max(a * a + b * b, 1e-300)
    return Hilbert2Report(a, b, c, min_dist, tensor, e1, e2, lhs, tensor, ok)


# ---------------------------------------------------------------------------
# signals


def time_axis(grid: Grid2D, samples_per_cell: int = 4, half_width: float | None = None):
    """Time lattice (n, dt, t0) for signals analysed on ``grid``."""
    if half_width is None:
        half_width = max(abs(grid.x_min), abs(grid.x_max)) + 40.0
    return matched_time_axis(grid, samples_per_cell, half_width)


def _times(axis):
    n, dt, t0 = axis
    return t0 + dt * np.arange(n)


def atoms_signal(rng: np.random.Generator, axis, n_atoms: int = 3, t_range=(-2.0, 2.0),
                 freq_range=(-1.0, 1.0), width_range=(0.7, 1.5)) -> Signal1D:
    """Random sum of time-frequency shifted Gaussians."""
    n, dt, t0 = axis
    t = _times(axis)
    out = np.zeros(n, complex)
    for _ in range(n_atoms):
        c = complex(rng.normal(), rng.normal())
        tk = rng.uniform(*t_range)
        wk = rng.uniform(*freq_range)
        sk = rng.uniform(*width_range)
        out += c * np.exp(-math.pi * ((t - tk) / sk) ** 2 + 2j * math.pi * wk * t)
    return Signal1D(out, dt, t0)


def bandlimited_noise(rng: np.random.Generator, axis, band: float = 2.0,
                      envelope: float = 4.0) -> Signal1D:
    """Complex Gaussian noise with spectrum in |omega| <= band, under a Gaussian envelope, unit norm.

    Built as a random Fourier series on a fixed frequency lattice, so the
    realization for a given seed does not depend on the sampling rate.
    """
    n, dt, t0 = axis
    t = _times(axis)
    step = 1.0 / (4.0 * envelope)
    freqs = step * np.arange(-int(band / step), int(band / step) + 1)
    coef = rng.normal(size=freqs.size) + 1j * rng.normal(size=freqs.size)
    z = np.exp(2j * math.pi * np.outer(t, freqs)) @ coef
    z *= np.exp(-math.pi * (t / envelope) ** 2)
    sig = Signal1D(z, dt, t0)
    return sig.scaled(1.0 / sig.norm())


class ShiftKind(str, Enum):
    TIME = "time"
    FREQ = "freq"
    DIAGONAL = "diagonal"

    @classmethod
    def parse(cls, name) -> "ShiftKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"timeshift": "time", "freqshift": "freq", "diag": "diagonal"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown shift kind {name!r}; expected one of "
                             f"{[k.value for k in cls]}") from None


def _tf_shifted_window(window: WindowSpec, t, x, xi):
    """pi(x, xi) g (t) = e^{2 pi i xi t} g(t - x)."""
    dt = t[1] - t[0] if t.size > 1 else 1.0
    return np.exp(2j * math.pi * xi * t) * window_values(window, t - x, snap=1e-9 * dt)


def make_instability_pair(window: WindowSpec, s: float, kind="time",
                          grid: Grid2D | None = None, axis=None) -> tuple[Signal1D, Signal1D]:
    """f_pm = pi(-z/2) g +- pi(z/2) g with z = (s, 0), (0, s) or (s, s)."""
    if s < 0:
        raise ValueError("separation must be non-negative")
    kind = ShiftKind.parse(kind)
    if axis is None:
        if grid is None:
            raise ValueError("need a grid or a time axis")
        axis = time_axis(grid)
    n, dt, t0 = axis
    x = s if kind in (ShiftKind.TIME, ShiftKind.DIAGONAL) else 0.0
    xi = s if kind in (ShiftKind.FREQ, ShiftKind.DIAGONAL) else 0.0
    t = _times(axis)
    if grid is not None:
        if x / 2 >= min(-grid.x_min, grid.x_max) or xi / 2 >= min(-grid.xi_min, grid.xi_max):
            raise ValueError(f"separation {s} does not fit in the grid")
    if xi / 2 >= 0.5 / dt or x / 2 >= min(-t0, t[-1]):
        raise ValueError(f"separation {s} does not fit on the time axis")
    g1 = _tf_shifted_window(window, t, -x / 2, -xi / 2)
    g2 = _tf_shifted_window(window, t, x / 2, xi / 2)
    return Signal1D(g1 + g2, dt, t0), Signal1D(g1 - g2, dt, t0)


# ---------------------------------------------------------------------------
# experiment configuration


@dataclass
class ExperimentConfig:
    window: WindowSpec
    gamma: GammaWeight
    chi: ChiWeight
    grid: Grid2D
    recipe: str = "perturbation"
    recipe_params: dict = field(default_factory=dict)
    samples_per_cell: int = 4
    half_width: float | None = None
    tol: dict = field(default_factory=dict)
    case_id: str = "case"
    negative_control: bool = False

    def __post_init__(self):
        if self.recipe not in RECIPES:
            raise ValueError(f"unknown recipe {self.recipe!r}; known: {sorted(RECIPES)}")

    def validate(self):
        if self.negative_control:
            return
        rep = check_admissibility(self.window, self.gamma)
        if not rep.admissible:
            raise NotAdmissibleError(
                f"({self.window.kind.value}, a={self.gamma.a}, b={self.gamma.b}) is not an "
                f"admissible pair; mark the case as a negative control to run it anyway")

    def axis(self):
        return time_axis(self.grid, self.samples_per_cell, self.half_width)


def _recipe_identity(cfg: ExperimentConfig):
    axis = cfg.axis()
    f = make_window(cfg.window, *axis)
    theta = float(cfg.recipe_params.get("theta", 1.0))
    return f, f.scaled(complex(np.exp(1j * theta)))


def _recipe_perturbation(cfg: ExperimentConfig):
    axis = cfg.axis()
    p = cfg.recipe_params
    eps = float(p.get("eps", 1e-2))
    rng = np.random.default_rng(int(p.get("seed", 0)))
    base = str(p.get("base", "window"))
    if base == "window":
        f = make_window(cfg.window, *axis)
    elif base == "atoms":
        f = atoms_signal(rng, axis)
    else:
        raise ValueError(f"unknown base signal {base!r}")
    noise = bandlimited_noise(rng, axis, float(p.get("band", 2.0)), float(p.get("envelope", 4.0)))
    return f, f + noise.scaled(eps * f.norm())


def _recipe_instability(cfg: ExperimentConfig):
    p = cfg.recipe_params
    return make_instability_pair(cfg.window, float(p.get("s", 4.0)), p.get("kind", "time"),
                                 grid=cfg.grid, axis=cfg.axis())


def _recipe_scaled(cfg: ExperimentConfig):
    axis = cfg.axis()
    f = make_window(cfg.window, *axis)
    return f, f.scaled(complex(cfg.recipe_params.get("c", 3.0)))


RECIPES = {
    "identity": _recipe_identity,
    "perturbation": _recipe_perturbation,
    "instability": _recipe_instability,
    "scaled": _recipe_scaled,
}


@dataclass
class StabilityReport:
    case_id: str
    lhs: float
    d_val: float
    c_p: float
    ratio: float
    raw_ratio: float
    alarm: bool = False
    metadata: dict = field(default_factory=dict)

    COLUMNS = ("case_id", "lhs", "d_val", "c_p", "ratio", "raw_ratio", "alarm")

    def row(self) -> tuple:
        return (self.case_id, self.lhs, self.d_val, self.c_p, self.ratio, self.raw_ratio,
                int(self.alarm))


def stability_ratio(lhs: float, d_val: float, c_p: float, scale: float = 1.0) -> tuple[float, bool]:
    """(ratio, alarm).  lhs below ZERO_FLOOR * scale counts as an exact zero."""
    alarm = lhs > ALARM_LHS * scale and d_val < ALARM_D * scale
    if lhs <= ZERO_FLOOR * scale:
        return 0.0, alarm
    if d_val <= 0:
        return math.inf, True
    return lhs / ((1.0 + c_p) ** 0.25 * d_val), alarm


def stability_from_fields(F: Field2D, H: Field2D, gam: GammaWeight, chi: ChiWeight,
                          case_id: str = "case", poincare_kwargs: dict | None = None) -> StabilityReport:
    grid = F.grid
    align = phase_aligned_distance(F, H, chi, NormKind.MIXED)
    d_val = metric_d(F.abs(), H.abs())
    w = weight_from_spectrogram(F, gam)
    v = w.values * chi.on(grid)
    pair = WeightPair(v, w.values, (grid.hx, grid.hxi), (grid.x_min, grid.xi_min))
    est = estimate_poincare(pair, **(poincare_kwargs or {}))
    scale = mixed_norm(F, chi)
    ratio, alarm = stability_ratio(align.value, d_val, est.c_p, scale)
    raw = align.value / d_val if d_val > 0 else (0.0 if align.value <= ZERO_FLOOR * scale else math.inf)
    meta = {
        "lambda": [align.lambda_star.real, align.lambda_star.imag],
        "norm_F": scale,
        "eigen_residual": est.residual,
        "eigen_iterations": est.iterations,
        "eigen_method": est.method,
    }
    return StabilityReport(case_id, align.value, d_val, est.c_p, ratio, raw, alarm, meta)


def run_stability_experiment(cfg: ExperimentConfig) -> StabilityReport:
    cfg.validate()
    f, h = RECIPES[cfg.recipe](cfg)
    F = stft(f, cfg.window, cfg.grid)
    H = stft(h, cfg.window, cfg.grid)
    rep = stability_from_fields(F, H, cfg.gamma, cfg.chi, cfg.case_id)
    rep.metadata.update({"recipe": cfg.recipe, "params": dict(cfg.recipe_params),
                         "window": cfg.window.kind.value, "a": cfg.gamma.a, "b": cfg.gamma.b,
                         "chi": cfg.chi.kind.value, "grid": list(cfg.grid.shape)})
    return rep


# standard grids: a*hx <= 1 and b*hxi <= 1 so gamma is resolved
EXPEXP_GAMMA = GammaWeight(3.0, 2 * math.pi ** 2 + 1)
ONESIDED_GAMMA = GammaWeight(3.0, 1.0)


def standard_grid(window: WindowSpec) -> Grid2D:
    if window.kind.value == "expexp":
        return Grid2D(-16.0, 16.0, 257, -2.0, 2.0, 85)
    return Grid2D(-16.0, 16.0, 257, -8.0, 8.0, 129)


def standard_suite(epsilons=(1e-3, 1e-2, 1e-1), separations=(2.0, 4.0, 6.0, 8.0),
                   seed: int = 7) -> list[ExperimentConfig]:
    """Perturbation and instability cases for both exponential windows."""
    cases = []
    for window, gam, chi in ((WindowSpec.expexp(), EXPEXP_GAMMA, ChiWeight.unit()),
                             (WindowSpec.onesided(), ONESIDED_GAMMA, ChiWeight.cauchy_freq())):
        grid = standard_grid(window)
        name = window.kind.value
        for k, eps in enumerate(epsilons):
            cases.append(ExperimentConfig(window, gam, chi, grid, "perturbation",
                                          {"eps": eps, "seed": seed + k},
                                          case_id=f"{name}-eps{eps:g}"))
        for s in separations:
            cases.append(ExperimentConfig(window, gam, chi, grid, "instability",
                                          {"s": s, "kind": "time"},
                                          case_id=f"{name}-s{s:g}"))
    return cases


# ---------------------------------------------------------------------------
# shifted-product identity


def _snap_tau(tau, grid: Grid2D):
    p = int(round(tau[0] / grid.hx))
    q = int(round(tau[1] / grid.hxi))
    snapped = (p * grid.hx, q * grid.hxi)
    return (p, q), snapped, math.hypot(snapped[0] - tau[0], snapped[1] - tau[1])


def _shifted_product(A: np.ndarray, B: np.ndarray, p: int, q: int):
    """A(z) conj(B(z + tau)) on the overlap of the grid with its shift."""
    nx, nq = A.shape
    i0, i1 = max(0, -p), min(nx, nx - p)
    j0, j1 = max(0, -q), min(nq, nq - q)
    if i1 <= i0 or j1 <= j0:
        return np.zeros((0, 0), complex)
    return A[i0:i1, j0:j1] * np.conj(B[i0 + p:i1 + p, j0 + q:j1 + q])


def shifted_product_norm(F: np.ndarray, H: np.ndarray, p: int, q: int, cell_area: float) -> float:
    d = _shifted_product(F, F, p, q) - _shifted_product(H, H, p, q)
    return float(np.sum(np.abs(d) ** 2) * cell_area) ** 0.5


@dataclass
class PlanchShiftReport:
    tau: tuple
    snapped_tau: tuple
    snap_distance: float
    lhs: float
    rhs: float
    rel_diff: float
    tol: float
    passed: bool


def _window_ambiguity_on(g, grid: Grid2D, shift=(0.0, 0.0)) -> np.ndarray:
    """|V_g g| on ``grid`` translated by ``shift``."""
    X, Q = grid.mesh()
    if isinstance(g, WindowSpec) and g.has_closed_form:
        return ambiguity_modulus(g, X + shift[0], Q + shift[1])
    shifted = Grid2D(grid.x_min + shift[0], grid.x_max + shift[0], grid.nx,
                     grid.xi_min + shift[1], grid.xi_max + shift[1], grid.nxi)
    return np.abs(stft(g, g, shifted).values)


def planchshift_fields(f: Signal1D, g, h: Signal1D, grid: Grid2D):
    """(V_g f, V_g h, V_f f - V_h h) on ``grid``; independent of the shift."""
    F = stft(f, g, grid).values
    H = stft(h, g, grid).values
    diff = stft(f, f, grid).values - stft(h, h, grid).values
    return F, H, diff


def _kink_correction(g, grid: Grid2D, diff: np.ndarray, p: int, snapped) -> float:
    """Euler-Maclaurin term for the kink of |V_g g|^2 = e^{-2|x|} c(xi) (one-sided window).

    The kink sits on the grid column x = -tau_1; the trapezoid sum over x
    overshoots the integral by (h^2/12) times the jump of the x-derivative,
    which is 4 |D|^2 c(xi) there.
    """
    if not (isinstance(g, WindowSpec) and g.kind.value == "onesided"):
        return 0.0
    i = int(round((-snapped[0] - grid.x_min) / grid.hx))
    if not 0 < i < grid.nx - 1:
        return 0.0
    c = ambiguity_modulus(g, 0.0, grid.xis + snapped[1]) ** 2
    col = np.abs(diff[i]) ** 2 * c
    return float(grid.hx ** 2 / 12.0 * 4.0 * np.sum(col) * grid.hxi)


def check_planchshift(f: Signal1D, g, h: Signal1D, tau, grid: Grid2D, tol: float = 1e-3,
                      fields=None) -> PlanchShiftReport:
    """||F conj F(.+tau) - H conj H(.+tau)|| against ||(V_f f - V_h h) V_g g(.+tau)||.

    The left side uses shifted products of the two computed STFTs; the right
    side uses the self-STFTs of f and h and |V_g g| at the shifted points
    (closed form when available).  ``tau`` is snapped to the grid.  Pass
    ``fields`` from :func:`planchshift_fields` to reuse the STFTs across shifts.
    """
    if f.n != h.n or not math.isclose(f.dt, h.dt, rel_tol=1e-12):
        raise ValueError("f and h must share a time axis")
    (p, q), snapped, dist = _snap_tau(tau, grid)
    if fields is None:
        fields = planchshift_fields(f, g, h, grid)
    F, H, diff = fields
    lhs = shifted_product_norm(F, H, p, q, grid.cell_area)
    amb = _window_ambiguity_on(g, grid, snapped)
    rhs_sq = float(np.sum(np.abs(diff * amb) ** 2) * grid.cell_area)
    rhs_sq -= _kink_correction(g, grid, diff, p, snapped)
    rhs = max(rhs_sq, 0.0) ** 0.5
    scale = max(lhs, rhs)
    rel = abs(lhs - rhs) / scale if scale > 0 else 0.0
    return PlanchShiftReport(tuple(map(float, tau)), snapped, dist, lhs, rhs, rel, tol,
                             rel <= tol if scale > 0 else True)


# ---------------------------------------------------------------------------
# lifted stability for the STFT


@dataclass
class SlprReport:
    lhs: float
    bound: float
    margin: float
    slpr_constant: float
    diag_diff: float
    worst_slice_ratio: float
    worst_tau: tuple
    slices_ok: bool
    passed: bool
    slice_ratios: list = field(default_factory=list, repr=False)


def check_slpr_bound(f: Signal1D, h: Signal1D, window: WindowSpec, gam: GammaWeight,
                     grid: Grid2D, tau_box=(3.0, 3.0), stride: int = 4,
                     slice_tol: float = 1e-3, fields=None) -> SlprReport:
    """Integrated lifted bound and per-tau slice bounds for one signal pair.

    slice(tau) = ||F conj F(.+tau) - H conj H(.+tau)|| must not exceed
    mu(tau) ||F|^2 - |H|^2||, and sum_tau slice^2 (gamma * R gamma)(tau) dtau
    over the box must not exceed slpr_constant^2 ||F|^2 - |H|^2||^2.
    """
    mu = control_function(window)
    if window.kind.value == "expexp":
        # the constant in mu is measured as a sup over sampled shifts
        taus = np.array([(t1, t2) for t1 in np.linspace(-tau_box[0], tau_box[0], 9)
                         for t2 in np.linspace(-tau_box[1], tau_box[1], 9)])
        mu = mu.with_norm(estimate_mu_norm(window, grid, taus))
    const = slpr_constant(window, gam, mu)
    if fields is None:
        F = stft(f, window, grid).values
        H = stft(h, window, grid).values
    else:
        F, H = fields
    area = grid.cell_area
    diag = float(np.sum((np.abs(F) ** 2 - np.abs(H) ** 2) ** 2) * area) ** 0.5
    pmax = int(tau_box[0] / grid.hx) // stride * stride
    qmax = int(tau_box[1] / grid.hxi) // stride * stride
    if pmax >= grid.nx or qmax >= grid.nxi:
        raise ValueError("tau box does not fit inside the grid")
    dtau = (stride * grid.hx) * (stride * grid.hxi)
    lhs = 0.0
    worst, worst_tau = 0.0, (0.0, 0.0)
    ratios = []
    for p in range(-pmax, pmax + 1, stride):
        for q in range(-qmax, qmax + 1, stride):
            t1, t2 = p * grid.hx, q * grid.hxi
            sl = shifted_product_norm(F, H, p, q, area)
            lhs += sl ** 2 * float(gamma_autocorr(gam, t1, t2)) * dtau
            if diag > 0:
                r = sl / (mu(t1, t2) * diag)
                ratios.append(((t1, t2), r))
                if r > worst:
                    worst, worst_tau = r, (t1, t2)
    bound = const ** 2 * diag ** 2
    slices_ok = worst <= 1.0 + slice_tol
    return SlprReport(lhs, bound, bound - lhs, const, diag, worst, worst_tau, slices_ok,
                      slices_ok and lhs <= bound, ratios)


# ---------------------------------------------------------------------------
# compactly supported chi


@dataclass
class CompactCorollaryReport:
    sup_inf_ratio: float
    c_p_omega: float
    c_p_bound: float
    c_emp: float
    bound_factor: float
    cases: list
    worst: float
    passed: bool


def check_compact_corollary(f: Signal1D, window: WindowSpec, gam: GammaWeight, K, perturbations,
                            grid: Grid2D, c_emp: float, margin: float = 1.0) -> CompactCorollaryReport:
    """Bound chain for chi = 1_K.

    On the rectangle Omega = K enlarged by ``margin``, C_P(w 1_K, w) is at most
    (sup_Omega w / inf_Omega w) C_P(1_Omega).  With L = c_emp (1 + that)^{1/4}
    every perturbation h must satisfy lhs <= L d(|F|, |H|).
    """
    x0, x1, q0, q1 = map(float, K)
    if not (grid.x_min <= x0 < x1 <= grid.x_max and grid.xi_min <= q0 < q1 <= grid.xi_max):
        raise ValueError("K must lie inside the grid")
    ox0, ox1 = max(grid.x_min, x0 - margin), min(grid.x_max, x1 + margin)
    oq0, oq1 = max(grid.xi_min, q0 - margin), min(grid.xi_max, q1 + margin)
    F = stft(f, window, grid)
    w = weight_from_spectrogram(F, gam).values
    xs, qs = grid.xs, grid.xis
    ix = (xs >= ox0 - 1e-12) & (xs <= ox1 + 1e-12)
    iq = (qs >= oq0 - 1e-12) & (qs <= oq1 + 1e-12)
    w_om = w[np.ix_(ix, iq)]
    if not np.all(w_om > 0):
        raise ValueError("w vanishes on Omega")
    sup_inf = float(w_om.max() / w_om.min())
    ones = np.ones(w_om.shape)
    c_om = estimate_poincare(WeightPair(ones, ones, (grid.hx, grid.hxi))).c_p
    c_bound = sup_inf * c_om
    factor = c_emp * (1.0 + c_bound) ** 0.25
    chi = ChiWeight.compact((x0, x1, q0, q1))
    cases = []
    worst = 0.0
    for h in perturbations:
        H = stft(h, window, grid)
        lhs = phase_aligned_distance(F, H, chi, NormKind.MIXED).value
        d = metric_d(F.abs(), H.abs())
        r = lhs / (factor * d) if d > 0 else (0.0 if lhs == 0 else math.inf)
        cases.append({"lhs": lhs, "d_val": d, "bound": factor * d, "ratio": r})
        worst = max(worst, r)
    return CompactCorollaryReport(sup_inf, c_om, c_bound, c_emp, factor, cases, worst, worst <= 1.0)


# ---------------------------------------------------------------------------
# unimodular versus complex alignment


@dataclass
class ConstraintReport:
    inf_lambda: float
    inf_c: float
    c_star: complex
    phaseless: float
    rhs: float
    passed: bool


def _mixed_objective_c(F: Field2D, H: Field2D, chi: ChiWeight):
    grid = F.grid
    wq = grid.quad_weights() * chi.on(grid)
    f, h = F.values, H.values
    Ah = _ball_conv(np.abs(h) ** 2, grid)
    Af = _ball_conv(np.abs(f) ** 2, grid)
    C = _ball_conv(h * np.conj(f), grid)

    def fun(z):
        c = complex(z[0], z[1])
        # |h - c f|^2 = |h|^2 + |c|^2 |f|^2 - 2 Re(conj(c) h conj f)
        b = np.maximum(Ah + abs(c) ** 2 * Af - 2.0 * np.real(np.conj(c) * C), 0.0)
        return float(np.sum(b ** 2 * wq))

    return fun, complex(np.sum(h * np.conj(f) * wq) / max(np.sum(np.abs(f) ** 2 * wq), 1e-300))


def check_constraint_replacement(F: Field2D, H: Field2D, chi: ChiWeight | None = None,
                                 rtol: float = 1e-9) -> ConstraintReport:
    """inf_lambda ||H - lambda F|| <= 2 inf_c ||H - c F|| + || |H| - |F| || in L(chi)."""
    chi = chi or ChiWeight.unit()
    inf_lam = phase_aligned_distance(F, H, chi, NormKind.MIXED).value
    fun, c0 = _mixed_objective_c(F, H, chi)
    # the objective is convex in c (square of a non-negative convex quadratic)
    res = minimize(fun, [c0.real, c0.imag], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 0.0, "maxiter": 4000})
    # rank the candidates without the cancelling expansion so exact multiples give 0
    cands = [(mixed_norm(Field2D(F.grid, H.values - c * F.values), chi), c)
             for c in (c0, complex(*res.x), 0j)]
    inf_c, c_star = min(cands, key=lambda t: t[0])
    phaseless = mixed_norm(RealField2D(F.grid, np.abs(H.values) - np.abs(F.values)), chi)
    rhs = 2 * inf_c + phaseless
    scale = max(mixed_norm(F, chi), mixed_norm(H, chi), 1e-300)
    return ConstraintReport(inf_lam, inf_c, c_star, phaseless, rhs, inf_lam <= rhs + rtol * scale)
