"""Named lemma-check suites used by ``gaborstab verify``.

Each suite returns a list of :class:`CaseResult`.  Suites are deterministic
for a given seed; ``tol_scale`` multiplies every tolerance (0 makes any
check with a discretization error fail).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .poincare import (
    WeightPair,
    convolution_equivalence_check,
    log_concavity_check,
    modified_poincare_check,
    separable_convolve,
    sinh_inequality_check,
)
from .stabilitylab import (
    atoms_signal,
    check_hilbert2,
    check_planchshift,
    check_slpr_bound,
    planchshift_fields,
    time_axis,
)
from .tfcore import Grid2D, WindowSpec, log_abs_gamma2, log_ambiguity_modulus
from .weights import GammaWeight, control_function, estimate_mu_norm, verify_tsw

__all__ = ["CaseResult", "SUITES", "run_suite", "planch_grid", "expexp_log_weight"]


@dataclass
class CaseResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    message: str = ""


def suite_hilbert2(seed: int = 0, tol_scale: float = 1.0, n_pairs: int = 1000):
    rng = np.random.default_rng(seed)
    worst1 = worst2 = 0.0
    violations = 0
    for _ in range(n_pairs):
        n = int(rng.integers(4, 257))
        phi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        r = check_hilbert2(phi, psi, rtol=1e-12 * tol_scale)
        worst1, worst2 = max(worst1, r.identity_err1), max(worst2, r.identity_err2)
        violations += not r.passed
    special = []
    phi = rng.normal(size=16) + 1j * rng.normal(size=16)
    for label, psi in (("equal", phi), ("negated", -phi)):
        r = check_hilbert2(phi, psi, rtol=1e-12 * max(tol_scale, 1e-300))
        special.append(CaseResult(f"hilbert2-{label}", r.min_dist_sq <= 1e-24 * r.a and r.passed,
                                  {"min_dist_sq": r.min_dist_sq, "tensor": r.tensor_dist_sq}))
    return [CaseResult("hilbert2-random", violations == 0,
                       {"pairs": n_pairs, "worst_identity1": worst1, "worst_identity2": worst2,
                        "violations": violations},
                       message=f"{violations} violations")] + special


def planch_grid(window: WindowSpec, nx: int = 512, nxi: int = 512) -> Grid2D:
    """Grid used for the shifted-product identity; x in [-12, 12), 0 on the lattice."""
    hx = 24.0 / nx
    if window.kind.value == "onesided":
        xi_lo = -16.0
    else:
        xi_lo = -4.0
    hxi = -2 * xi_lo / nxi
    return Grid2D(-12.0, -12.0 + (nx - 1) * hx, nx, xi_lo, xi_lo + (nxi - 1) * hxi, nxi)


def planch_samples_per_cell(window: WindowSpec) -> int:
    # the one-sided window's jump needs finer time sampling near the top frequencies
    return 8 if window.kind.value == "onesided" else 2


PLANCH_SHIFTS = ((0.0, 0.0), (0.5, 0.25), (-1.2, 0.7), (2.0, -1.0), (-0.3, -1.5))


def suite_planchshift(seed: int = 0, tol_scale: float = 1.0, n_pairs: int = 1, shifts=PLANCH_SHIFTS):
    out = []
    for window in (WindowSpec.expexp(), WindowSpec.onesided()):
        grid = planch_grid(window)
        axis = time_axis(grid, planch_samples_per_cell(window), 50.0)
        rng = np.random.default_rng(seed)
        for k in range(n_pairs):
            f, h = atoms_signal(rng, axis), atoms_signal(rng, axis)
            fields = planchshift_fields(f, window, h, grid)
            for tau in shifts:
                r = check_planchshift(f, window, h, tau, grid, tol=1e-3 * tol_scale, fields=fields)
                out.append(CaseResult(
                    f"planchshift-{window.kind.value}-pair{k}-tau{tau[0]:g},{tau[1]:g}", r.passed,
                    {"lhs": r.lhs, "rhs": r.rhs, "rel_diff": r.rel_diff,
                     "snap_distance": r.snap_distance},
                    message=f"rel diff {r.rel_diff:.3g} vs tol {r.tol:.3g}"))
    return out


def slpr_grid() -> Grid2D:
    return Grid2D(-12.0, 12.0 - 24.0 / 256, 256, -16.0, 16.0 - 32.0 / 256, 256)


def suite_slpr(seed: int = 0, tol_scale: float = 1.0, n_pairs: int = 5):
    window = WindowSpec.onesided()
    gam = GammaWeight(4.0, 1.0)
    grid = slpr_grid()
    axis = time_axis(grid, 8, 50.0)
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n_pairs):
        f, h = atoms_signal(rng, axis), atoms_signal(rng, axis)
        r = check_slpr_bound(f, h, window, gam, grid, tau_box=(3.0, 3.0), stride=4,
                             slice_tol=1e-3 * tol_scale)
        out.append(CaseResult(f"slpr-pair{k}", r.passed,
                              {"lhs": r.lhs, "bound": r.bound, "worst_slice_ratio": r.worst_slice_ratio,
                               "slpr_constant": r.slpr_constant},
                              message=f"worst slice ratio {r.worst_slice_ratio:.4g}"))
    f = atoms_signal(rng, axis)
    r = check_slpr_bound(f, f, window, gam, grid)
    out.append(CaseResult("slpr-equal-signals", r.lhs == 0.0 and r.passed, {"lhs": r.lhs}))
    return out


def suite_tsw(seed: int = 0, tol_scale: float = 1.0):
    grid = Grid2D(-10.0, 10.0, 161, -3.0, 3.0, 121)
    rng = np.random.default_rng(seed)
    taus = np.column_stack([rng.uniform(-4, 4, 40), rng.uniform(-2, 2, 40)])
    out = []
    one = WindowSpec.onesided()
    r = verify_tsw(one, control_function(one), grid, taus, tol=1e-9 * max(tol_scale, 1e-300))
    out.append(CaseResult("tsw-onesided", r.passed, {"worst_ratio": r.worst_ratio}))
    ee = WindowSpec.expexp()
    c = estimate_mu_norm(ee, grid, taus)
    r = verify_tsw(ee, control_function(ee, c), grid, taus, tol=1e-9 * max(tol_scale, 1e-300))
    out.append(CaseResult("tsw-expexp", r.passed and math.isfinite(c), {"c_norm": c, "worst_ratio": r.worst_ratio}))
    return out


def expexp_log_weight(grid: Grid2D, gam: GammaWeight) -> np.ndarray:
    """log of (|V_g g|^2 * gamma)^2 for the ExpExp window, from the closed form."""
    X, Q = grid.mesh()
    power = np.exp(2 * log_ambiguity_modulus(WindowSpec.expexp(), X, Q))
    return 2 * np.log(separable_convolve(power, gam, grid.hx, grid.hxi))


def suite_logconcave(seed: int = 0, tol_scale: float = 1.0):
    tol = 1e-8 * tol_scale
    x = np.linspace(-20, 20, 4001)
    out = []
    r = log_concavity_check(-np.log(np.cosh(x)), tol=tol, log_values=True)
    out.append(CaseResult("logconcave-sech", r.passed, {"worst": r.worst_violation}))
    r = log_concavity_check(2 * log_abs_gamma2(x), tol=tol, log_values=True)
    out.append(CaseResult("logconcave-phi2", r.passed, {"worst": r.worst_violation}))
    grid = Grid2D(-12.0, 12.0, 193, -3.0, 3.0, 241)
    r = log_concavity_check(expexp_log_weight(grid, GammaWeight(1.0, 1.0)), tol=tol, log_values=True)
    out.append(CaseResult("logconcave-expexp-weight", r.passed, {"worst": r.worst_violation}))
    return out


def suite_sinh(seed: int = 0, tol_scale: float = 1.0):
    r = sinh_inequality_check(20.0, 10000)
    return [CaseResult("sinh-inequality", r.passed and r.taylor_ok,
                       {"min_ratio": r.min_ratio, "argmin": r.argmin})]


def suite_convequiv(seed: int = 0, tol_scale: float = 1.0):
    out = []
    for b in (0.5, 1.0, 2.0):
        r = convolution_equivalence_check(b, 50.0, stability_tol=0.01 * tol_scale)
        out.append(CaseResult(f"convequiv-b{b:g}", r.passed,
                              {"r_min": r.r_min, "r_max": r.r_max, "spread": r.spread,
                               "spread_doubled": r.spread_doubled}))
    return out


def suite_modified_poincare(seed: int = 0, tol_scale: float = 1.0):
    out = []
    n = 65
    h = 4.0 / (n - 1)
    xs = np.arange(n) * h
    X, _ = np.meshgrid(xs, xs, indexing="ij")
    uni = WeightPair(np.ones((n, n)), np.ones((n, n)), (h, h))
    r = modified_poincare_check(np.full((n, n), 2.5), uni)
    out.append(CaseResult("modpoinc-constant", r.lhs <= 1e-24 and r.rhs <= 1e-24, r.to_dict()))
    r = modified_poincare_check(0.1 * np.sin(8 * math.pi * X), uni)
    out.append(CaseResult("modpoinc-oscillatory", r.passed, r.to_dict()))
    m = 161
    g = np.linspace(-5, 5, m)
    gw = np.exp(-np.add.outer(g ** 2, g ** 2) / 2)
    gpair = WeightPair(gw, gw, (g[1] - g[0],) * 2, (-5.0, -5.0))
    rng = np.random.default_rng(seed)
    G1, G2 = np.meshgrid(g, g, indexing="ij")
    for k in range(3):
        u = sum(rng.normal() * np.cos(rng.uniform(0.3, 2.0) * (np.cos(a) * G1 + np.sin(a) * G2)
                                      + rng.uniform(0, 2 * math.pi))
                for a in rng.uniform(0, math.pi, 4))
        r = modified_poincare_check(u, gpair)
        out.append(CaseResult(f"modpoinc-gaussian-{k}", r.passed, r.to_dict()))
    return out


SUITES = {
    "hilbert2": suite_hilbert2,
    "planchshift": suite_planchshift,
    "slpr": suite_slpr,
    "tsw": suite_tsw,
    "logconcave": suite_logconcave,
    "sinh": suite_sinh,
    "convequiv": suite_convequiv,
    "modified-poincare": suite_modified_poincare,
}


def run_suite(name: str, seed: int = 0, tol_scale: float = 1.0) -> list[CaseResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    t = time.perf_counter()
    results = SUITES[name](seed=seed, tol_scale=tol_scale)
    if results and all(r.seconds == 0.0 for r in results):
        share = (time.perf_counter() - t) / len(results)
        for r in results:
            r.seconds = share
    return results
