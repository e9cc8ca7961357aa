"""Acceptance criteria 1-10, one test each.

Every test prints a single ``[ACCEPTANCE n] PASS|FAIL ...`` line.  Run this
file directly (``python3 tests/test_acceptance.py``) to get just the lines.
"""

import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

from gaborstab.cli import main as cli_main
from gaborstab.norms import ChiWeight
from gaborstab.poincare import (
    WeightPair,
    cauchy_pair,
    convolution_equivalence_check,
    estimate_cheeger,
    estimate_poincare,
    log_concavity_check,
    sinh_inequality_check,
    weight_from_spectrogram,
)
from gaborstab.stabilitylab import run_stability_experiment, standard_suite
from gaborstab.suites import expexp_log_weight, suite_hilbert2, suite_planchshift
from gaborstab.tfcore import (
    Field2D,
    Grid2D,
    WindowSpec,
    ambiguity_modulus,
    log_abs_gamma2,
    make_window,
    stft,
)
from gaborstab.weights import GammaWeight, check_admissibility

ROOT = Path(__file__).resolve().parents[1]
PI2 = 2 * math.pi ** 2


def report(n, passed, detail):
    line = f"[ACCEPTANCE {n}] {'PASS' if passed else 'FAIL'} {detail}"
    sys.__stdout__.write(line + "\n")
    sys.__stdout__.flush()
    return passed


# --- 1 ------------------------------------------------------------------------


def criterion_1():
    t = time.perf_counter()
    res = suite_hilbert2(seed=0)
    secs = time.perf_counter() - t
    main = res[0].detail
    ok = all(r.passed for r in res) and main["violations"] == 0 and secs < 5
    return ok, (f"1000 pairs, worst identity errors {main['worst_identity1']:.2e}/"
                f"{main['worst_identity2']:.2e}, violations {main['violations']}, {secs:.2f}s")


# --- 2 ------------------------------------------------------------------------


def ambiguity_error(window, n, samples_per_cell=4, half_width=40.0):
    """max | |stft(g, g)| - closed form | / max closed form on [-4, 4]^2 with n x n points."""
    grid = Grid2D(-4.0, 4.0, n, -4.0, 4.0, n)
    dt = grid.hx / samples_per_cell
    m = int(round(2 * half_width / dt)) + 1
    g = make_window(window, m, dt, -dt * (m // 2))
    A = np.abs(stft(g, window, grid).values)
    X, Q = grid.mesh()
    B = ambiguity_modulus(window, X, Q)
    return float(np.max(np.abs(A - B)) / B.max())


ROUNDOFF_FLOOR = 1e-8


def criterion_2():
    parts, ok = [], True
    for window, tol in ((WindowSpec.expexp(), 1e-3), (WindowSpec.gaussian(), 1e-3),
                        (WindowSpec.onesided(), 1e-2)):
        t = time.perf_counter()
        e1 = ambiguity_error(window, 512)
        e2 = ambiguity_error(window, 1024)
        secs = time.perf_counter() - t
        refines = e2 < e1 or max(e1, e2) <= ROUNDOFF_FLOOR
        ok &= e1 <= tol and refines and secs < 60
        parts.append(f"{window.kind.value} {e1:.2e}->{e2:.2e} ({secs:.1f}s)")
    return ok, "; ".join(parts)


# --- 3 ------------------------------------------------------------------------


def criterion_3():
    t = time.perf_counter()
    res = suite_planchshift(seed=0, n_pairs=10)
    secs = time.perf_counter() - t
    worst = max(r.detail["rel_diff"] for r in res)
    ok = len(res) == 100 and all(r.passed for r in res) and worst <= 1e-3 and secs < 600
    return ok, f"{len(res)} cases, worst relative difference {worst:.2e}, {secs:.1f}s"


# --- 4 ------------------------------------------------------------------------


def criterion_4():
    cases = [
        (WindowSpec.expexp(), GammaWeight(PI2 + 1, 3), True),
        (WindowSpec.onesided(), GammaWeight(3, 1), True),
        (WindowSpec.expexp(), GammaWeight(PI2 - 1, 3), False),
        (WindowSpec.onesided(), GammaWeight(1.5, 1), False),
    ]
    ok, parts = True, []
    for window, gam, expected in cases:
        rep = check_admissibility(window, gam)
        slope_ok = (rep.tail_slope < 0) == expected
        good = rep.admissible == expected and rep.divergent == (not expected) and slope_ok
        ok &= good
        parts.append(f"{window.kind.value}(a={gam.a:.4g},b={gam.b:g}) admissible={rep.admissible} "
                     f"slope={rep.tail_slope:+.3g} expected={expected}")
    return ok, "; ".join(parts)


# --- 5 ------------------------------------------------------------------------


def criterion_5():
    parts, ok = [], True
    t = time.perf_counter()
    c = estimate_poincare(WeightPair.on_interval(np.ones_like, np.ones_like, 0.0, 1.0, 1024)).c_p
    s1 = time.perf_counter() - t
    ok &= abs(c * math.pi ** 2 - 1) <= 0.01 and s1 < 30
    parts.append(f"uniform C_P*pi^2={c * math.pi ** 2:.6f}")
    gauss = lambda x: np.exp(-x * x / 2)  # noqa: E731
    t = time.perf_counter()
    c = estimate_poincare(WeightPair.on_interval(gauss, gauss, -10.0, 10.0, 1024)).c_p
    s2 = time.perf_counter() - t
    ok &= abs(c - 1) <= 0.02 and s2 < 30
    parts.append(f"gaussian C_P={c:.6f}")
    t = time.perf_counter()
    c = estimate_poincare(cauchy_pair(2.0, -50.0, 50.0, 2048)).c_p
    s3 = time.perf_counter() - t
    ok &= c <= 0.25 * 1.03 and s3 < 30
    parts.append(f"cauchy beta=2 C_P={c:.6f} <= {0.25 * 1.03:.4f}")
    parts.append(f"times {s1:.1f}/{s2:.1f}/{s3:.1f}s")
    return ok, "; ".join(parts)


# --- 6 ------------------------------------------------------------------------


def spectrogram_weights():
    """w from the two standard spectrograms: closed-form |V_g g| convolved with gamma."""
    out = []
    for window, gam, grid in ((WindowSpec.onesided(), GammaWeight(3.0, 1.0), Grid2D(-8, 8, 65, -8, 8, 65)),
                              (WindowSpec.expexp(), GammaWeight(3.0, PI2 + 1), Grid2D(-12, 12, 97, -2, 2, 85))):
        X, Q = grid.mesh()
        F = Field2D(grid, ambiguity_modulus(window, X, Q).astype(complex))
        w = weight_from_spectrogram(F, gam).values
        out.append((f"spectrogram-{window.kind.value}",
                    WeightPair(w, w, (grid.hx, grid.hxi), (grid.x_min, grid.xi_min))))
    return out


def criterion_6():
    ones = np.ones_like
    gauss = lambda x: np.exp(-x * x / 2)  # noqa: E731
    uni = estimate_cheeger(WeightPair.on_interval(ones, ones, 0.0, 1.0, 1024))
    ok = abs(uni.h - 2.0) <= 0.1
    parts = [f"uniform h={uni.h:.4f}"]
    weights = [("uniform", WeightPair.on_interval(ones, ones, 0.0, 1.0, 1024)),
               ("gaussian", WeightPair.on_interval(gauss, gauss, -10.0, 10.0, 1024))]
    for s in (2, 4, 6, 8):
        b = lambda x, s=s: np.exp(-(x - s / 2) ** 2 / 2) + np.exp(-(x + s / 2) ** 2 / 2)  # noqa: E731
        weights.append((f"twobump-s{s}", WeightPair.on_interval(b, b, -s / 2 - 8, s / 2 + 8, 1024)))
    weights += spectrogram_weights()
    for name, pair in weights:
        che = estimate_cheeger(pair)
        ok &= che.inequality_holds and che.h > 0
        parts.append(f"{name} C_P={che.c_p:.4g}<=4/h^2={che.cheeger_bound:.4g}")
    return ok, "; ".join(parts)


# --- 7 ------------------------------------------------------------------------


def criterion_7():
    sinh = sinh_inequality_check(20.0, 10000)
    ok = sinh.passed and sinh.taylor_ok
    parts = [f"sinh min ratio {sinh.min_ratio:.7f} at v={sinh.argmin:.3g}"]
    x = np.linspace(-20, 20, 4001)
    grid = Grid2D(-12.0, 12.0, 193, -3.0, 3.0, 241)
    checks = [("sech", log_concavity_check(-np.log(np.cosh(x)), tol=1e-8, log_values=True)),
              ("phi2", log_concavity_check(2 * log_abs_gamma2(x), tol=1e-8, log_values=True)),
              ("w", log_concavity_check(expexp_log_weight(grid, GammaWeight(1.0, 1.0)), tol=1e-8,
                                        log_values=True))]
    for name, rep in checks:
        ok &= rep.passed and rep.worst_violation <= 1e-8
        parts.append(f"logconcave {name} worst {rep.worst_violation:.1e}")
    for b in (0.5, 1.0, 2.0):
        rep = convolution_equivalence_check(b, 50.0)
        change = abs(rep.spread_doubled - rep.spread) / rep.spread
        ok &= rep.passed and change <= 0.01
        parts.append(f"convequiv b={b:g} r in [{rep.r_min:.4g},{rep.r_max:.4g}] change {change:.2%}")
    return ok, "; ".join(parts)


# --- 8 ------------------------------------------------------------------------


def onesided_weight_pair(grid, chi):
    X, Q = grid.mesh()
    F = Field2D(grid, ambiguity_modulus(WindowSpec.onesided(), X, Q).astype(complex))
    w = weight_from_spectrogram(F, GammaWeight(3.0, 1.0)).values
    return WeightPair(w * chi.on(grid), w, (grid.hx, grid.hxi), (grid.x_min, grid.xi_min))


def criterion_8():
    base = Grid2D(-8.0, 8.0, 65, -8.0, 8.0, 65)
    cps = [estimate_poincare(onesided_weight_pair(base.scaled(k, k), ChiWeight.cauchy_freq())).c_p
           for k in (1, 2, 4)]
    changes = [abs(b - a) / a for a, b in zip(cps, cps[1:])]
    stable = all(c < 0.10 for c in changes)
    ctrl = []
    for k in (1, 2, 4, 8):
        g = Grid2D(base.x_min, base.x_max, base.nx, base.xi_min * k, base.xi_max * k,
                   (base.nxi - 1) * k + 1)
        ctrl.append(estimate_poincare(onesided_weight_pair(g, ChiWeight.unit())).c_p)
    growth = [b / a for a, b in zip(ctrl, ctrl[1:])]
    divergent = all(r >= 2.0 for r in growth)
    detail = (f"chi=1/(1+xi^2): C_P {', '.join(f'{c:.5g}' for c in cps)} (changes "
              f"{', '.join(f'{c:.1%}' for c in changes)}); chi=1: C_P {', '.join(f'{c:.4g}' for c in ctrl)} "
              f"(growth {', '.join(f'{r:.2f}x' for r in growth)}, divergence flag {divergent})")
    return stable and divergent, detail


# --- 9 ------------------------------------------------------------------------


def criterion_9():
    t = time.perf_counter()
    reps = [run_stability_experiment(c) for c in standard_suite()]
    secs = time.perf_counter() - t
    ratios = [r.ratio for r in reps]
    spread = max(ratios) / min(ratios)
    ok = spread <= 50 and secs < 1800 and not any(r.alarm for r in reps)
    parts = [f"ratios {min(ratios):.4g}..{max(ratios):.4g}, max/min {spread:.1f} (limit 50)"]
    for name in ("expexp", "onesided"):
        sweep = [r for r in reps if r.case_id.startswith(f"{name}-s")]
        ds = [r.d_val for r in sweep]
        cps = [r.c_p for r in sweep]
        mono = all(b < a for a, b in zip(ds, ds[1:])) and all(b > a for a, b in zip(cps, cps[1:]))
        ok &= mono
        parts.append(f"{name} sweep d {' > '.join(f'{d:.3g}' for d in ds)}, "
                     f"C_P {' < '.join(f'{c:.3g}' for c in cps)}")
    parts.append(f"{secs:.1f}s")
    return ok, "; ".join(parts)


# --- 10 -----------------------------------------------------------------------


def criterion_10():
    cfg = str(ROOT / "configs" / "stability_standard.ini")
    with tempfile.TemporaryDirectory() as tmp:
        codes = [cli_main(["stability", "--config", cfg, "--out", f"{tmp}/run{k}", "--jobs", str(j)])
                 for k, j in ((1, 1), (2, 1), (3, 2))]
        blobs = [[(Path(tmp) / f"run{k}" / name).read_bytes() for name in ("stability.csv", "summary.csv")]
                 for k in (1, 2, 3)]
    same = blobs[0] == blobs[1] == blobs[2]
    return same and codes[0] == codes[1] == codes[2], f"3 runs byte-identical={same}, exit codes {codes}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n, capsys):
    passed, detail = CRITERIA[n]()
    with capsys.disabled():
        report(n, passed, detail)
    assert passed, detail


if __name__ == "__main__":
    results = [report(n, *CRITERIA[n]()) for n in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
