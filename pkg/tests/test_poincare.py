import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaborstab.poincare import (
    WeightPair,
    bobkov_moment_bound,
    bump_h1_constant,
    cauchy_pair,
    cauchy_pair_bound,
    convolution_equivalence_check,
    domain_doubling_study,
    estimate_cheeger,
    estimate_poincare,
    log_concavity_check,
    modified_poincare_check,
    sinh_inequality_check,
    tensor_bound,
    weight_from_spectrogram,
)
from gaborstab.poincare import lorentz_exp_convolution
from gaborstab.tfcore import Field2D, Grid2D, WindowSpec, ambiguity_modulus, log_abs_gamma2
from gaborstab.weights import GammaWeight

import oracles


def ones(x):
    return np.ones_like(x)


def gauss(x):
    return np.exp(-x * x / 2)


def two_bumps(s):
    return lambda x: np.exp(-(x - s / 2) ** 2 / 2) + np.exp(-(x + s / 2) ** 2 / 2)


# --- Poincare constants -----------------------------------------------------


@pytest.mark.parametrize("n", [128, 1024])
def test_uniform_matches_discrete_neumann_oracle(n):
    est = estimate_poincare(WeightPair.on_interval(ones, ones, 0.0, 1.0, n))
    assert est.c_p == pytest.approx(oracles.neumann_uniform_cp(n), rel=1e-9)
    assert est.c_p == pytest.approx(1 / math.pi ** 2, rel=1e-2)


def test_uniform_iterative_solver_agrees():
    pair = WeightPair.on_interval(ones, ones, 0.0, 1.0, 2048)
    est = estimate_poincare(pair, method="iterative")
    assert est.method == "iterative"
    assert est.c_p == pytest.approx(oracles.neumann_uniform_cp(2048), rel=1e-8)


def test_gaussian_is_one():
    pair = WeightPair.on_interval(gauss, gauss, -10.0, 10.0, 801)
    est = estimate_poincare(pair)
    assert est.c_p == pytest.approx(1.0, rel=2e-2)
    ref = oracles.weighted_fd_cp(np.linspace(-10, 10, 801), gauss)
    assert est.c_p == pytest.approx(ref, rel=1e-4)


def test_two_bumps_grow_with_separation():
    cps = [estimate_poincare(WeightPair.on_interval(two_bumps(s), two_bumps(s), -s / 2 - 8, s / 2 + 8, 1024)).c_p
           for s in (2, 4, 6, 8)]
    assert all(b > a for a, b in zip(cps, cps[1:]))
    assert cps[-1] > 100 * cps[0]


def test_cauchy_pair_below_bound():
    assert cauchy_pair_bound(2, 1) == 0.25
    assert cauchy_pair_bound(3, 2) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        cauchy_pair_bound(1.5, 1)
    est = estimate_poincare(cauchy_pair(2.0, -50.0, 50.0, 2048))
    assert est.c_p <= 0.25 * 1.03


def test_tensor_bound_and_product_weight():
    assert tensor_bound(0.1, 0.25) == 0.25
    assert tensor_bound(0.3, 0.3) == 0.3
    n = 41
    x = np.linspace(-5, 5, n)
    y = np.linspace(0, 1, n)
    w = np.outer(gauss(x), np.ones(n))
    two = estimate_poincare(WeightPair(w, w, (x[1] - x[0], y[1] - y[0]), (-5.0, 0.0))).c_p
    c1 = estimate_poincare(WeightPair.on_interval(gauss, gauss, -5, 5, n)).c_p
    c2 = estimate_poincare(WeightPair.on_interval(ones, ones, 0, 1, n)).c_p
    assert two == pytest.approx(tensor_bound(c1, c2), rel=1e-8)
    assert two <= tensor_bound(c1, c2) * 1.05


@settings(max_examples=15, deadline=None)
@given(scale=st.floats(0.2, 5.0), mass=st.floats(1e-3, 1e3))
def test_poincare_scale_covariance(scale, mass):
    # stretching the domain by L multiplies C_P by L^2; scaling w leaves it alone
    base = estimate_poincare(WeightPair.on_interval(gauss, gauss, -6, 6, 201)).c_p
    x = np.linspace(-6 * scale, 6 * scale, 201)
    wx = mass * gauss(x / scale)
    est = estimate_poincare(WeightPair(wx, wx, (x[1] - x[0],), (x[0],))).c_p
    assert est == pytest.approx(base * scale ** 2, rel=1e-8)


@settings(max_examples=15, deadline=None)
@given(k=st.floats(0.0, 1.0))
def test_smaller_v_gives_smaller_constant(k):
    # C_P(v, w) is monotone in v
    base = estimate_poincare(WeightPair.on_interval(gauss, gauss, -6, 6, 121)).c_p
    damp = lambda x: gauss(x) / (1 + k * x * x)  # noqa: E731
    assert estimate_poincare(WeightPair.on_interval(damp, gauss, -6, 6, 121)).c_p <= base * (1 + 1e-10)


def test_domain_doubling_flags_divergence():
    # v = w = 1 on [-L, L]: C_P = (2L/pi)^2 grows 4x per doubling
    study = domain_doubling_study(lambda L: WeightPair.on_interval(ones, ones, -L, L, 201), [1, 2, 4, 8])
    assert study.divergent and study.c_p == math.inf
    stable = domain_doubling_study(lambda L: WeightPair.on_interval(gauss, gauss, -L, L, 401), [4, 8, 16])
    assert not stable.divergent and stable.c_p == pytest.approx(1.0, rel=2e-2)


def test_mismatched_pair_rejected():
    with pytest.raises(ValueError):
        WeightPair(np.ones(5), np.ones(6), (0.1,))


# --- Cheeger ----------------------------------------------------------------


def test_cheeger_uniform():
    che = estimate_cheeger(WeightPair.on_interval(ones, ones, 0, 1, 512))
    assert che.h == pytest.approx(2.0, rel=5e-2)
    assert che.inequality_holds


def test_cheeger_gaussian_half_line():
    # the optimal set is a half-line at the median: h = 2 * density(0)
    che = estimate_cheeger(WeightPair.on_interval(gauss, gauss, -10, 10, 1024))
    assert che.h == pytest.approx(2 / math.sqrt(2 * math.pi), rel=1e-3)


def test_cheeger_two_bumps_and_inequality():
    hs = []
    for s in (2, 4, 6, 8):
        che = estimate_cheeger(WeightPair.on_interval(two_bumps(s), two_bumps(s), -s / 2 - 8, s / 2 + 8, 1024))
        assert che.c_p <= che.cheeger_bound
        hs.append(che.h)
    assert all(b < a for a, b in zip(hs, hs[1:]))
    assert hs[-1] < 0.05


def test_cheeger_spectrogram_weight():
    grid = Grid2D(-8, 8, 65, -8, 8, 65)
    X, Q = grid.mesh()
    F = Field2D(grid, ambiguity_modulus(WindowSpec.onesided(), X, Q).astype(complex))
    w = weight_from_spectrogram(F, GammaWeight(3, 1))
    che = estimate_cheeger(w.values, (grid.hx, grid.hxi), (grid.x_min, grid.xi_min))
    assert che.inequality_holds and che.h > 0


# --- weights from spectrograms ----------------------------------------------


def _closed_form_field(window, grid):
    X, Q = grid.mesh()
    return Field2D(grid, ambiguity_modulus(window, X, Q).astype(complex))


def test_weight_of_zero_field():
    grid = Grid2D(-4, 4, 33, -4, 4, 33)
    w = weight_from_spectrogram(Field2D(grid, np.zeros(grid.shape, complex)), GammaWeight(1, 1))
    assert np.all(w.values == 0)


def test_weight_strictly_positive_and_mass():
    gam = GammaWeight(2.0, 3.0)
    grid = Grid2D(-30, 30, 601, -30, 30, 601)
    F = _closed_form_field(WindowSpec.gaussian(), grid)
    w = weight_from_spectrogram(F, gam).values
    assert np.all(w > 0)
    power = np.abs(F.values) ** 2
    conv_mass = float(np.sum(np.sqrt(w) * grid.quad_weights()))
    ref = float(np.sum(power * grid.quad_weights())) * gam.integral
    assert conv_mass == pytest.approx(ref, rel=1e-3)


# --- Bobkov moment ----------------------------------------------------------


def test_bobkov_moment_gaussian_translation_product():
    x = np.linspace(-8, 8, 4001)
    h = x[1] - x[0]
    g = np.exp(-math.pi * x * x)
    assert bobkov_moment_bound(g, (h,), (-8.0,)) == pytest.approx(1 / (2 * math.pi), rel=1e-8)
    shifted = np.exp(-math.pi * (x - 1.3) ** 2)
    assert bobkov_moment_bound(shifted, (h,), (-8.0,)) == pytest.approx(1 / (2 * math.pi), rel=1e-6)
    y = np.linspace(-4, 4, 401)
    gy = np.exp(-(y ** 2))
    m_y = bobkov_moment_bound(gy, (y[1] - y[0],), (-4.0,))
    xs = x[::20]
    gx = np.exp(-math.pi * xs * xs)
    m_x = bobkov_moment_bound(gx, (xs[1] - xs[0],), (-8.0,))
    prod = bobkov_moment_bound(np.outer(gx, gy), (xs[1] - xs[0], y[1] - y[0]), (-8.0, -4.0))
    assert prod == pytest.approx(m_x + m_y, rel=1e-10)


# --- modified Poincare --------------------------------------------------------


def test_bump_constant_scaling():
    c1 = bump_h1_constant(2, 1.0)
    c2 = bump_h1_constant(2, 0.5)
    # L2 part scales like R^{-d}, gradient part like R^{-d-2}
    assert c2["c_star"] > 4 * c1["c_star"]
    with pytest.raises(ValueError):
        bump_h1_constant(2, 2.0)
    assert bump_h1_constant(1, 1.0)["c_star"] == pytest.approx(5.5057, rel=1e-3)
    assert c1["c_star"] == pytest.approx(8.8980, rel=1e-3)


def _uniform_square(n=65, side=4.0):
    h = side / (n - 1)
    return WeightPair(np.ones((n, n)), np.ones((n, n)), (h, h)), h


def test_modified_poincare_constant_and_oscillation():
    pair, h = _uniform_square()
    r = modified_poincare_check(np.full(pair.shape, 2.5), pair)
    assert r.lhs <= 1e-24 and r.rhs <= 1e-24
    X = np.arange(pair.shape[0])[:, None] * h * np.ones(pair.shape)
    r = modified_poincare_check(0.1 * np.sin(8 * math.pi * X), pair)
    assert r.passed and r.ratio < 0.2 * r.bound


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_modified_poincare_random_smooth(seed):
    m = 81
    g = np.linspace(-5, 5, m)
    gw = np.exp(-np.add.outer(g ** 2, g ** 2) / 2)
    pair = WeightPair(gw, gw, (g[1] - g[0],) * 2, (-5.0, -5.0))
    rng = np.random.default_rng(seed)
    G1, G2 = np.meshgrid(g, g, indexing="ij")
    u = sum(rng.normal() * np.cos(rng.uniform(0.3, 2.0) * (math.cos(a) * G1 + math.sin(a) * G2)
                                  + rng.uniform(0, 2 * math.pi))
            for a in rng.uniform(0, math.pi, 3))
    r = modified_poincare_check(u, pair)
    assert r.passed and r.ratio <= r.bound


# --- proof-internal inequalities ----------------------------------------------


def test_log_concavity_examples():
    x = np.linspace(-20, 20, 4001)
    assert log_concavity_check(-np.log(np.cosh(x)), log_values=True).passed
    assert log_concavity_check(2 * log_abs_gamma2(x), log_values=True).passed
    bump = np.exp(-(x - 3) ** 2) + np.exp(-(x + 3) ** 2)
    assert not log_concavity_check(bump).passed


def test_phi2_closed_form():
    # phi_2(xi) = (pi xi / sinh(pi xi)) (1 + xi^2) = |Gamma(2 + i xi)|^2
    xi = np.array([0.3, 1.0, 2.5])
    ref = (math.pi * xi / np.sinh(math.pi * xi)) * (1 + xi ** 2)
    np.testing.assert_allclose(np.exp(2 * log_abs_gamma2(xi)), ref, rtol=1e-12)


def test_log_concavity_of_two_dimensional_weight():
    grid = Grid2D(-6, 6, 97, -3, 3, 97)
    X, Q = grid.mesh()
    F = Field2D(grid, ambiguity_modulus(WindowSpec.expexp(), X, Q).astype(complex))
    w = weight_from_spectrogram(F, GammaWeight(1.0, 1.0), check_resolution=False)
    assert log_concavity_check(np.log(w.values), log_values=True).passed


def test_sinh_inequality():
    lhs = math.sinh(1.0) ** 2
    assert lhs == pytest.approx(1.3811, abs=1e-4)
    rhs = (1 + 1 / math.pi ** 2) ** 2
    assert rhs == pytest.approx(1.2129083, abs=1e-6)
    assert lhs > rhs
    r = sinh_inequality_check(20.0, 10000)
    assert r.passed and r.taylor_ok and r.min_ratio >= 1.0
    assert math.sinh(20.0) ** 2 > 1e6 * 400 * (1 + 400 / math.pi ** 2) ** 2


@pytest.mark.parametrize("xi", [0.0, 0.7, -3.0, 12.0])
def test_lorentz_exp_convolution_closed_form(xi):
    b = 1.0
    # (1 + pi^2 eta^2)^{-1} = (1 + (pi eta)^2)^{-1}; substitute eta' = pi eta
    ref = oracles.lorentz_exp_conv_quad(b / math.pi, math.pi * xi) / math.pi
    assert float(lorentz_exp_convolution(np.array([xi]), b)[0]) == pytest.approx(ref, rel=1e-8)


def test_convolution_equivalence():
    r1 = convolution_equivalence_check(1.0, 50.0)
    assert r1.passed and r1.stable
    assert abs(r1.spread_doubled - r1.spread) / r1.spread < 0.01
    r2 = convolution_equivalence_check(2.0, 50.0)
    assert r2.r_max < r1.r_max and r2.r_min < r1.r_min
    xi = np.linspace(-5, 5, 11)
    vals = lorentz_exp_convolution(xi, 1.0)
    np.testing.assert_allclose(vals, vals[::-1], rtol=1e-12)
