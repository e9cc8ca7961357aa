"""Independent reference computations used by the tests.

Nothing here imports gaborstab; each function is a slow but direct route to
a number the package computes another way.
"""

import math

import numpy as np
from scipy import integrate, linalg


def quad_complex(fun, lo, hi, **kw):
    re = integrate.quad(lambda t: fun(t).real, lo, hi, limit=400, **kw)[0]
    im = integrate.quad(lambda t: fun(t).imag, lo, hi, limit=400, **kw)[0]
    return complex(re, im)


def stft_quad(f, g, x, xi, lo=-40.0, hi=40.0, points=None):
    """int f(t) conj(g(t - x)) e^{-2 pi i xi t} dt by adaptive quadrature."""
    integrand = lambda t: f(t) * np.conj(g(t - x)) * np.exp(-2j * math.pi * xi * t)  # noqa: E731
    return quad_complex(integrand, lo, hi, points=points)


def expexp(t):
    return np.exp(t - np.exp(t))


def onesided(t):
    return np.exp(-t) if t > 0 else (0.5 if t == 0 else 0.0)


def gaussian(t):
    return np.exp(-math.pi * t * t)


def neumann_uniform_cp(n):
    """C_P of the nodal P1 Neumann Laplacian with lumped mass on [0, 1], n nodes.

    The eigenvectors are cos(pi k x_j) exactly, so the smallest nonzero
    eigenvalue is 4 sin^2(pi h / 2) / h^2 with h = 1 / (n - 1).
    """
    h = 1.0 / (n - 1)
    return h * h / (4.0 * math.sin(math.pi * h / 2) ** 2)


def weighted_fd_cp(x, weight):
    """C_P for v = w = weight on the nodes x by a dense generalized eigensolve.

    Stiffness uses the edge midpoint weight, mass the lumped nodal weight; the
    constant mode is removed by taking the second smallest eigenvalue.
    """
    x = np.asarray(x, float)
    n = x.size
    h = np.diff(x)
    wm = weight(0.5 * (x[1:] + x[:-1]))
    K = np.zeros((n, n))
    for i in range(n - 1):
        c = wm[i] / h[i]
        K[i, i] += c
        K[i + 1, i + 1] += c
        K[i, i + 1] -= c
        K[i + 1, i] -= c
    vol = np.zeros(n)
    vol[:-1] += h / 2
    vol[1:] += h / 2
    M = np.diag(weight(x) * vol)
    vals = linalg.eigh(K, M, eigvals_only=True)
    return 1.0 / vals[1]


def gamma_autocorr_1d_quad(a, x):
    """int e^{-a|t|} e^{-a|t - x|} dt."""
    f = lambda t: math.exp(-a * abs(t) - a * abs(t - x))  # noqa: E731
    pts = sorted({0.0, float(x)})
    return integrate.quad(f, -np.inf, pts[0])[0] + integrate.quad(f, pts[0], pts[-1])[0] \
        + integrate.quad(f, pts[-1], np.inf)[0]


def onesided_slpr_constant(a, b):
    """(int mu^2 (gamma * R gamma))^{1/2} for mu = e^{|t1|}(1 + pi |t2|) in closed form.

    The integral factorizes; each factor is a finite sum of Gamma integrals.
    """
    i1 = 2.0 * ((1.0 / a) / (a - 2.0) + 1.0 / (a - 2.0) ** 2)
    # int_0^inf (1 + pi s)^2 (1/b + s) e^{-b s} ds
    p = math.pi
    m = [math.factorial(k) / b ** (k + 1) for k in range(4)]
    poly = [1.0, 2 * p, p * p]  # (1 + pi s)^2
    i2 = 0.0
    for k, c in enumerate(poly):
        i2 += c * (m[k] / b + m[k + 1])
    return math.sqrt(i1 * 2.0 * i2)


def lorentz_exp_conv_quad(b, xi):
    """int (1 + eta^2)^{-1} e^{-b|xi - eta|} d eta, split at the kink."""
    f = lambda e: math.exp(-b * abs(xi - e)) / (1 + e * e)  # noqa: E731
    return integrate.quad(f, -np.inf, xi)[0] + integrate.quad(f, xi, np.inf)[0]


def disk_second_moment(r=1.0):
    """int_{B_r} y_1^2 dy in the plane."""
    return math.pi * r ** 4 / 4
