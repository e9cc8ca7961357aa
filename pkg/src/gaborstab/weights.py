"""Translation-stable weights, control functions and admissibility.

The weight family is gamma(x, xi) = exp(-a|x| - b|xi|).  Control functions mu
bound the ambiguity modulus under translation,

    |V_g g(z + tau)| <= mu(tau) |V_g g(z)|,

and a window/weight pair is admissible when mu^2 (gamma * R gamma) is
integrable.  Both mu and gamma * R gamma are products of one-variable factors,
which every integral below exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .tfcore import Grid2D, WindowKind, WindowSpec, log_ambiguity_modulus

__all__ = [
    "GammaWeight",
    "ControlFunction",
    "AdmissibilityReport",
    "TSWReport",
    "gamma_eval",
    "gamma_autocorr",
    "control_function",
    "estimate_mu_norm",
    "verify_tsw",
    "check_admissibility",
    "slpr_constant",
    "NotAdmissibleError",
]

PI2 = math.pi ** 2


class NotAdmissibleError(ValueError):
    """Raised when an SLPR constant is requested for a divergent pair."""


@dataclass(frozen=True)
class GammaWeight:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"gamma weight needs a, b > 0 (got a={self.a}, b={self.b})")

    @property
    def integral(self) -> float:
        return 4.0 / (self.a * self.b)


def gamma_eval(gam: GammaWeight, x, xi):
    out = np.exp(-gam.a * np.abs(np.asarray(x, float)) - gam.b * np.abs(np.asarray(xi, float)))
    return float(out) if out.ndim == 0 else out


def _autocorr_1d(c: float, s):
    s = np.abs(np.asarray(s, float))
    return (1.0 / c + s) * np.exp(-c * s)


def gamma_autocorr(gam: GammaWeight, x, xi):
    """(gamma * R gamma)(x, xi) = (1/a + |x|) e^{-a|x|} (1/b + |xi|) e^{-b|xi|}."""
    out = _autocorr_1d(gam.a, x) * _autocorr_1d(gam.b, xi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ControlFunction:
    """mu(tau) = c_norm * p1(|tau1|) * p2(|tau2|) * exp(rate1 |tau1| + rate2 |tau2|).

    ``log_poly1`` / ``log_poly2`` give log p1, log p2; the exponential rates are
    what decides integrability against gamma * R gamma.
    """

    kind: WindowKind
    rate1: float
    rate2: float
    log_poly1: Callable[[np.ndarray], np.ndarray]
    log_poly2: Callable[[np.ndarray], np.ndarray]
    c_norm: float = 1.0
    label: str = ""

    def log_factor1(self, t):
        t = np.abs(np.asarray(t, float))
        return self.log_poly1(t) + self.rate1 * t

    def log_factor2(self, t):
        t = np.abs(np.asarray(t, float))
        return self.log_poly2(t) + self.rate2 * t

    def log_mu(self, tau1, tau2):
        return math.log(self.c_norm) + self.log_factor1(tau1) + self.log_factor2(tau2)

    def __call__(self, tau1, tau2):
        out = np.exp(self.log_mu(tau1, tau2))
        return float(out) if out.ndim == 0 else out

    def with_norm(self, c_norm: float) -> "ControlFunction":
        return ControlFunction(self.kind, self.rate1, self.rate2, self.log_poly1,
                               self.log_poly2, float(c_norm), self.label)


def _zero(t):
    return np.zeros_like(np.asarray(t, float))


def control_function(window: WindowSpec, c_norm: float = 1.0) -> ControlFunction:
    """Closed-form control function for the windows that have one.

    onesided: mu(tau) = e^{|tau1|} (1 + pi |tau2|)
    expexp:   mu(tau) = c (1 + |tau2|^{3/2}) e^{pi^2 |tau2| + |tau1|}
    """
    kind = window.kind
    if kind is WindowKind.ONESIDED:
        return ControlFunction(kind, 1.0, 0.0, _zero,
                               lambda t: np.log1p(math.pi * np.abs(t)), 1.0,
                               "e^{|t1|}(1+pi|t2|)")
    if kind is WindowKind.EXPEXP:
        return ControlFunction(kind, 1.0, PI2, _zero,
                               lambda t: np.log1p(np.abs(t) ** 1.5), float(c_norm),
                               "c(1+|t2|^1.5)e^{pi^2|t2|+|t1|}")
    raise ValueError(f"no control function is known for {kind.value!r} windows")


def estimate_mu_norm(window: WindowSpec, grid: Grid2D, tau_samples) -> float:
    """Smallest c making the expexp TSW bound hold on the sampled (z, tau)."""
    if window.kind is not WindowKind.EXPEXP:
        raise ValueError("only the expexp control function carries a free constant")
    taus = np.atleast_2d(np.asarray(tau_samples, float))
    if taus.size == 0 or grid.nx * grid.nxi == 0:
        raise ValueError("empty sample set")
    mu1 = control_function(window, 1.0)
    X, XI = grid.mesh()
    logA = log_ambiguity_modulus(window, X, XI)
    worst = -np.inf
    for t1, t2 in taus:
        lr = log_ambiguity_modulus(window, X + t1, XI + t2) - logA - mu1.log_mu(t1, t2)
        worst = max(worst, float(lr.max()))
    return math.exp(worst)


@dataclass
class TSWReport:
    passed: bool
    worst_ratio: float
    worst_tau: tuple
    worst_z: tuple
    per_tau: list = field(default_factory=list)


def verify_tsw(window: WindowSpec, mu: ControlFunction, grid: Grid2D, tau_samples,
               tol: float = 1e-9) -> TSWReport:
    """Check |A(z + tau)| <= (1 + tol) mu(tau) |A(z)| for grid z and sampled tau.

    Ratios are formed in log space so the check is meaningful where A underflows.
    """
    taus = np.atleast_2d(np.asarray(tau_samples, float))
    X, XI = grid.mesh()
    logA = log_ambiguity_modulus(window, X, XI)
    worst, w_tau, w_z = -np.inf, None, None
    per_tau = []
    for t1, t2 in taus:
        lr = log_ambiguity_modulus(window, X + t1, XI + t2) - logA - mu.log_mu(t1, t2)
        k = int(np.argmax(lr))
        val = float(lr.flat[k])
        per_tau.append(((float(t1), float(t2)), math.exp(min(val, 700.0))))
        if val > worst:
            worst, w_tau = val, (float(t1), float(t2))
            w_z = (float(X.flat[k]), float(XI.flat[k]))
    ratio = math.exp(min(worst, 700.0))
    return TSWReport(ratio <= 1.0 + tol, ratio, w_tau, w_z, per_tau)


# -- integrals of mu^2 (gamma * R gamma) ------------------------------------


def _log_integrand_1d(mu: ControlFunction, gam: GammaWeight, axis: int):
    if axis == 0:
        c, lf = gam.a, mu.log_factor1
    else:
        c, lf = gam.b, mu.log_factor2

    def logf(t):
        t = np.abs(np.asarray(t, float))
        return 2 * lf(t) + np.log(1.0 / c + t) - c * t
    return logf


def _log_int_1d(logf, lo: float, hi: float) -> float:
    """log of int_lo^hi exp(logf(t)) dt, scaled to avoid overflow."""
    if hi <= lo:
        return -np.inf
    probe = np.linspace(lo, hi, 513)
    peak = float(np.max(logf(probe)))
    val, _ = integrate.quad(lambda t: math.exp(float(logf(t)) - peak), lo, hi,
                            limit=200, epsabs=0.0, epsrel=1e-11)
    return peak + math.log(val) if val > 0 else -np.inf


def _log_box_integral(mu, gam, R: float) -> tuple[float, float]:
    """log of int_{-R}^{R} along each axis (both factors are even)."""
    out = []
    for axis in (0, 1):
        logf = _log_integrand_1d(mu, gam, axis)
        out.append(math.log(2.0) + _log_int_1d(logf, 0.0, R))
    return out[0], out[1]


def _axis_slope(mu, gam, axis: int, R: float) -> float:
    """Slope of the log integrand along one axis over [R/2, R]."""
    logf = _log_integrand_1d(mu, gam, axis)
    t = np.linspace(R / 2, R, 64)
    return float(np.polyfit(t, logf(t), 1)[0])


@dataclass
class AdmissibilityReport:
    admissible: bool
    integral_estimate: float  # inf when divergent
    tail_slope: float
    divergent: bool
    exponent_condition: bool
    stated_condition: bool
    numeric_converges: bool
    axis_slopes: tuple
    shell_radii: list
    log_shell_integrals: list
    window: str = ""
    a: float = 0.0
    b: float = 0.0

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["integral_estimate"] = None if not math.isfinite(self.integral_estimate) \
            else self.integral_estimate
        d["axis_slopes"] = list(self.axis_slopes)
        return d


def stated_condition(window: WindowSpec, gam: GammaWeight) -> bool:
    """The pair conditions exactly as printed with the two window examples."""
    if window.kind is WindowKind.EXPEXP:
        return gam.a > 2 * PI2 and gam.b > 2
    if window.kind is WindowKind.ONESIDED:
        return gam.a > 2 and gam.b > 0
    raise ValueError(f"no admissibility statement for {window.kind.value!r}")


def exponent_condition(mu: ControlFunction, gam: GammaWeight) -> bool:
    """mu^2 (gamma * R gamma) is integrable iff a > 2*rate1 and b > 2*rate2."""
    return gam.a > 2 * mu.rate1 and gam.b > 2 * mu.rate2


def check_admissibility(window: WindowSpec, gam: GammaWeight, r0: float = 1.5,
                        n_shells: int = 6, mu: ControlFunction | None = None
                        ) -> AdmissibilityReport:
    """Integrate mu^2 (gamma * R gamma) over dyadic boxes [-R, R]^2.

    The verdict needs both the exponent condition read off mu and a negative
    fitted slope of log(shell integral) against the shell radius over the
    last four shells.
    """
    if mu is None:
        mu = control_function(window)
    radii = [r0 * 2 ** k for k in range(n_shells + 1)]
    # per-axis log integrals over [0, r0] and over each dyadic piece [r_{k-1}, r_k]
    pieces = []
    for axis in (0, 1):
        logf = _log_integrand_1d(mu, gam, axis)
        edges = [0.0] + radii
        pieces.append([math.log(2.0) + _log_int_1d(logf, lo, hi)
                       for lo, hi in zip(edges[:-1], edges[1:])])
    cum = [np.logaddexp.accumulate(p) for p in pieces]
    logI = [float(cum[0][k] + cum[1][k]) for k in range(len(radii))]
    # shell k: box(r_k) minus box(r_{k-1})
    log_shells = []
    for k in range(1, len(radii)):
        t1 = pieces[0][k] + cum[1][k]
        t2 = cum[0][k - 1] + pieces[1][k]
        log_shells.append(float(np.logaddexp(t1, t2)))
    shell_r = radii[1:]
    slope = float(np.polyfit(shell_r[-4:], log_shells[-4:], 1)[0])
    converges = slope < -1e-3
    exp_ok = exponent_condition(mu, gam)
    admissible = bool(exp_ok and converges)
    est = math.exp(logI[-1]) if converges and logI[-1] < 700 else math.inf
    slopes = (_axis_slope(mu, gam, 0, radii[-1]), _axis_slope(mu, gam, 1, radii[-1]))
    try:
        stated = stated_condition(window, gam)
    except ValueError:
        stated = exp_ok
    return AdmissibilityReport(
        admissible=admissible,
        integral_estimate=est if admissible else math.inf,
        tail_slope=slope,
        divergent=not converges,
        exponent_condition=exp_ok,
        stated_condition=stated,
        numeric_converges=converges,
        axis_slopes=slopes,
        shell_radii=shell_r,
        log_shell_integrals=log_shells,
        window=window.kind.value,
        a=gam.a,
        b=gam.b,
    )


def slpr_constant(window: WindowSpec, gam: GammaWeight, mu: ControlFunction | None = None,
                  rtol: float = 1e-4, r0: float = 2.0, max_doublings: int = 12) -> float:
    """(int mu^2 (gamma * R gamma))^{1/2} over boxes doubled until the change is < rtol."""
    if mu is None:
        mu = control_function(window)
    rep = check_admissibility(window, gam, mu=mu)
    if not rep.admissible:
        raise NotAdmissibleError(
            f"mu is not square integrable against gamma*Rgamma for {window.kind.value} "
            f"with a={gam.a}, b={gam.b} (tail slope {rep.tail_slope:.3g})")
    R = r0
    prev = sum(_log_box_integral(mu, gam, R))
    for _ in range(max_doublings):
        R *= 2
        cur = sum(_log_box_integral(mu, gam, R))
        if abs(math.expm1(cur - prev)) < rtol:
            return mu.c_norm * math.exp(0.5 * cur)
        prev = cur
    raise NotAdmissibleError("box integral did not settle; treating the pair as divergent")
