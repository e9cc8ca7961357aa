"""Sampled signals, Fourier transform, STFT and closed-form ambiguity moduli.

Conventions
-----------
Fourier transform:  f^(xi) = int f(t) exp(-2 pi i xi t) dt
STFT:               V_g f(x, xi) = int f(t) conj(g(t - x)) exp(-2 pi i xi t) dt

All integrals in time are Riemann sums with the sample spacing ``dt`` as the
measure.  Fields on the time-frequency plane are stored with shape
``(nx, nxi)``: axis 0 is time ``x``, axis 1 is frequency ``xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.signal import CZT

__all__ = [
    "Signal1D",
    "Grid2D",
    "Field2D",
    "RealField2D",
    "WindowKind",
    "WindowSpec",
    "make_window",
    "window_values",
    "fourier_transform",
    "stft",
    "spectrogram",
    "ambiguity_modulus",
    "log_ambiguity_modulus",
    "log_abs_gamma2",
    "matched_time_axis",
]

# nxi below this -> direct summation instead of the chirp-z path
DIRECT_SUM_MAX_NXI = 64
# rows of the STFT processed per chunk (bounds memory to ~chunk * n samples)
_STFT_CHUNK = 64


@dataclass(frozen=True)
class Signal1D:
    """Uniformly sampled complex signal ``f(t0 + k*dt)``, k = 0..n-1."""

    samples: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex).ravel()
        if s.size < 1:
            raise ValueError("signal needs at least one sample")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if not math.isfinite(self.t0):
            raise ValueError("t0 must be finite")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)

    def norm(self) -> float:
        return math.sqrt(self.energy())

    def scaled(self, c: complex) -> "Signal1D":
        return Signal1D(c * self.samples, self.dt, self.t0)

    def __add__(self, other: "Signal1D") -> "Signal1D":
        _check_same_axis(self, other)
        return Signal1D(self.samples + other.samples, self.dt, self.t0)

    def __sub__(self, other: "Signal1D") -> "Signal1D":
        _check_same_axis(self, other)
        return Signal1D(self.samples - other.samples, self.dt, self.t0)


def _check_same_axis(a: Signal1D, b: Signal1D) -> None:
    if a.n != b.n or not math.isclose(a.dt, b.dt, rel_tol=1e-12) or not math.isclose(
        a.t0, b.t0, rel_tol=0, abs_tol=1e-12 * max(1.0, abs(a.t0))
    ):
        raise ValueError("signals live on different time axes")


@dataclass(frozen=True)
class Grid2D:
    """Uniform rectangular grid on the time-frequency plane (endpoints included)."""

    x_min: float
    x_max: float
    nx: int
    xi_min: float
    xi_max: float
    nxi: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.xi_max > self.xi_min):
            raise ValueError("grid extents must satisfy max > min")
        if self.nx < 2 or self.nxi < 2:
            raise ValueError("grid needs at least 2 points per axis")

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hxi(self) -> float:
        return (self.xi_max - self.xi_min) / (self.nxi - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def xis(self) -> np.ndarray:
        return np.linspace(self.xi_min, self.xi_max, self.nxi)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.nxi)

    @property
    def cell_area(self) -> float:
        return self.hx * self.hxi

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.xis, indexing="ij")

    def quad_weights(self) -> np.ndarray:
        """Composite trapezoid weights, shape ``(nx, nxi)``."""
        wx = np.full(self.nx, self.hx)
        wx[[0, -1]] *= 0.5
        wxi = np.full(self.nxi, self.hxi)
        wxi[[0, -1]] *= 0.5
        return np.outer(wx, wxi)

    def nearest_index(self, x: float, xi: float) -> tuple[int, int]:
        i = int(np.clip(round((x - self.x_min) / self.hx), 0, self.nx - 1))
        j = int(np.clip(round((xi - self.xi_min) / self.hxi), 0, self.nxi - 1))
        return i, j

    def same_as(self, other: "Grid2D") -> bool:
        a = (self.x_min, self.x_max, self.xi_min, self.xi_max)
        b = (other.x_min, other.x_max, other.xi_min, other.xi_max)
        return self.shape == other.shape and np.allclose(a, b, rtol=1e-12, atol=1e-12)

    def scaled(self, factor: float, refine: int = 1) -> "Grid2D":
        """Grid with extents multiplied by ``factor`` and spacing divided by ``refine``."""
        nx = int(round((self.nx - 1) * factor * refine)) + 1
        nxi = int(round((self.nxi - 1) * factor * refine)) + 1
        return Grid2D(self.x_min * factor, self.x_max * factor, nx,
                      self.xi_min * factor, self.xi_max * factor, nxi)


@dataclass(frozen=True)
class Field2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    def abs(self) -> "RealField2D":
        return RealField2D(self.grid, np.abs(self.values))


@dataclass(frozen=True)
class RealField2D:
    grid: Grid2D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)


class WindowKind(str, Enum):
    EXPEXP = "expexp"
    ONESIDED = "onesided"
    GAUSSIAN = "gaussian"
    SAMPLED = "sampled"

    @classmethod
    def parse(cls, name) -> "WindowKind":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "").replace("-", "")
        aliases = {"expexp": cls.EXPEXP, "onesided": cls.ONESIDED,
                   "onesidedexp": cls.ONESIDED, "gaussian": cls.GAUSSIAN,
                   "sampled": cls.SAMPLED}
        if key not in aliases:
            raise ValueError(f"unknown window kind {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class WindowSpec:
    """Window family descriptor.

    ``expexp``   g(t) = exp(t - e^t)
    ``onesided`` g(t) = e^{-t} 1_(0,inf)(t), with g(0) = 1/2
    ``gaussian`` g(t) = exp(-pi (t/scale)^2), ``scale`` defaults to 1
    ``sampled``  copies ``data`` (a Signal1D)
    """

    kind: WindowKind
    params: dict = field(default_factory=dict)
    data: Signal1D | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", WindowKind.parse(self.kind))
        for k, v in self.params.items():
            if not math.isfinite(float(v)):
                raise ValueError(f"non-finite window parameter {k}={v}")
        if self.kind is WindowKind.GAUSSIAN and float(self.params.get("scale", 1.0)) <= 0:
            raise ValueError("gaussian scale must be positive")
        if self.kind is WindowKind.SAMPLED and self.data is None:
            raise ValueError("sampled window needs data")

    @classmethod
    def expexp(cls):
        return cls(WindowKind.EXPEXP)

    @classmethod
    def onesided(cls):
        return cls(WindowKind.ONESIDED)

    @classmethod
    def gaussian(cls, scale: float = 1.0):
        return cls(WindowKind.GAUSSIAN, {"scale": scale} if scale != 1.0 else {})

    @property
    def has_closed_form(self) -> bool:
        return self.kind is not WindowKind.SAMPLED


def window_values(spec: WindowSpec, t: np.ndarray, snap: float = 0.0) -> np.ndarray:
    """Evaluate a closed-form window at arbitrary times.

    ``snap`` is the distance below which ``|t|`` is treated as exactly 0; it
    only matters for the one-sided exponential's jump.
    """
    t = np.asarray(t, dtype=float)
    kind = spec.kind
    if kind is WindowKind.EXPEXP:
        # exp(t - e^t); e^t overflows harmlessly to inf -> 0
        with np.errstate(over="ignore"):
            return np.exp(t - np.exp(t)).astype(complex)
    if kind is WindowKind.ONESIDED:
        out = np.zeros_like(t)
        pos = t > snap
        out[pos] = np.exp(-t[pos])
        out[np.abs(t) <= snap] = 0.5
        return out.astype(complex)
    if kind is WindowKind.GAUSSIAN:
        s = float(spec.params.get("scale", 1.0))
        return np.exp(-np.pi * (t / s) ** 2).astype(complex)
    raise ValueError(f"window kind {kind.value!r} has no closed-form evaluator")


def make_window(spec: WindowSpec, n: int, dt: float, t0: float) -> Signal1D:
    """Sample ``spec`` at ``t0 + k*dt`` for k < n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be positive")
    if spec.kind is WindowKind.SAMPLED:
        d = spec.data
        samples = np.array(d.samples[:n], dtype=complex)
        if samples.size < n:
            samples = np.concatenate([samples, np.zeros(n - samples.size, complex)])
        return Signal1D(samples, d.dt, d.t0)
    t = t0 + dt * np.arange(n)
    return Signal1D(window_values(spec, t, snap=1e-9 * dt), dt, t0)


def matched_time_axis(grid: Grid2D, samples_per_cell: int, half_width: float,
                      anchor: float = 0.0) -> tuple[int, float, float]:
    """Time axis ``(n, dt, t0)`` whose lattice contains every grid time ``x_i`` and ``anchor``.

    ``dt = hx / samples_per_cell``; when ``anchor - x_min`` is a half-integer
    multiple of ``hx`` the sampling is refined by 2 so that the anchor still
    falls on the lattice.
    """
    hx = grid.hx
    k = int(samples_per_cell)
    offset = (anchor - grid.x_min) / hx
    if abs(offset * k - round(offset * k)) > 1e-9:
        if abs(2 * offset * k - round(2 * offset * k)) > 1e-9:
            raise ValueError("anchor cannot be placed on the time lattice")
        k *= 2
    dt = hx / k
    steps_left = int(math.ceil((grid.x_min - (-half_width)) / dt - 1e-9))
    t0 = grid.x_min - steps_left * dt
    n = int(math.ceil((half_width - t0) / dt - 1e-9)) + 1
    return n, dt, t0


def fourier_transform(f: Signal1D) -> Signal1D:
    """Riemann-sum Fourier transform on the FFT-dual grid.

    Output frequencies are ``(m - n//2) / (n dt)`` for m < n.
    """
    n, dt = f.n, f.dt
    m = np.arange(n) - n // 2
    xi = m / (n * dt)
    spec = np.fft.fftshift(np.fft.fft(f.samples))
    # fft index m' carries exp(-2 pi i m' k / n); restore the t0 offset
    spec = spec * dt * np.exp(-2j * np.pi * xi * f.t0)
    return Signal1D(spec, 1.0 / (n * dt), float(xi[0]))


def _shift_rows(g: Signal1D, f: Signal1D, xs: np.ndarray) -> np.ndarray:
    """Rows ``conj(g(t_k - x_i))`` sampled on ``f``'s time axis."""
    dt = f.dt
    base = (f.t0 - g.t0) / dt
    shifts = xs / dt
    k = np.arange(f.n)
    out = np.zeros((xs.size, f.n), dtype=complex)
    gs = np.conj(g.samples)
    idx_real = k[None, :] + base - shifts[:, None]
    idx = np.rint(idx_real)
    aligned = np.all(np.abs(idx_real - idx) < 1e-6)
    if aligned:
        idx = idx.astype(np.int64)
        ok = (idx >= 0) & (idx < g.n)
        out[ok] = gs[idx[ok]]
        return out
    # non-lattice shifts: band-limited (Fourier) interpolation of the window
    npad = 1 << int(math.ceil(math.log2(2 * max(g.n, f.n))))
    spec = np.fft.fft(gs, npad)
    nu = np.fft.fftfreq(npad)
    for r in range(xs.size):
        j0 = idx_real[r, 0]
        ip = math.floor(j0)
        interp = np.fft.ifft(spec * np.exp(2j * np.pi * nu * (j0 - ip)))
        pos = k + ip
        take = (pos >= -1) & (pos <= g.n)
        out[r, take] = interp[pos[take] % npad]
    return out


def _freq_sums(p: np.ndarray, t0: float, dt: float, xis: np.ndarray) -> np.ndarray:
    """sum_k p[:, k] exp(-2 pi i xi_j (t0 + k dt)) * dt for uniform ``xis``."""
    n = p.shape[1]
    m = xis.size
    if m < DIRECT_SUM_MAX_NXI:
        t = t0 + dt * np.arange(n)
        kern = np.exp(-2j * np.pi * np.outer(t, xis))
        return (p @ kern) * dt
    hxi = (xis[-1] - xis[0]) / (m - 1)
    pre = np.exp(-2j * np.pi * xis[0] * dt * np.arange(n))
    czt = CZT(n, m, w=np.exp(-2j * np.pi * hxi * dt), a=1.0)
    out = czt(p * pre[None, :], axis=-1)
    return out * (np.exp(-2j * np.pi * xis * t0) * dt)[None, :]


def stft(f: Signal1D, g: Signal1D | WindowSpec, grid: Grid2D) -> Field2D:
    """V_g f on ``grid``.

    ``g`` may be a sampled signal on the same spacing as ``f`` or a
    closed-form window spec (sampled on ``f``'s axis).  Time shifts that are
    lattice multiples of ``dt`` are exact; other shifts use a band-limited
    Fourier shift.  Frequencies use a chirp-z transform, or direct summation
    when ``nxi`` is small.
    """
    if isinstance(g, WindowSpec):
        g = make_window(g, f.n, f.dt, f.t0)
    if not math.isclose(f.dt, g.dt, rel_tol=1e-9):
        raise ValueError(f"incompatible spacings f.dt={f.dt} g.dt={g.dt}")
    nyq = 0.5 / f.dt
    if max(abs(grid.xi_min), abs(grid.xi_max)) > nyq * (1 + 1e-12):
        raise ValueError(f"grid frequencies exceed the Nyquist limit {nyq}")
    xs, xis = grid.xs, grid.xis
    out = np.empty(grid.shape, dtype=complex)
    fs = f.samples
    for start in range(0, grid.nx, _STFT_CHUNK):
        sl = slice(start, min(start + _STFT_CHUNK, grid.nx))
        rows = _shift_rows(g, f, xs[sl]) * fs[None, :]
        out[sl] = _freq_sums(rows, f.t0, f.dt, xis)
    return Field2D(grid, out)


def spectrogram(f: Signal1D, g: Signal1D | WindowSpec, grid: Grid2D) -> RealField2D:
    return stft(f, g, grid).abs()


def log_abs_gamma2(b: np.ndarray) -> np.ndarray:
    """log |Gamma(2 + i b)| from |Gamma(2+ib)|^2 = (pi b / sinh(pi b)) (1 + b^2)."""
    b = np.abs(np.asarray(b, dtype=float))
    u = np.pi * b
    out = np.empty_like(u)
    small = u < 1e-4
    # u/sinh(u) = 1 - u^2/6 + 7u^4/360
    us = u[small]
    out[small] = np.log1p(-us ** 2 / 6 + 7 * us ** 4 / 360)
    ul = u[~small]
    # log sinh(u) = u + log1p(-e^{-2u}) - log 2
    log_sinh = ul + np.log1p(-np.exp(-2 * ul)) - math.log(2.0)
    out[~small] = np.log(ul) - log_sinh
    return 0.5 * (out + np.log1p(b ** 2))


def _log_sech(x: np.ndarray) -> np.ndarray:
    a = np.abs(x)
    return -(a + np.log1p(np.exp(-2 * a)) - math.log(2.0))


def log_ambiguity_modulus(spec: WindowSpec, x, xi) -> np.ndarray:
    """log |V_g g(x, xi)| for the closed-form windows."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    kind = spec.kind
    if kind is WindowKind.EXPEXP:
        return math.log(0.25) + 2 * _log_sech(x / 2) + log_abs_gamma2(2 * np.pi * xi)
    if kind is WindowKind.ONESIDED:
        return -np.abs(x) - math.log(2.0) - 0.5 * np.log1p((np.pi * xi) ** 2)
    if kind is WindowKind.GAUSSIAN:
        s = float(spec.params.get("scale", 1.0))
        # V_g g for exp(-pi t^2/s^2): modulus (s/sqrt2) exp(-pi (x^2/s^2 + s^2 xi^2)/2)
        return math.log(s / math.sqrt(2.0)) - np.pi * (x ** 2 / s ** 2 + s ** 2 * xi ** 2) / 2
    raise ValueError(f"no closed-form ambiguity function for {kind.value!r} windows")


def ambiguity_modulus(spec: WindowSpec, x, xi):
    """|V_g g(x, xi)|.

    expexp:   (1/4) sech(x/2)^2 |Gamma(2 - 2 pi i xi)|
    onesided: e^{-|x|} / (2 sqrt(1 + pi^2 xi^2))
    gaussian: 2^{-1/2} exp(-pi (x^2 + xi^2) / 2)
    """
    out = np.exp(log_ambiguity_modulus(spec, x, xi))
    return float(out) if out.ndim == 0 else out
