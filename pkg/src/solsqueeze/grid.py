"""Uniform time grid, its FFT-dual frequency grid, and transform conventions.

Everything downstream (soliton modes, propagation, filtering, measurement)
lives on one ``SampledGrid``: n_points samples of the dimensionless time
coordinate tau on [-T, T), and the matching FFT-ordered frequency axis.

The continuous transform pair approximated here is

    F(w) = integral f(tau) exp(+i w tau) dtau
    f(tau) = (1/2pi) integral F(w) exp(-i w tau) dw

chosen so that sech(tau) maps to pi*sech(pi*w/2).  Quadrature is the
uniform Riemann sum with weight dt, which is spectrally accurate for the
smooth, decaying fields used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError

__all__ = [
    "SampledGrid",
    "ComplexField",
    "make_grid",
    "forward_transform",
    "inverse_transform",
    "inner_product_re",
    "quadrature",
    "spectral_second_derivative",
]


@dataclass(frozen=True)
class SampledGrid:
    """Shared discretization: n_points samples on tau in [-window, window).

    dt * dw * n_points = 2*pi by construction; ``frequencies`` are
    FFT-ordered and cover [-pi/dt, pi/dt) exactly once.
    """

    n_points: int
    window: float
    dt: float = field(init=False)
    dw: float = field(init=False)
    times: np.ndarray = field(init=False, repr=False)
    frequencies: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dt = 2.0 * self.window / self.n_points
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "dw", np.pi / self.window)
        times = -self.window + dt * np.arange(self.n_points)
        freqs = 2.0 * np.pi * np.fft.fftfreq(self.n_points, dt)
        times.flags.writeable = False
        freqs.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "frequencies", freqs)

    @property
    def nyquist(self) -> float:
        return np.pi / self.dt

    @property
    def key(self) -> tuple:
        """Hashable identity used for caching grid-derived operators."""
        return (self.n_points, self.window)

    def __eq__(self, other):
        return isinstance(other, SampledGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


@dataclass
class ComplexField:
    """Complex envelope samples bound to a grid (time or frequency axis)."""

    grid: SampledGrid
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.samples.shape != (self.grid.n_points,):
            raise ValueError(
                f"field has {self.samples.shape} samples, grid wants ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("field samples must be finite")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.samples.copy())


def make_grid(n_points: int, window: float) -> SampledGrid:
    """Build the shared discretization.

    n_points must be a power of two >= 8 (FFT efficiency and enough
    resolution for sech tau); window > 0 is the half-width T.
    """
    if n_points < 8 or (n_points & (n_points - 1)) != 0:
        raise ValueError(f"n_points must be a power of two >= 8, got {n_points}")
    if not window > 0:
        raise ValueError(f"window must be positive, got {window}")
    return SampledGrid(int(n_points), float(window))


def _check_same_grid(*objs):
    grids = {o.grid.key for o in objs}
    if len(grids) > 1:
        raise GridMismatchError(f"objects live on different grids: {sorted(grids)}")


def _phase(grid: SampledGrid, arr: np.ndarray, axis: int) -> np.ndarray:
    """(-1)^k factor that moves the FFT origin to tau = -T."""
    sign = (-1.0) ** np.arange(grid.n_points)
    shape = [1] * arr.ndim
    shape[axis] = grid.n_points
    return arr * sign.reshape(shape)


def forward_axis(grid: SampledGrid, arr: np.ndarray, axis: int = 0) -> np.ndarray:
    """Apply F_kj = dt exp(+i w_k tau_j) along one axis of an array."""
    return _phase(grid, np.fft.ifft(arr, axis=axis) * (grid.n_points * grid.dt), axis)


def forward_conj_axis(grid: SampledGrid, arr: np.ndarray, axis: int = 0) -> np.ndarray:
    """Apply conj(F)_kj = dt exp(-i w_k tau_j) along one axis."""
    return _phase(grid, np.fft.fft(arr, axis=axis) * grid.dt, axis)


def inverse_axis(grid: SampledGrid, arr: np.ndarray, axis: int = 0) -> np.ndarray:
    """Inverse of ``forward_axis`` (weight dw/2pi, kernel exp(-i w tau))."""
    return np.fft.fft(_phase(grid, np.asarray(arr, dtype=complex), axis), axis=axis) / (
        grid.n_points * grid.dt
    )


def inverse_conj_axis(grid: SampledGrid, arr: np.ndarray, axis: int = 0) -> np.ndarray:
    """Inverse of ``forward_conj_axis``."""
    return np.fft.ifft(_phase(grid, np.asarray(arr, dtype=complex), axis), axis=axis) / grid.dt


def forward_transform(f: ComplexField) -> ComplexField:
    """Time-domain field -> frequency-domain samples F(w_k)."""
    return ComplexField(f.grid, forward_axis(f.grid, f.samples))


def inverse_transform(F: ComplexField) -> ComplexField:
    """Frequency-domain samples -> time-domain field."""
    return ComplexField(F.grid, inverse_axis(F.grid, F.samples))


def inner_product_re(f: ComplexField, g: ComplexField) -> float:
    """Re integral f(tau) conj(g(tau)) dtau, Riemann sum with weight dt."""
    _check_same_grid(f, g)
    return float(np.real(f.grid.dt * np.sum(f.samples * np.conj(g.samples))))


def quadrature(grid: SampledGrid, values: np.ndarray) -> complex:
    """integral values dtau as the uniform Riemann sum."""
    return grid.dt * np.sum(values)


def spectral_second_derivative(grid: SampledGrid) -> np.ndarray:
    """Dense periodic second-derivative matrix, diagonal -w^2 in Fourier space.

    Plane waves exp(i w tau) with w on the frequency axis are exact
    eigenvectors with eigenvalue -w^2.
    """
    n = grid.n_points
    spectrum = -(grid.frequencies**2)
    d2 = np.fft.ifft(spectrum[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0)
    return np.ascontiguousarray(d2.real)
