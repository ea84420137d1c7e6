"""Photon-number noise of the filtered soliton: kernels and the squeezing metric.

Direct detection measures the photon number of the filtered pulse; to
first order in the fluctuations its variance is controlled by the
cosine-quadrature correlations of the noise field weighted by the filtered
soliton spectrum,

    S = 1 + (1 / 4 pi^2 <N_out>) double-integral
        f0(w) |H(w)|^2 C_N(w, w') |H(w')|^2 f0(w') dw dw'

with f0(w) = pi sech(pi w / 2), C_N the normally ordered covariance kernel
at the fiber exit (before the filter; the |H|^2 weights carry the filter),
and <N_out> the average filtered photon number.  S = 1 is the coherent
(Poisson) level; S < 1 is photon-number squeezing, reported as
-10 log10 S in dB.

Kernel conventions: the frequency-domain kernel is the quadrature object
<(da(w) + da(w)^dag)(da(w') + da(w')^dag)> assembled term by term from the
normally ordered moments, so it is Hermitian by construction; the
commutator contributes 2 pi delta(w - w'), which samples as (2 pi / dw) on
the diagonal.  Time and frequency routes give identical S because the
measurement weight is real.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import GridMismatchError
from .grid import (
    SampledGrid,
    forward_axis,
    forward_conj_axis,
    inverse_axis,
    inverse_conj_axis,
)
from .filters import SpectralFilter, output_photon_number
from .propagator import FluctuationState, check_physical
from .soliton import MeanField

__all__ = [
    "CovarianceKernel",
    "assemble_covariance",
    "time_covariance",
    "kernel_to_time",
    "kernel_to_frequency",
    "with_delta",
    "normally_ordered_part",
    "delta_diagonal",
    "squeezing",
    "squeezing_from_kernel",
    "squeezing_db",
]


@dataclass(frozen=True)
class CovarianceKernel:
    """Cosine-quadrature correlation kernel C(., .) on one grid.

    domain is "time" (real symmetric values) or "frequency" (Hermitian);
    normally_ordered says whether the delta ridge has been removed.
    """

    grid: SampledGrid
    domain: str
    values: np.ndarray
    normally_ordered: bool

    def __post_init__(self):
        if self.domain not in ("time", "frequency"):
            raise ValueError(f"unknown kernel domain {self.domain!r}")
        v = np.asarray(self.values, dtype=complex)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise ValueError("kernel must be n_points x n_points")
        object.__setattr__(self, "values", v)


def delta_diagonal(grid: SampledGrid, domain: str) -> float:
    """Grid sample of the delta ridge: delta(tau-tau') -> 1/dt, 2 pi delta(w-w') -> 2 pi / dw."""
    return 1.0 / grid.dt if domain == "time" else 2.0 * np.pi / grid.dw


def with_delta(kernel: CovarianceKernel) -> CovarianceKernel:
    if not kernel.normally_ordered:
        return kernel
    n = kernel.grid.n_points
    values = kernel.values + delta_diagonal(kernel.grid, kernel.domain) * np.eye(n)
    return replace(kernel, values=values, normally_ordered=False)


def normally_ordered_part(kernel: CovarianceKernel) -> CovarianceKernel:
    if kernel.normally_ordered:
        return kernel
    n = kernel.grid.n_points
    values = kernel.values - delta_diagonal(kernel.grid, kernel.domain) * np.eye(n)
    return replace(kernel, values=values, normally_ordered=True)


def time_covariance(state: FluctuationState, validate: bool = True) -> CovarianceKernel:
    """Normally ordered central covariance in the time domain (real symmetric)."""
    if validate:
        check_physical(state)
    values = 2.0 * np.real(state.moment_aa) + 2.0 * np.real(state.moment_nn)
    return CovarianceKernel(state.grid, "time", values + 0j, True)


def assemble_covariance(state: FluctuationState, validate: bool = True) -> CovarianceKernel:
    """Normally ordered covariance kernel in the frequency domain.

    Each moment block is transformed with the kernel matching its operator
    content (conj(F) on delta_a^dag indices, F on delta_a indices), then
    combined as aa + conj(aa) + nn + nn^T; the result is Hermitian.
    """
    if validate:
        check_physical(state)
    g = state.grid
    aa_w = forward_axis(g, forward_axis(g, state.moment_aa, axis=0), axis=1)
    nn_w = forward_axis(g, forward_conj_axis(g, state.moment_nn, axis=0), axis=1)
    values = aa_w + np.conj(aa_w) + nn_w + nn_w.T
    values = 0.5 * (values + np.conj(values.T))
    return CovarianceKernel(g, "frequency", values, True)


def kernel_to_time(kernel: CovarianceKernel) -> CovarianceKernel:
    """Frequency kernel -> time kernel (inverse quadrature-consistent transform).

    Exact for the delta ridge and for kernels of states with a real-even
    quadrature structure; the measurement functional itself is transform
    invariant either way because its weight is real.
    """
    if kernel.domain == "time":
        return kernel
    g = kernel.grid
    was_ordered = kernel.normally_ordered
    values = normally_ordered_part(kernel).values
    t = inverse_axis(g, inverse_conj_axis(g, values, axis=1), axis=0)
    out = CovarianceKernel(g, "time", t, True)
    return out if was_ordered else with_delta(out)


def kernel_to_frequency(kernel: CovarianceKernel) -> CovarianceKernel:
    if kernel.domain == "frequency":
        return kernel
    g = kernel.grid
    was_ordered = kernel.normally_ordered
    values = normally_ordered_part(kernel).values
    f = forward_axis(g, forward_conj_axis(g, values, axis=1), axis=0)
    out = CovarianceKernel(g, "frequency", f, True)
    return out if was_ordered else with_delta(out)


def _soliton_spectrum(mean: MeanField) -> np.ndarray:
    return np.real(forward_axis(mean.grid, mean.envelope.samples))


def squeezing_from_kernel(
    kernel: CovarianceKernel,
    filt: SpectralFilter,
    mean: MeanField,
    n_out: float,
) -> float:
    """Evaluate the squeezing metric for a prepared normally ordered kernel."""
    if kernel.grid != filt.grid or kernel.grid != mean.grid:
        raise GridMismatchError("kernel, filter and mean field must share one grid")
    if n_out <= 0:
        raise ValueError(f"filter annihilates the field: <N_out> = {n_out}")
    g = kernel.grid
    k = kernel_to_frequency(kernel)
    if not k.normally_ordered:
        k = normally_ordered_part(k)
    weight = _soliton_spectrum(mean) * filt.magnitude**2
    quad = np.real(weight @ k.values @ weight)
    s = 1.0 + (g.dw**2 / (4.0 * np.pi**2 * n_out)) * quad
    return float(s)


def squeezing(state: FluctuationState, filt: SpectralFilter, mean: MeanField) -> float:
    """Observed squeezing S of the state at the fiber exit, seen through ``filt``.

    S = 1 exactly for vacuum fluctuations regardless of filter; with no
    filter S stays at 1 for all propagation distances because the fiber
    conserves photon number.
    """
    kernel = assemble_covariance(state)
    n_out = output_photon_number(filt, state, mean)
    return squeezing_from_kernel(kernel, filt, mean, n_out)


def squeezing_db(s: float) -> float:
    """-10 log10 S; positive values mean squeezing below the coherent level."""
    if s <= 0:
        raise ValueError(f"squeezing metric must be positive, got {s}")
    return float(-10.0 * np.log10(s)) + 0.0  # + 0.0 normalizes -0.0
