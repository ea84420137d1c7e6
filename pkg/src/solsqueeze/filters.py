"""Realizable spectral filters and their action on the noise field.

A passive filter obeys 0 <= |H(w)| <= 1; the loss it applies necessarily
admixes vacuum, modeled by

    da_out(w) = |H(w)| da(w) + sqrt(1 - |H(w)|^2) v(w)

with v a vacuum operator.  Because states carry normally ordered moments,
the vacuum term drops out of the moment transform entirely; |H| multiplies
each frequency index of the moments and H (with phase) multiplies the mean.

The workhorse is the bandlimited parabolic response H = 1 - w^2/eta^2 on
|w| <= eta, zero outside, with eta calibrated by bisection so the filter
removes a prescribed fraction of the soliton's mean-field energy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import GridMismatchError, RealizabilityError
from .grid import (
    ComplexField,
    SampledGrid,
    forward_axis,
    forward_conj_axis,
    inverse_axis,
    inverse_conj_axis,
)
from .propagator import FluctuationState
from .soliton import MeanField

__all__ = [
    "SpectralFilter",
    "parabolic_filter",
    "identity_filter",
    "custom_filter",
    "mean_field_loss",
    "calibrate_bandwidth",
    "apply_filter",
    "output_photon_number",
]


@dataclass(frozen=True)
class SpectralFilter:
    """Sampled transfer function H on the grid's frequency axis.

    ``descriptor`` records how the filter was built: ("identity",),
    ("parabolic", eta) or ("custom", label).
    """

    grid: SampledGrid
    transfer: np.ndarray
    descriptor: Tuple

    def __post_init__(self):
        h = np.asarray(self.transfer, dtype=complex)
        if h.shape != (self.grid.n_points,):
            raise ValueError("transfer function length must match the grid")
        mag = np.abs(h)
        if mag.max() > 1.0 + 1e-12 or not np.all(np.isfinite(h)):
            raise RealizabilityError(
                f"filter not realizable: max |H| = {mag.max():.6f} > 1"
            )
        h.flags.writeable = False
        object.__setattr__(self, "transfer", h)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.transfer)

    @property
    def is_identity(self) -> bool:
        return bool(np.all(self.transfer == 1.0))


def identity_filter(grid: SampledGrid) -> SpectralFilter:
    return SpectralFilter(grid, np.ones(grid.n_points), ("identity",))


def parabolic_filter(grid: SampledGrid, eta: float) -> SpectralFilter:
    """Bandlimited parabolic response, H(0) = 1, H(+-eta) = 0."""
    if not 0 < eta:
        raise ValueError(f"bandwidth must be positive, got {eta}")
    if eta >= grid.nyquist:
        raise ValueError(
            f"bandwidth {eta:.4f} reaches the grid Nyquist frequency {grid.nyquist:.4f}"
        )
    w = grid.frequencies
    h = np.where(np.abs(w) <= eta, 1.0 - w**2 / eta**2, 0.0)
    return SpectralFilter(grid, h, ("parabolic", float(eta)))


def custom_filter(grid: SampledGrid, transfer: np.ndarray, label: str = "table") -> SpectralFilter:
    return SpectralFilter(grid, transfer, ("custom", label))


def mean_field_loss(filt: SpectralFilter, mean: MeanField) -> float:
    """Fraction of the soliton's mean-field energy the filter removes."""
    if filt.grid != mean.grid:
        raise GridMismatchError("filter and mean field live on different grids")
    spectrum = np.abs(forward_axis(mean.grid, mean.envelope.samples)) ** 2
    kept = np.sum(filt.magnitude**2 * spectrum)
    return float(1.0 - kept / np.sum(spectrum))


def calibrate_bandwidth(
    grid: SampledGrid,
    target_loss: float,
    mean: MeanField | None = None,
    iterations: int = 100,
) -> float:
    """Bandwidth eta of the parabolic filter giving the requested loss.

    Bisection on the monotone map eta -> loss (loss strictly decreases as
    the band opens).  Raises ValueError when no eta in (dw, Nyquist) can
    bracket the target, e.g. a target below the residual rolloff loss of
    the widest admissible band.
    """
    if not 0.0 < target_loss < 1.0:
        raise ValueError(f"target loss must be in (0, 1), got {target_loss}")
    if mean is None:
        from .soliton import mean_field

        mean = mean_field(grid)
    lo, hi = grid.dw, grid.nyquist * (1.0 - 1e-9)
    loss_lo = mean_field_loss(parabolic_filter(grid, lo), mean)
    loss_hi = mean_field_loss(parabolic_filter(grid, hi), mean)
    if not loss_hi <= target_loss <= loss_lo:
        raise ValueError(
            f"target loss {target_loss} not bracketed: achievable range "
            f"[{loss_hi:.6f}, {loss_lo:.6f}]"
        )
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if mean_field_loss(parabolic_filter(grid, mid), mean) > target_loss:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def output_photon_number(
    filt: SpectralFilter, state: FluctuationState, mean: MeanField
) -> float:
    """<N> after the filter at leading (mean-field) order.

    (1/2pi) integral |H|^2 |f0(w) + <da>(w)|^2 dw: the soliton spectrum
    plus the state's mean perturbation, both filtered.
    """
    g = state.grid
    total = forward_axis(g, mean.envelope.samples) + forward_axis(g, state.mean.samples)
    return float(g.dw / (2.0 * np.pi) * np.sum(filt.magnitude**2 * np.abs(total) ** 2))


def apply_filter(
    filt: SpectralFilter, state: FluctuationState, mean: MeanField
) -> Tuple[FluctuationState, float]:
    """Filtered state and its output photon number.

    The mean picks up the full (phase-bearing) H; normally ordered moments
    are congruence-transformed by |H| on each frequency index, and the
    vacuum admixture contributes nothing to them by construction.
    """
    if filt.grid != state.grid or mean.grid != state.grid:
        raise GridMismatchError("filter, state and mean field must share one grid")
    g = state.grid
    n_out = output_photon_number(filt, state, mean)
    if filt.is_identity:
        return (
            FluctuationState(g, state.mean.copy(), state.moment_nn.copy(), state.moment_aa.copy()),
            n_out,
        )

    mean_w = forward_axis(g, state.mean.samples) * filt.transfer
    mean_out = inverse_axis(g, mean_w)
    mag = filt.magnitude

    # nn: first index rides delta_a^dag -> conj(F); second rides delta_a -> F
    nn_w = forward_axis(g, forward_conj_axis(g, state.moment_nn, axis=0), axis=1)
    nn_w *= mag[:, None] * mag[None, :]
    nn_out = inverse_axis(g, inverse_conj_axis(g, nn_w, axis=0), axis=1)

    aa_w = forward_axis(g, forward_axis(g, state.moment_aa, axis=0), axis=1)
    aa_w *= mag[:, None] * mag[None, :]
    aa_out = inverse_axis(g, inverse_axis(g, aa_w, axis=0), axis=1)

    nn_out = 0.5 * (nn_out + np.conj(nn_out.T))
    aa_out = 0.5 * (aa_out + aa_out.T)
    return FluctuationState(g, ComplexField(g, mean_out), nn_out, aa_out), n_out
