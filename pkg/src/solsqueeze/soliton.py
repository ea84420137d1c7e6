"""Fundamental-soliton mean field and its perturbation mode basis.

The co-rotating frame is used throughout: the soliton's own phase factor
exp(i xi/2) (and any global exp(i theta xi)) is dropped, so the mean field
is the real envelope sech(tau) at every propagation distance and the
linearized dynamics is autonomous.  Direct detection is insensitive to the
dropped global phase.

The four discrete perturbation modes are the derivatives of the
four-parameter soliton family with respect to photon number, momentum,
timing, and phase, evaluated at the canonical two-photon soliton:

    f_number   = (1/2) (1 - tau tanh tau) sech tau      (real, even)
    f_momentum = i tau sech tau                         (imag, odd)
    f_time     = sech tau tanh tau                      (real, odd)
    f_phase    = i sech tau                             (imag, even)

Their adjoint partners come from the adjoint linearized equation (the sign
of the conjugate-field coupling reversed) and are normalized here so that
Re integral f_i conj(adj_j) dtau = delta_ij; that orthogonality suite, not
any literature transcription, is the contract that validates the forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from .errors import GridMismatchError
from .grid import ComplexField, SampledGrid, inner_product_re

__all__ = [
    "MODE_NAMES",
    "MeanField",
    "ModeSet",
    "mean_field",
    "discrete_modes",
    "project",
    "gram_matrix",
    "mode_evolution_check",
    "EvolutionReport",
]

MODE_NAMES = ("number", "momentum", "time", "phase")


@dataclass(frozen=True)
class MeanField:
    """Canonical soliton envelope sech(tau) with two photons per pulse."""

    grid: SampledGrid
    envelope: ComplexField
    photon_number: float


@dataclass(frozen=True)
class ModeSet:
    """Discrete perturbation modes, their adjoints, and the continuum evaluator.

    ``continuum(omega)`` returns the (symmetric, antisymmetric) standing-wave
    continuum modes at continuum frequency omega; both are orthogonal to every
    discrete adjoint.
    """

    grid: SampledGrid
    modes: Dict[str, ComplexField]
    adjoints: Dict[str, ComplexField]
    continuum: Callable[[float], tuple]


def mean_field(grid: SampledGrid) -> MeanField:
    env = ComplexField(grid, 1.0 / np.cosh(grid.times))
    n = float(grid.dt * np.sum(np.abs(env.samples) ** 2))
    return MeanField(grid, env, n)


def _mode_arrays(grid: SampledGrid) -> tuple:
    tau = grid.times
    sech = 1.0 / np.cosh(tau)
    tanh = np.tanh(tau)
    modes = {
        "number": 0.5 * (1.0 - tau * tanh) * sech + 0j,
        "momentum": 1j * tau * sech,
        "time": sech * tanh + 0j,
        "phase": 1j * sech,
    }
    adjoints = {
        "number": 2.0 * sech + 0j,
        "momentum": 1j * sech * tanh,
        "time": tau * sech + 0j,
        "phase": 1j * (1.0 - tau * tanh) * sech,
    }
    return modes, adjoints


def discrete_modes(grid: SampledGrid, validate: bool = True, tol: float = 1e-6) -> ModeSet:
    """Build the mode basis and (by default) run the orthogonality gate.

    Raises InvariantViolation if the discrete Gram matrix deviates from the
    identity by more than ``tol`` -- that failure mode signals a transcription
    error in the mode formulas or a grid too coarse/narrow to hold them.
    """
    raw_modes, raw_adjoints = _mode_arrays(grid)
    modes = {k: ComplexField(grid, v) for k, v in raw_modes.items()}
    adjoints = {k: ComplexField(grid, v) for k, v in raw_adjoints.items()}

    tau = grid.times
    sech = 1.0 / np.cosh(tau)
    tanh = np.tanh(tau)

    def continuum(omega: float):
        # Traveling eigenfunction pair of the linearized problem:
        #   u = e^{i w tau} (w + i tanh)^2 / (1+w^2),  conjugate part
        #   w-comp = e^{i w tau} sech^2 / (1+w^2).
        # Standing-wave combinations Re/(-Im) of (u + w-comp) span the
        # parity-even / parity-odd continuum directions.
        g = np.exp(1j * omega * tau) * ((omega + 1j * tanh) ** 2 + sech**2) / (1.0 + omega**2)
        f_sym = ComplexField(grid, g.real + 0j)
        f_asym = ComplexField(grid, -g.imag + 0j)
        return f_sym, f_asym

    mode_set = ModeSet(grid, modes, adjoints, continuum)
    if validate:
        gram = gram_matrix(mode_set)
        residual = np.abs(gram - np.eye(len(MODE_NAMES))).max()
        if residual > tol:
            from .errors import InvariantViolation

            raise InvariantViolation(
                f"discrete-mode orthogonality failed: Gram residual {residual:.3e} > {tol:.1e}"
            )
    return mode_set


def gram_matrix(mode_set: ModeSet) -> np.ndarray:
    """<f_i, adj_j> for the four discrete modes; identity when healthy."""
    return np.array(
        [
            [inner_product_re(mode_set.modes[i], mode_set.adjoints[j]) for j in MODE_NAMES]
            for i in MODE_NAMES
        ]
    )


def project(field: ComplexField, mode_set: ModeSet):
    """Split a field into discrete-mode amplitudes and a continuum residual.

    Returns (amplitudes, residual): amplitudes[name] = <field, adj_name>,
    and residual = field - sum amplitudes[i] f_i is orthogonal to every
    discrete adjoint.
    """
    if field.grid != mode_set.grid:
        raise GridMismatchError("field and mode set live on different grids")
    amplitudes = {name: inner_product_re(field, mode_set.adjoints[name]) for name in MODE_NAMES}
    residual = field.samples.copy()
    for name in MODE_NAMES:
        residual -= amplitudes[name] * mode_set.modes[name].samples
    return amplitudes, ComplexField(field.grid, residual)


@dataclass
class EvolutionReport:
    """Mode projections under propagation and the measured secular couplings.

    ``projections[input_mode]`` maps each adjoint name to an array of
    V(xi) values over ``xi_values``.  ``conservation_residual`` is the
    worst deviation of V_number / V_momentum from their initial values.
    ``secular_coefficients`` holds the fitted linear-growth rates
    dV_phase/dxi per unit V_number and dV_time/dxi per unit V_momentum;
    these are measured, not asserted.
    """

    xi_values: np.ndarray
    projections: Dict[str, Dict[str, np.ndarray]]
    conservation_residual: float
    secular_coefficients: Dict[str, float]


def mode_evolution_check(
    mode_set: ModeSet,
    propagate,
    xi: float,
    n_samples: int = 7,
    conservation_tol: float = 1e-4,
) -> EvolutionReport:
    """Evolve each discrete mode as a mean field and track its projections.

    ``propagate(xi)`` must return a Bogoliubov map on the same grid (see
    ``propagator.propagate_map``).  Asserts that the photon-number and
    momentum projections are conserved to ``conservation_tol``; the phase
    and timing projections grow secularly and their rates are only
    reported.
    """
    from .propagator import apply_map_to_mean  # local import to avoid a cycle

    xi_values = np.linspace(0.0, xi, n_samples)
    projections: Dict[str, Dict[str, np.ndarray]] = {}
    for name in MODE_NAMES:
        projections[name] = {adj: np.zeros(n_samples) for adj in MODE_NAMES}

    for k, x in enumerate(xi_values):
        bmap = propagate(x)
        if bmap.grid != mode_set.grid:
            raise GridMismatchError("propagator grid differs from mode grid")
        for name in MODE_NAMES:
            evolved = apply_map_to_mean(bmap, mode_set.modes[name])
            for adj in MODE_NAMES:
                projections[name][adj][k] = inner_product_re(evolved, mode_set.adjoints[adj])

    residual = max(
        np.abs(projections["number"]["number"] - 1.0).max(),
        np.abs(projections["momentum"]["momentum"] - 1.0).max(),
        np.abs(projections["number"]["momentum"]).max(),
        np.abs(projections["momentum"]["number"]).max(),
    )
    if residual > conservation_tol:
        from .errors import InvariantViolation

        raise InvariantViolation(
            f"photon-number/momentum projection not conserved: residual {residual:.3e}"
        )

    def slope(y):
        if xi == 0:
            return 0.0
        return float(np.polyfit(xi_values, y, 1)[0])

    secular = {
        "phase_per_number": slope(projections["number"]["phase"]),
        "time_per_momentum": slope(projections["momentum"]["time"]),
    }
    return EvolutionReport(xi_values, projections, float(residual), secular)
