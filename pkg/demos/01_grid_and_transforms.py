"""Grid conventions: sampling, transforms, and quadrature.

Every quantity in the package lives on one uniform time grid with its
FFT-dual frequency axis.  This demo shows the transform normalization on
the canonical example: the soliton envelope sech(tau) transforms to
pi * sech(pi w / 2), and the two-photon normalization integral comes out
as exactly 2.
"""

import numpy as np

from solsqueeze import (
    ComplexField,
    forward_transform,
    inner_product_re,
    inverse_transform,
    make_grid,
    mean_field,
)

grid = make_grid(512, 20.0)
print(f"grid: {grid.n_points} points on tau in [-{grid.window}, {grid.window})")
print(f"  dt = {grid.dt}, dw = {grid.dw:.6f}, dt*dw*N = {grid.dt*grid.dw*grid.n_points:.12f}")
print(f"  frequency axis covers [{grid.frequencies.min():.3f}, {grid.frequencies.max():.3f}]")

# the soliton mean field and its closed-form spectrum
soliton = mean_field(grid)
print(f"\nphoton number  int |sech|^2 dtau = {soliton.photon_number!r}  (exactly 2 photons)")

spectrum = forward_transform(soliton.envelope)
closed_form = np.pi / np.cosh(np.pi * grid.frequencies / 2.0)
err = np.abs(spectrum.samples - closed_form).max()
print(f"F[sech](0) = {spectrum.samples[0].real:.9f}  vs  pi = {np.pi:.9f}")
print(f"worst deviation from pi*sech(pi w/2) over the whole axis: {err:.2e}")

# transforms are an exact inverse pair
rng = np.random.default_rng(1)
noise = ComplexField(grid, rng.standard_normal(grid.n_points) * np.exp(-0.05 * grid.times**2))
back = inverse_transform(forward_transform(noise))
print(f"\nround-trip residual on a random field: {np.abs(back.samples - noise.samples).max():.2e}")

# Parseval with the (1/2pi) d omega convention
f = ComplexField(grid, np.exp(-0.5 * grid.times**2 + 0.3j * grid.times))
F = forward_transform(f)
time_side = grid.dt * np.sum(np.abs(f.samples) ** 2)
freq_side = grid.dw / (2 * np.pi) * np.sum(np.abs(F.samples) ** 2)
print(f"Parseval: int |f|^2 dtau = {time_side:.12f}")
print(f"          (1/2pi) int |F|^2 dw = {freq_side:.12f}")

# the real inner product used for all mode projections
even = soliton.envelope
odd = ComplexField(grid, np.tanh(grid.times) / np.cosh(grid.times))
print(f"\n<sech, sech>         = {inner_product_re(even, even):.10f}")
print(f"<sech, tanh*sech>    = {inner_product_re(even, odd):.2e}  (odd integrand)")
