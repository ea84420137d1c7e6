import numpy as np
import pytest

from solsqueeze import (
    apply_map,
    apply_filter,
    calibrate_bandwidth,
    custom_filter,
    identity_filter,
    make_grid,
    mean_field_loss,
    parabolic_filter,
    propagate_map,
    vacuum_state,
)
from solsqueeze.errors import GridMismatchError, RealizabilityError
from solsqueeze.propagator import check_physical, soliton_period_to_xi

# bandwidth of the 10%-loss parabolic filter on the (512, 20) grid, frozen
# from the bisection + quadrature oracle in this suite
ETA_TEN_PERCENT_512 = 2.4259425590597283


def test_parabolic_profile(grid256):
    # choose eta so that eta/sqrt(2) and 1.5*eta sit exactly on grid samples
    w = grid256.frequencies
    eta = np.sqrt(2.0) * w[8]
    filt = parabolic_filter(grid256, eta)
    assert filt.transfer[0] == pytest.approx(1.0)  # H(0) = 1
    assert filt.transfer[8] == pytest.approx(0.5, rel=1e-12)  # H(eta/sqrt 2) = 1/2
    idx_out = np.argmin(np.abs(w - 1.5 * eta))
    assert abs(w[idx_out]) > eta
    assert filt.transfer[idx_out] == 0.0  # bandlimited: zero outside |w| <= eta
    inside = np.abs(w) <= eta
    assert np.allclose(filt.transfer[inside], 1.0 - w[inside] ** 2 / eta**2)


def test_parabolic_rejects_bad_bandwidth(grid256):
    with pytest.raises(ValueError):
        parabolic_filter(grid256, 0.0)
    with pytest.raises(ValueError):
        parabolic_filter(grid256, grid256.nyquist * 1.5)


def test_realizability_enforced(grid256):
    h = np.ones(grid256.n_points)
    h[5] = 1.2
    with pytest.raises(RealizabilityError):
        custom_filter(grid256, h)


def test_calibration_round_trip():
    g = make_grid(512, 20.0)
    eta = calibrate_bandwidth(g, 0.1)
    assert eta == pytest.approx(ETA_TEN_PERCENT_512, abs=1e-6)
    from solsqueeze import mean_field

    loss = mean_field_loss(parabolic_filter(g, eta), mean_field(g))
    assert loss == pytest.approx(0.1, abs=1e-6)


def test_loss_monotone_in_bandwidth(grid256, soliton256):
    etas = [0.8, 1.5, 2.5, 4.0]
    losses = [mean_field_loss(parabolic_filter(grid256, e), soliton256) for e in etas]
    assert all(a > b for a, b in zip(losses, losses[1:]))


def test_small_target_pushes_band_to_nyquist(grid256, soliton256):
    # as the loss target drops toward the irreducible rolloff value, the
    # calibrated band opens out to the Nyquist-limited maximum
    widest = parabolic_filter(grid256, grid256.nyquist * (1.0 - 1e-9))
    floor = mean_field_loss(widest, soliton256)
    eta = calibrate_bandwidth(grid256, floor * 1.001)
    assert eta > 0.9 * grid256.nyquist


def test_calibration_rejects_unreachable_target(grid256):
    # widest admissible band still loses energy to the parabolic rolloff
    with pytest.raises(ValueError):
        calibrate_bandwidth(grid256, 1e-6)
    with pytest.raises(ValueError):
        calibrate_bandwidth(grid256, 0.99)
    with pytest.raises(ValueError):
        calibrate_bandwidth(grid256, 1.5)


def test_identity_filter_is_neutral(grid256, soliton256):
    state = apply_map(propagate_map(grid256, 1.0), vacuum_state(grid256))
    out, n_out = apply_filter(identity_filter(grid256), state, soliton256)
    assert n_out == pytest.approx(2.0, abs=1e-6)
    assert np.abs(out.moment_nn - state.moment_nn).max() == 0
    assert np.abs(out.moment_aa - state.moment_aa).max() == 0
    # composing any filter with the identity is exact
    eta = calibrate_bandwidth(grid256, 0.1)
    filtered, _ = apply_filter(parabolic_filter(grid256, eta), state, soliton256)
    composed, _ = apply_filter(identity_filter(grid256), filtered, soliton256)
    assert np.abs(composed.moment_nn - filtered.moment_nn).max() == 0
    assert np.abs(composed.moment_aa - filtered.moment_aa).max() == 0


def test_vacuum_is_filter_fixed_point(grid256, soliton256):
    eta = calibrate_bandwidth(grid256, 0.1)
    out, _ = apply_filter(parabolic_filter(grid256, eta), vacuum_state(grid256), soliton256)
    assert np.abs(out.moment_nn).max() == 0
    assert np.abs(out.moment_aa).max() == 0
    assert np.abs(out.mean.samples).max() == 0


def test_ten_percent_loss_photon_number(grid256, soliton256):
    eta = calibrate_bandwidth(grid256, 0.1)
    state = apply_map(propagate_map(grid256, soliton_period_to_xi(1.0)), vacuum_state(grid256))
    _, n_out = apply_filter(parabolic_filter(grid256, eta), state, soliton256)
    assert n_out == pytest.approx(1.8, abs=1e-4)


def test_filtered_state_stays_physical(grid256, soliton256):
    eta = calibrate_bandwidth(grid256, 0.1)
    state = apply_map(propagate_map(grid256, soliton_period_to_xi(2.0)), vacuum_state(grid256))
    out, _ = apply_filter(parabolic_filter(grid256, eta), state, soliton256)
    assert np.abs(out.moment_nn - np.conj(out.moment_nn.T)).max() < 1e-10 / grid256.dt
    assert np.abs(out.moment_aa - out.moment_aa.T).max() < 1e-10 / grid256.dt
    check_physical(out)


def test_filter_magnitude_acts_on_moments(grid256, soliton256):
    # double application of |H| equals single application of |H|^2
    eta = calibrate_bandwidth(grid256, 0.1)
    filt = parabolic_filter(grid256, eta)
    sq = custom_filter(grid256, filt.transfer**2)
    state = apply_map(propagate_map(grid256, 1.0), vacuum_state(grid256))
    twice, _ = apply_filter(filt, apply_filter(filt, state, soliton256)[0], soliton256)
    once, _ = apply_filter(sq, state, soliton256)
    scale = np.abs(state.moment_nn).max()
    assert np.abs(twice.moment_nn - once.moment_nn).max() / scale < 1e-10
    assert np.abs(twice.moment_aa - once.moment_aa).max() / scale < 1e-10


def test_grid_mismatch_rejected(grid128, grid256, soliton256):
    state = vacuum_state(grid256)
    with pytest.raises(GridMismatchError):
        apply_filter(identity_filter(grid128), state, soliton256)
