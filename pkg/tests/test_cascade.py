import numpy as np
import pytest

from solsqueeze import (
    ComplexField,
    apply_map,
    assemble_covariance,
    calibrate_bandwidth,
    custom_filter,
    dss_covariance,
    extract_r,
    first_stage_mean_perturbation,
    identity_filter,
    parabolic_filter,
    propagate_map,
    run_chain,
    run_dss,
    run_sss,
    sweep_sss,
    vacuum_state,
)
from solsqueeze.cascade import (
    SqueezedInputModel,
    StageChain,
    StageSpec,
    filter_weakness,
    maps_for_lengths,
)
from solsqueeze.errors import GridMismatchError
from solsqueeze.measurement import delta_diagonal, time_covariance, with_delta
from solsqueeze.propagator import soliton_period_to_xi


@pytest.fixture(scope="module")
def filter10(grid256):
    return parabolic_filter(grid256, calibrate_bandwidth(grid256, 0.1))


def test_zero_length_identity_stage(grid256):
    s, state = run_sss(StageSpec(0.0, identity_filter(grid256)), grid256)
    assert s == 1.0
    assert np.all(state.moment_nn == 0)


def test_extract_r_formula():
    assert extract_r(1.0) == 0.0
    assert extract_r(np.exp(-2.0)) == pytest.approx(1.0, rel=1e-12)
    assert extract_r(10.0 ** (-0.28)) == pytest.approx(0.322, abs=1e-3)
    for bad in (0.0, -0.5, 1.0001, 2.0):
        with pytest.raises(ValueError):
            extract_r(bad)


def test_identity_filter_leaves_no_mean_perturbation(grid256, soliton256):
    da0 = first_stage_mean_perturbation(identity_filter(grid256), soliton256)
    assert np.all(da0.samples == 0)


def test_parabolic_mean_perturbation_profile(grid256, soliton256):
    w = grid256.frequencies
    eta = np.sqrt(2.0) * w[8]  # eta/sqrt(2) lands on a grid sample
    filt = parabolic_filter(grid256, eta)
    da0 = first_stage_mean_perturbation(filt, soliton256)
    assert da0.samples[0] == 0.0  # h(0) = 0
    from solsqueeze.grid import forward_axis

    spectrum = forward_axis(grid256, soliton256.envelope.samples)
    ratio = da0.samples[8] / spectrum[8]
    assert ratio == pytest.approx(-0.5, rel=1e-10)  # -(w/eta)^2 at w = eta/sqrt 2
    outside = np.abs(w) > eta
    assert np.all(da0.samples[outside] == 0)


def test_weakness_bound_enforced(grid256, soliton256):
    too_strong = custom_filter(grid256, 0.3 * np.ones(grid256.n_points))
    assert filter_weakness(too_strong, soliton256) == pytest.approx(0.7, rel=1e-12)
    with pytest.raises(ValueError):
        first_stage_mean_perturbation(too_strong, soliton256)


def test_weakness_warning_band(grid256, soliton256):
    borderline = custom_filter(grid256, 0.75 * np.ones(grid256.n_points))
    with pytest.warns(UserWarning):
        first_stage_mean_perturbation(borderline, soliton256)


def test_dss_covariance_degenerate_case(grid256):
    state = apply_map(propagate_map(grid256, 1.0), vacuum_state(grid256))
    kernel = assemble_covariance(state)
    zero = ComplexField(grid256, np.zeros(grid256.n_points))
    out = dss_covariance(kernel, 0.0, zero)
    assert np.abs(out.values - kernel.values).max() == 0


def test_dss_covariance_uniform_scaling(grid256):
    state = apply_map(propagate_map(grid256, 1.0), vacuum_state(grid256))
    kernel = assemble_covariance(state)
    zero = ComplexField(grid256, np.zeros(grid256.n_points))
    r = 0.32
    out = dss_covariance(kernel, r, zero)
    n = grid256.n_points
    ridge = (np.exp(-2.0 * r) - 1.0) * delta_diagonal(grid256, "frequency")
    reconstructed = np.exp(-2.0 * r) * kernel.values + ridge * np.eye(n)
    scale = np.abs(kernel.values).max()
    assert np.abs(out.values - reconstructed).max() / scale < 1e-14
    # scaling the full kernel: with the delta restored the scaling is uniform
    full = with_delta(out)
    full_in = with_delta(kernel)
    assert np.abs(full.values - np.exp(-2.0 * r) * full_in.values).max() / scale < 1e-12


def test_dss_covariance_time_and_frequency_consistent(grid256, soliton256, filter10):
    # both domains implement the same covariance transformation: measuring
    # either kernel gives the same S for the real-even mean perturbation
    from solsqueeze.cascade import _input_model_photon_number
    from solsqueeze.measurement import squeezing_from_kernel

    state = apply_map(propagate_map(grid256, soliton_period_to_xi(2.0)), vacuum_state(grid256))
    da0 = first_stage_mean_perturbation(filter10, soliton256)
    r = 0.3
    model = SqueezedInputModel(r, da0)
    n_out = _input_model_photon_number(filter10, model, soliton256)
    k_freq = dss_covariance(assemble_covariance(state), r, da0)
    k_time = dss_covariance(time_covariance(state), r, da0)
    s_freq = squeezing_from_kernel(k_freq, filter10, soliton256, n_out)
    s_time = squeezing_from_kernel(k_time, filter10, soliton256, n_out)
    assert s_time == pytest.approx(s_freq, abs=1e-10)


def test_dss_covariance_grid_mismatch(grid128, grid256):
    state = apply_map(propagate_map(grid256, 1.0), vacuum_state(grid256))
    kernel = assemble_covariance(state)
    with pytest.raises(GridMismatchError):
        dss_covariance(kernel, 0.1, ComplexField(grid128, np.zeros(grid128.n_points)))


def test_coherent_input_reduces_to_single_stage(grid256, filter10):
    lengths = [0.0, 1.0, 2.5]
    maps = maps_for_lengths(grid256, lengths)
    single = sweep_sss(filter10, grid256, lengths, maps=maps)
    chain = StageChain((StageSpec(0.0, identity_filter(grid256)), StageSpec(0.0, filter10)))
    cascaded, _ = run_dss(
        chain,
        grid256,
        sweep_lengths=lengths,
        input_model=SqueezedInputModel.coherent(grid256),
        maps=maps,
    )
    for a, b in zip(single, cascaded):
        assert abs(a.s_value - b.s_value) < 1e-8


def test_pure_squeezed_input_passes_through_trivial_stage(grid256):
    # no fiber, no loss: the input squeezing is what the detector sees
    r = 0.32
    model = SqueezedInputModel(r, ComplexField(grid256, np.zeros(grid256.n_points)))
    chain = StageChain(
        (StageSpec(0.0, identity_filter(grid256)), StageSpec(0.0, identity_filter(grid256)))
    )
    points, _ = run_dss(chain, grid256, input_model=model)
    assert points[0].s_value == pytest.approx(np.exp(-2.0 * r), abs=1e-4)


def test_rank_one_term_never_adds_variance(grid256, soliton256, filter10):
    # the mean-perturbation subtraction enters the measured variance as
    # -(overlap)^2 and so can only lower S at the operating point
    from solsqueeze.cascade import _input_model_photon_number
    from solsqueeze.measurement import squeezing_from_kernel

    state = apply_map(propagate_map(grid256, soliton_period_to_xi(3.0)), vacuum_state(grid256))
    kernel = assemble_covariance(state)
    da0 = first_stage_mean_perturbation(filter10, soliton256)
    r = 0.32
    model = SqueezedInputModel(r, da0)
    n_out = _input_model_photon_number(filter10, model, soliton256)
    zero = ComplexField(grid256, np.zeros(grid256.n_points))
    s_with = squeezing_from_kernel(dss_covariance(kernel, r, da0), filter10, soliton256, n_out)
    s_without = squeezing_from_kernel(dss_covariance(kernel, r, zero), filter10, soliton256, n_out)
    assert s_with <= s_without


def test_dss_improves_on_sss_at_operating_point(grid256, filter10):
    s1, _ = run_sss(StageSpec(3.0, filter10), grid256)
    chain = StageChain((StageSpec(3.0, filter10), StageSpec(3.0, filter10)))
    points, report = run_dss(chain, grid256, cross_check=True)
    assert report["r"] == pytest.approx(extract_r(s1), abs=1e-12)
    assert points[0].s_value < s1
    assert np.isfinite(report["cross_check_gap"])
    assert report["cross_check_gap"] >= 0.0


def test_run_dss_needs_two_stages(grid256, filter10):
    with pytest.raises(ValueError):
        run_dss(StageChain((StageSpec(3.0, filter10),)), grid256)


def test_run_chain_single_stage_matches_sss(grid256, filter10):
    s, _ = run_sss(StageSpec(2.0, filter10), grid256)
    history, model = run_chain(StageChain((StageSpec(2.0, filter10),)), grid256)
    assert history[0].s_value == pytest.approx(s, abs=1e-10)
    assert model.r == pytest.approx(extract_r(s), abs=1e-12)


def test_run_chain_two_stages_matches_run_dss(grid256, filter10):
    chain = StageChain((StageSpec(3.0, filter10), StageSpec(2.0, filter10)))
    history, _ = run_chain(chain, grid256)
    points, _ = run_dss(chain, grid256)
    assert history[-1].s_value == pytest.approx(points[0].s_value, abs=1e-10)


def test_run_chain_three_stages_is_experimental(grid256, filter10):
    chain = StageChain(
        (StageSpec(3.0, filter10), StageSpec(1.0, filter10), StageSpec(1.0, filter10))
    )
    with pytest.warns(UserWarning, match="experimental"):
        history, _ = run_chain(chain, grid256)
    assert len(history) == 3
    assert all(np.isfinite(p.s_value) for p in history)


def test_chain_validation(grid128, grid256, filter10):
    with pytest.raises(ValueError):
        StageChain(())
    with pytest.raises(ValueError):
        StageSpec(-1.0, filter10)
    with pytest.raises(GridMismatchError):
        StageChain((StageSpec(1.0, filter10), StageSpec(1.0, identity_filter(grid128))))


def test_squeezed_input_model_validation(grid256):
    with pytest.raises(ValueError):
        SqueezedInputModel(-0.1, ComplexField(grid256, np.zeros(grid256.n_points)))
    model = SqueezedInputModel.coherent(grid256)
    assert model.is_coherent
    state = model.to_state()
    assert np.all(state.moment_nn == 0)
    assert np.all(state.moment_aa == 0)
