import numpy as np
import pytest

from lowres_mimo.channel import ArrayGeometry, ChannelParams, ChannelRealization, channel_correlation, generate_channel
from lowres_mimo.errors import ConfigError, EstimationError
from lowres_mimo.quantization import INFINITE, ImpairmentPowers, QuantizerSpec
from lowres_mimo.training import (ChannelEstimate, EstimatorKind, PilotGrid, build_pilot_grid,
                                  ls_estimate_interpolate, simulate_training, simulate_training_combined)

IDEAL = QuantizerSpec(INFINITE)
NO_IMPAIRMENTS = ImpairmentPowers(0.0, 0.0, 0.0)


def fixed_channel(h):
    h = np.asarray(h, dtype=complex)
    p = ChannelParams(ArrayGeometry(h.shape[2]), ArrayGeometry(h.shape[1]),
                      num_subcarriers=h.shape[0], num_taps=1)
    return ChannelRealization(h=h, seed=0, params=p, taps=h[:1], los=np.zeros(h.shape[1:]))


def one_based(grid, t):
    return set((grid.tones(t - 1) + 1).tolist())


def test_pilot_grid_two_antennas():
    g = build_pilot_grid(8, 2)
    assert one_based(g, 1) == {1, 3, 5, 7}
    assert one_based(g, 2) == {2, 4, 6, 8}


def test_pilot_grid_single_antenna():
    assert one_based(build_pilot_grid(8, 1), 1) == set(range(1, 9))


def test_pilot_grid_arithmetic_progression():
    assert one_based(build_pilot_grid(12, 4), 3) == {3, 7, 11}


@pytest.mark.parametrize("n, m", [(64, 8), (12, 3), (32, 32)])
def test_pilot_grid_partition(n, m):
    g = build_pilot_grid(n, m)
    tones = np.concatenate(g.occupancy)
    assert sorted(tones.tolist()) == list(range(n))
    assert all(len(o) == n // m for o in g.occupancy)
    phi = g.pilot_matrix()
    assert np.all(np.count_nonzero(phi, axis=1) == 1)
    assert np.all(np.abs(phi[phi != 0]) == 1)


def test_pilot_grid_ragged_rejected():
    with pytest.raises(ConfigError):
        build_pilot_grid(10, 4)


def test_training_noiseless_identity(rng):
    h = rng.standard_normal((8, 3, 2)) + 1j * rng.standard_normal((8, 3, 2))
    grid = build_pilot_grid(8, 2)
    y = simulate_training(fixed_channel(h), grid, NO_IMPAIRMENTS, 0.0, IDEAL, rng)
    np.testing.assert_array_equal(y, np.einsum("nij,nj->ni", h, grid.pilot_matrix()))


def test_training_scalar():
    grid = build_pilot_grid(4, 1)
    y = simulate_training(fixed_channel(np.full((4, 1, 1), 2.0)), grid, NO_IMPAIRMENTS, 0.0, IDEAL,
                          np.random.default_rng(0))
    np.testing.assert_array_equal(y[:, 0], [2, 2, 2, 2])


def test_training_scalar_two_antenna_comb():
    # antenna 2 is silent on antenna 1's tones and vice versa
    h = np.zeros((4, 1, 2))
    h[:, 0, 0] = 2.0
    y = simulate_training(fixed_channel(h), build_pilot_grid(4, 2), NO_IMPAIRMENTS, 0.0, IDEAL,
                          np.random.default_rng(0))
    np.testing.assert_array_equal(y[:, 0], [2, 0, 2, 0])


def test_training_noise_power(rng):
    n = 100_000
    y = simulate_training(fixed_channel(np.zeros((n, 1, 1))), build_pilot_grid(n, 1),
                          NO_IMPAIRMENTS, 1.0, IDEAL, rng)
    assert np.mean(np.abs(y) ** 2) == pytest.approx(1.0, rel=0.02)


def test_ls_flat_channel_exact(rng):
    h0 = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    h = np.broadcast_to(h0, (16, 3, 4))
    grid = build_pilot_grid(16, 4)
    y = simulate_training(fixed_channel(h), grid, NO_IMPAIRMENTS, 0.0, IDEAL, rng)
    est = ls_estimate_interpolate(y, grid)
    assert est.method_tag is EstimatorKind.CONVENTIONAL
    np.testing.assert_allclose(est.h_tilde, h, rtol=0, atol=1e-14)


def test_ls_linear_midpoint():
    # antenna 1 sounds tones 1 and 3 (1-based)
    grid = build_pilot_grid(4, 2)
    received = np.array([[4.0], [0.0], [8.0], [0.0]])
    est = ls_estimate_interpolate(received, grid)
    assert est.h_tilde[1, 0, 0] == pytest.approx(6.0)
    assert est.h_tilde[3, 0, 0] == pytest.approx(8.0)  # constant hold past the last pilot


def test_ls_interpolation_dense_dft_oracle():
    n, m = 64, 2
    params = ChannelParams(ArrayGeometry(m), ArrayGeometry(m), num_subcarriers=n, num_taps=2,
                           num_clusters=4, k_factor_db=-5.0)
    ch = generate_channel(params, 21)
    grid = build_pilot_grid(n, m)
    y = simulate_training(ch, grid, NO_IMPAIRMENTS, 0.0, IDEAL, np.random.default_rng(0))
    est = ls_estimate_interpolate(y, grid).h_tilde

    def response(freq):  # continuous-frequency DFT of the taps, in tone units
        l = np.arange(ch.taps.shape[0])
        return np.einsum("fl,lij->fij", np.exp(-2j * np.pi * np.outer(freq, l) / n), ch.taps)

    for t in range(m):
        tones = grid.tones(t)
        np.testing.assert_allclose(est[tones, :, t], ch.h[tones, :, t], atol=1e-13)
        for a, b in zip(tones[:-1], tones[1:]):
            dense = np.linspace(a, b, 201)
            ha, hb = response(np.array([a, b]))[:, :, t]
            secant = ha + np.outer((dense - a) / (b - a), hb - ha).reshape(len(dense), -1)
            bound = np.max(np.abs(secant - response(dense)[:, :, t]), axis=0)
            for k in range(a + 1, b):
                assert np.all(np.abs(est[k, :, t] - ch.h[k, :, t]) <= bound + 1e-12)


def test_ls_column_without_pilots():
    grid = PilotGrid(num_subcarriers=2, num_tx=3)
    with pytest.raises(EstimationError):
        ls_estimate_interpolate(np.zeros((2, 1)), grid)


def test_estimation_mse_falls_with_noise():
    params = ChannelParams(ArrayGeometry(2), ArrayGeometry(2), num_subcarriers=16, num_taps=2)
    grid = build_pilot_grid(16, 2)
    mse = []
    for noise in (1.0, 0.1, 0.01):
        rng = np.random.default_rng(5)
        err = []
        for s in range(300):
            ch = generate_channel(params, s)
            y = simulate_training(ch, grid, NO_IMPAIRMENTS, noise, IDEAL, rng)
            err.append(np.mean(np.abs(ls_estimate_interpolate(y, grid).h_tilde - ch.h) ** 2))
        mse.append(np.mean(err))
    assert mse[0] > mse[1] > mse[2]


def test_combined_noise_equivalence():
    params = ChannelParams(ArrayGeometry(2), ArrayGeometry(2), num_subcarriers=4, num_taps=2,
                           k_factor_db=0.0)
    grid = build_pilot_grid(4, 2)
    sigma_w, sigma_d = 0.3, 0.5
    imp = ImpairmentPowers(sigma_d, 0.0, 0.0)
    r_h = channel_correlation(params, 20_000, seed=77)
    cov = sigma_w * np.eye(2) + sigma_d * r_h
    rng_a, rng_b = np.random.default_rng(1), np.random.default_rng(2)

    def pilot_mse(received, ch):
        est = ls_estimate_interpolate(received, grid).h_tilde
        errs = [np.abs(est[grid.tones(t), :, t] - ch.h[grid.tones(t), :, t]) ** 2 for t in range(2)]
        return np.mean(errs)

    explicit, combined = [], []
    for s in range(10_000):
        ch = generate_channel(params, s)
        explicit.append(pilot_mse(simulate_training(ch, grid, imp, sigma_w, IDEAL, rng_a), ch))
        combined.append(pilot_mse(simulate_training_combined(ch, grid, cov, IDEAL, 0.0, rng_b), ch))
    assert np.mean(explicit) == pytest.approx(np.mean(combined), rel=0.03)


def test_channel_estimate_defaults():
    est = ChannelEstimate(np.zeros((2, 1, 1)))
    assert est.method_tag is EstimatorKind.CONVENTIONAL
