"""Unit tests for multipath profiles and the Rayleigh fading generator."""
import numpy as np
import pytest
from scipy.special import j0

from dstbc_ofdm import (
    JakesFadingProcess,
    custom_profile,
    freq_response,
    load_profile,
    realize_fading,
    subcarrier_gains,
)
from dstbc_ofdm.channel import _merged_tap_grid

SAMPLE_PERIOD = 1.0 / 5e6


def test_pedestrian_profile_sample_grid():
    prof = load_profile("itu-pb", 11.6)
    positions, powers = _merged_tap_grid(prof, SAMPLE_PERIOD)
    assert positions.tolist() == [0, 1, 4, 6, 12, 19]
    assert powers.sum() == pytest.approx(1.0, rel=1e-12)


def test_vehicular_profile_sample_grid():
    prof = load_profile("itu-va", 463.0)
    positions, _ = _merged_tap_grid(prof, SAMPLE_PERIOD)
    assert positions.tolist() == [0, 2, 4, 5, 9, 13]


def test_flat_profile_single_tap():
    prof = load_profile("flat", 10.0)
    positions, powers = _merged_tap_grid(prof, SAMPLE_PERIOD)
    assert positions.tolist() == [0]
    assert powers.tolist() == [1.0]


def test_colliding_delays_merge_power():
    # both taps round to sample 1; their linear powers must add
    prof = custom_profile((0.0, 150.0, 250.0), (0.0, -3.0, -3.0), 5.0)
    positions, powers = _merged_tap_grid(prof, SAMPLE_PERIOD)
    assert positions.tolist() == [0, 1]
    total = 1.0 + 10 ** -0.3 + 10 ** -0.3
    assert powers[1] == pytest.approx(2 * 10 ** -0.3 / total, rel=1e-12)


def test_profile_validation():
    with pytest.raises(ValueError):
        load_profile("cost207", 10.0)
    with pytest.raises(ValueError):
        load_profile("itu-pb", -1.0)
    with pytest.raises(ValueError):
        custom_profile((100.0, 200.0), (0.0, 0.0), 5.0)  # first delay must be zero
    with pytest.raises(ValueError):
        custom_profile((0.0, 200.0, 100.0), (0.0, 0.0, 0.0), 5.0)


def test_jakes_rejects_small_oscillator_count():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        JakesFadingProcess(1.0, 10.0, rng, n_oscillators=8)


def test_jakes_marginal_is_complex_gaussian():
    # weights are Gaussian, so single-time marginals are exactly CN(0, P)
    rng = np.random.default_rng(42)
    power = 0.7
    draws = np.array(
        [JakesFadingProcess(power, 20.0, rng).sample(np.array([0.3]))[0] for _ in range(4000)]
    )
    assert np.mean(draws.real) == pytest.approx(0.0, abs=4 * np.sqrt(power / 2 / 4000))
    assert np.var(draws.real) + np.var(draws.imag) == pytest.approx(power, rel=0.1)
    # real and imaginary parts uncorrelated
    assert np.mean(draws.real * draws.imag) == pytest.approx(0.0, abs=0.05)


def test_jakes_zero_doppler_is_constant():
    rng = np.random.default_rng(3)
    proc = JakesFadingProcess(1.0, 0.0, rng)
    values = proc.sample(np.array([0.0, 1.0, 2.0, 100.0]))
    np.testing.assert_allclose(values, values[0], atol=1e-12)


def test_realization_shape_and_determinism():
    prof = load_profile("itu-pb", 11.6)
    fading_a = realize_fading(prof, SAMPLE_PERIOD, 10, 99, samples_per_symbol=84, cp_len=20)
    fading_b = realize_fading(prof, SAMPLE_PERIOD, 10, 99, samples_per_symbol=84, cp_len=20)
    assert fading_a.taps.shape == (10, 2, 6)
    assert fading_a.n_symbols == 10
    assert fading_a.channel_length == 19
    np.testing.assert_array_equal(fading_a.taps, fading_b.taps)
    assert not fading_a.taps.flags.writeable
    # the two antennas fade independently
    assert not np.allclose(fading_a.taps[:, 0], fading_a.taps[:, 1])


def test_realization_rejects_delay_spread_beyond_cp():
    prof = load_profile("itu-pb", 11.6)
    with pytest.raises(ValueError):
        realize_fading(prof, SAMPLE_PERIOD, 4, 0, samples_per_symbol=74, cp_len=10)


def test_tap_powers_match_profile_when_pooled():
    # one realization is not ergodic; pool many independent ones instead
    prof = load_profile("itu-pb", 11.6)
    rng = np.random.default_rng(11)
    acc = np.zeros(6)
    n_real, n_sym = 400, 50
    for _ in range(n_real):
        fading = realize_fading(prof, SAMPLE_PERIOD, n_sym, rng, samples_per_symbol=84)
        acc += np.mean(np.abs(fading.taps) ** 2, axis=(0, 1))
    _, powers = _merged_tap_grid(prof, SAMPLE_PERIOD)
    np.testing.assert_allclose(acc / n_real, powers, rtol=0.08)


def test_ensemble_autocorrelation_follows_bessel():
    doppler = 30.0
    lags = np.linspace(0.0, 0.06, 8)
    rng = np.random.default_rng(21)
    acc = np.zeros(len(lags), dtype=complex)
    n_proc = 4000
    for _ in range(n_proc):
        h = JakesFadingProcess(1.0, doppler, rng).sample(lags)
        acc += h[0].conjugate() * h
    estimate = (acc / n_proc).real
    np.testing.assert_allclose(estimate, j0(2 * np.pi * doppler * lags), atol=0.06)


def test_gain_conventions_are_reflections(rng):
    prof = load_profile("itu-pb", 11.6)
    fading = realize_fading(prof, SAMPLE_PERIOD, 3, rng, samples_per_symbol=84)
    n = 64
    gains = subcarrier_gains(fading, 1, n)
    for antenna in (1, 2):
        resp = freq_response(fading, antenna, 1, n)
        reflected = resp[(n - np.arange(n)) % n]
        np.testing.assert_allclose(gains[antenna - 1], reflected, atol=1e-12)


def test_gains_diagonalize_circular_convolution(rng):
    # per-subcarrier gains are the eigenvalues of the circulant channel matrix
    prof = load_profile("itu-va", 50.0)
    fading = realize_fading(prof, SAMPLE_PERIOD, 2, rng, samples_per_symbol=84)
    n = 64
    dense = np.zeros(n, dtype=complex)
    dense[fading.tap_sample_delays] = fading.taps[0, 0]
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    y = np.array([np.sum(dense * x[(i - np.arange(n)) % n]) for i in range(n)])
    gains = subcarrier_gains(fading, 0, n)[0]
    np.testing.assert_allclose(np.fft.fft(y), gains * np.fft.fft(x), atol=1e-9)


def test_freq_response_needs_enough_subcarriers(rng):
    prof = load_profile("itu-pb", 11.6)
    fading = realize_fading(prof, SAMPLE_PERIOD, 2, rng, samples_per_symbol=84)
    with pytest.raises(ValueError):
        freq_response(fading, 1, 0, 16)
    with pytest.raises(ValueError):
        freq_response(fading, 3, 0, 64)
