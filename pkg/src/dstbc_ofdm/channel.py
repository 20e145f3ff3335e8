"""Tapped-delay-line Rayleigh channels with Jakes Doppler correlation.

Profiles follow the ITU outdoor tapped-delay-line tables (delays in seconds,
relative powers in dB, normalised so linear powers sum to one).  Each tap and
each of the two transmit antennas gets an independent sum-of-sinusoids fading
process: oscillators at ``f_d*cos(angle)`` with uniform random arrival angles
and circular complex Gaussian weights.  Gaussian weights make every tap
sample exactly complex normal with the profile power while keeping the Jakes
autocorrelation ``J0(2*pi*f_d*tau)`` over the oscillator ensemble.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_TX_ANTENNAS = 2
DEFAULT_OSCILLATORS = 32

# delays in ns, relative powers in dB
_PROFILE_TABLES: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {
    "itu-pb": (
        (0.0, 200.0, 800.0, 1200.0, 2300.0, 3700.0),
        (0.0, -0.9, -4.9, -8.0, -7.8, -23.9),
    ),
    "itu-va": (
        (0.0, 310.0, 710.0, 1090.0, 1730.0, 2510.0),
        (0.0, -1.0, -9.0, -10.0, -15.0, -20.0),
    ),
    "flat": ((0.0,), (0.0,)),
}

PROFILE_NAMES = tuple(sorted(_PROFILE_TABLES))


@dataclass(frozen=True)
class ChannelProfile:
    """Power-delay profile plus the Doppler spread it will be animated with."""

    name: str
    tap_delays_s: tuple[float, ...]
    tap_powers_db: tuple[float, ...]
    doppler_hz: float

    def __post_init__(self) -> None:
        delays = self.tap_delays_s
        if len(delays) == 0 or len(delays) != len(self.tap_powers_db):
            raise ValueError("profile needs matching, non-empty delay and power lists")
        if delays[0] != 0.0:
            raise ValueError(f"first tap delay must be 0, got {delays[0]}")
        if any(d < 0 for d in delays):
            raise ValueError("tap delays must be non-negative")
        if any(b >= a for a, b in zip(delays[1:], delays[:-1])):
            raise ValueError("tap delays must be strictly increasing")
        if self.doppler_hz < 0:
            raise ValueError(f"doppler must be non-negative, got {self.doppler_hz}")

    @property
    def tap_powers_linear(self) -> np.ndarray:
        """Linear tap powers normalised to unit total."""
        linear = 10.0 ** (np.asarray(self.tap_powers_db, dtype=float) / 10.0)
        return linear / linear.sum()


def load_profile(name: str, doppler_hz: float) -> ChannelProfile:
    """Named profile ("itu-pb", "itu-va" or "flat") with the given Doppler."""
    key = name.lower()
    if key not in _PROFILE_TABLES:
        raise ValueError(f"unknown channel profile {name!r}; expected one of {PROFILE_NAMES}")
    delays_ns, powers_db = _PROFILE_TABLES[key]
    return ChannelProfile(
        name=key,
        tap_delays_s=tuple(d * 1e-9 for d in delays_ns),
        tap_powers_db=powers_db,
        doppler_hz=doppler_hz,
    )


def custom_profile(
    delays_ns,
    powers_db,
    doppler_hz: float,
    name: str = "custom",
) -> ChannelProfile:
    """Profile from explicit delay (ns) and power (dB) lists."""
    return ChannelProfile(
        name=name,
        tap_delays_s=tuple(float(d) * 1e-9 for d in delays_ns),
        tap_powers_db=tuple(float(p) for p in powers_db),
        doppler_hz=doppler_hz,
    )


class JakesFadingProcess:
    """One time-correlated Rayleigh tap: sum of Doppler-shifted oscillators.

    ``sample(times)`` is exactly CN(0, mean_power) at every instant and the
    ensemble autocorrelation over (angle, weight) draws is
    ``mean_power * J0(2*pi*doppler_hz*tau)``.
    """

    def __init__(
        self,
        mean_power: float,
        doppler_hz: float,
        rng: np.random.Generator,
        n_oscillators: int = DEFAULT_OSCILLATORS,
    ) -> None:
        if mean_power <= 0:
            raise ValueError("mean_power must be positive")
        if n_oscillators < DEFAULT_OSCILLATORS:
            raise ValueError(f"need at least {DEFAULT_OSCILLATORS} oscillators, got {n_oscillators}")
        angles = rng.uniform(0.0, 2.0 * np.pi, size=n_oscillators)
        scale = np.sqrt(mean_power / (2.0 * n_oscillators))
        self._weights = scale * (
            rng.standard_normal(n_oscillators) + 1j * rng.standard_normal(n_oscillators)
        )
        self._rates = 2.0 * np.pi * doppler_hz * np.cos(angles)
        self.mean_power = mean_power
        self.doppler_hz = doppler_hz

    def sample(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        return np.exp(1j * np.outer(times, self._rates)) @ self._weights


@dataclass(frozen=True)
class FadingRealization:
    """Per-symbol tap gains for both transmit antennas.

    ``taps[s, i, l]`` is tap ``l`` of antenna ``i`` during OFDM symbol ``s``,
    already merged onto the sample grid (``tap_sample_delays`` holds the
    sample indices; ``channel_length`` is the largest one).
    """

    profile: ChannelProfile
    sample_period: float
    tap_sample_delays: np.ndarray
    taps: np.ndarray

    @property
    def n_symbols(self) -> int:
        return self.taps.shape[0]

    @property
    def channel_length(self) -> int:
        return int(self.tap_sample_delays[-1])


def _merged_tap_grid(profile: ChannelProfile, sample_period: float) -> tuple[np.ndarray, np.ndarray]:
    """Round delays to the sample grid (half-up) and merge collisions by power."""
    delays = np.asarray(profile.tap_delays_s, dtype=float)
    positions = np.floor(delays / sample_period + 0.5).astype(np.int64)
    powers = profile.tap_powers_linear
    unique = np.unique(positions)
    merged = np.zeros(unique.shape[0])
    for pos, pwr in zip(positions, powers):
        merged[np.searchsorted(unique, pos)] += pwr
    return unique, merged


def realize_fading(
    profile: ChannelProfile,
    sample_period: float,
    n_ofdm_symbols: int,
    rng,
    *,
    samples_per_symbol: int,
    cp_len: int | None = None,
    n_oscillators: int = DEFAULT_OSCILLATORS,
) -> FadingRealization:
    """Draw one fading realization sampled at OFDM-symbol midpoints.

    The two antennas use disjoint RNG substreams.  When ``cp_len`` is given,
    a merged delay spread longer than the cyclic prefix is rejected.
    """
    if sample_period <= 0:
        raise ValueError("sample_period must be positive")
    if n_ofdm_symbols < 1:
        raise ValueError("need at least one OFDM symbol")
    if samples_per_symbol < 1:
        raise ValueError("samples_per_symbol must be positive")
    positions, powers = _merged_tap_grid(profile, sample_period)
    if cp_len is not None and positions[-1] > cp_len:
        raise ValueError(
            f"delay spread {positions[-1]} samples exceeds cyclic prefix {cp_len} "
            f"(worst tap delay {profile.tap_delays_s[-1]:.3e} s)"
        )
    rng = np.random.default_rng(rng)
    antenna_rngs = rng.spawn(N_TX_ANTENNAS)
    symbol_period = samples_per_symbol * sample_period
    times = (np.arange(n_ofdm_symbols) + 0.5) * symbol_period
    taps = np.empty((n_ofdm_symbols, N_TX_ANTENNAS, positions.shape[0]), dtype=np.complex128)
    for i, antenna_rng in enumerate(antenna_rngs):
        for l, power in enumerate(powers):
            process = JakesFadingProcess(power, profile.doppler_hz, antenna_rng, n_oscillators)
            taps[:, i, l] = process.sample(times)
    realization = FadingRealization(
        profile=profile,
        sample_period=sample_period,
        tap_sample_delays=positions,
        taps=taps,
    )
    realization.tap_sample_delays.flags.writeable = False
    realization.taps.flags.writeable = False
    return realization


def _dense_taps(realization: FadingRealization, symbol_index: int, length: int) -> np.ndarray:
    """Taps of one symbol scattered onto a dense (2, length) impulse response."""
    dense = np.zeros((N_TX_ANTENNAS, length), dtype=np.complex128)
    dense[:, realization.tap_sample_delays] = realization.taps[symbol_index]
    return dense


def freq_response(
    realization: FadingRealization,
    antenna: int,
    symbol_index: int,
    n_subcarriers: int,
) -> np.ndarray:
    """Documented-convention response: lambda(n) = sum_l h_l * exp(+2j*pi*n*l/N).

    This is ``sqrt(N) * F^H @ [h; 0]`` with the unitary DFT matrix F.  Note
    the positive exponent: the response a causal circular channel presents to
    demodulated subcarrier ``n`` is this vector evaluated at ``(N - n) % N``
    (see ``subcarrier_gains``).
    """
    if antenna not in (1, 2):
        raise ValueError(f"antenna must be 1 or 2, got {antenna}")
    if n_subcarriers < realization.channel_length + 1:
        raise ValueError(
            f"need n_subcarriers >= {realization.channel_length + 1}, got {n_subcarriers}"
        )
    dense = _dense_taps(realization, symbol_index, n_subcarriers)
    return np.fft.ifft(dense[antenna - 1]) * n_subcarriers


def subcarrier_gains(
    realization: FadingRealization,
    symbol_index: int,
    n_subcarriers: int,
) -> np.ndarray:
    """Per-subcarrier gains seen after causal convolution and CP removal.

    Returns shape (2, N): ``gains[i, n] = sum_l h_l(i) * exp(-2j*pi*n*l/N)``,
    i.e. ``freq_response`` read at the reflected index ``(N - n) % N``.
    """
    if n_subcarriers < realization.channel_length + 1:
        raise ValueError(
            f"need n_subcarriers >= {realization.channel_length + 1}, got {n_subcarriers}"
        )
    dense = _dense_taps(realization, symbol_index, n_subcarriers)
    return np.fft.fft(dense, axis=-1)
