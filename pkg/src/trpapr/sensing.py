"""Radar-side evaluation: echo channel, matched-filter ranging, aperiodic ACF.

SNR convention: the transmit signal is scaled by sigma_x = 10^(snr_db/20)
while the additive noise is circularly symmetric complex Gaussian with unit
variance, i.e. snr_db = 20*log10(sigma_x) and sigma_x^2 is the linear SNR.

All correlations are aperiodic (zero-padded); signals carry no cyclic
prefix.  A periodic (circular) autocorrelation is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import SPEED_OF_LIGHT, ComplexSignal, Domain, as_samples


@dataclass(frozen=True)
class RadarScene:
    """Static-target echo geometry plus the OFDM numerology defining the grid."""

    target_delays: tuple          # integer sample delays, one per target
    snr_db: float
    carrier_freq_hz: float = 26e9
    subcarrier_spacing_hz: float = 450e3
    target_velocities: tuple = ()

    def __post_init__(self):
        delays = tuple(int(t) for t in self.target_delays)
        if any(t < 0 for t in delays):
            raise ValueError("target delays must be >= 0 samples")
        vel = tuple(self.target_velocities) or (0.0,) * len(delays)
        if len(vel) != len(delays):
            raise ValueError("one velocity per target required")
        if any(v != 0.0 for v in vel):
            raise ValueError("only static targets are supported (all velocities zero)")
        if self.carrier_freq_hz <= 0 or self.subcarrier_spacing_hz <= 0:
            raise ValueError("carrier frequency and subcarrier spacing must be > 0")
        object.__setattr__(self, "target_delays", delays)
        object.__setattr__(self, "target_velocities", vel)

    @property
    def num_targets(self) -> int:
        return len(self.target_delays)

    @property
    def sigma_x(self) -> float:
        return float(10.0 ** (self.snr_db / 20.0))

    def sample_rate(self, n_subcarriers: int) -> float:
        return n_subcarriers * self.subcarrier_spacing_hz


@dataclass
class AacfResult:
    """Aperiodic autocorrelation r_k for k >= 0 plus the peak sidelobe level."""

    lags: np.ndarray
    values: np.ndarray
    psl_db: float


def apply_radar_channel(x, scene: RadarScene, seed) -> ComplexSignal:
    """y[n] = sigma_x * sum_u x[n - tau_u] + z[n], x zero before its start."""
    if isinstance(x, ComplexSignal) and x.domain is not Domain.TIME:
        raise ValueError("the radar channel acts on time-domain signals")
    samples = as_samples(x)
    n = samples.size
    if any(t >= n for t in scene.target_delays):
        raise ValueError("target delay must be smaller than the signal length")
    y = np.zeros(n, dtype=np.complex128)
    for tau in scene.target_delays:
        y[tau:] += samples[:n - tau]
    y *= scene.sigma_x
    rng = np.random.default_rng(seed)
    noise = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return ComplexSignal(y + noise, Domain.TIME)


def cross_correlation_lags(y, x_ref) -> np.ndarray:
    """c[k] = sum_n y[n] conj(x_ref[n-k]) for k = 0..N-1, via zero-padded FFT."""
    y_vec = as_samples(y)
    x_vec = as_samples(x_ref)
    if y_vec.size != x_vec.size:
        raise ValueError("signals must have equal length")
    n = y_vec.size
    m = 2 * n
    spec = np.fft.fft(y_vec, m) * np.conj(np.fft.fft(x_vec, m))
    return np.fft.ifft(spec)[:n]


def estimate_delay(y, x_ref) -> int:
    """Argmax of the aperiodic cross-correlation magnitude; ties go to smaller lag."""
    x_vec = as_samples(x_ref)
    if not np.any(x_vec):
        raise ValueError("reference signal must be nonzero")
    corr = cross_correlation_lags(y, x_ref)
    return int(np.argmax(np.abs(corr)))


def estimate_range(tau_hat: int, sample_rate: float) -> float:
    """Round-trip delay in samples to one-way distance in meters."""
    if sample_rate <= 0:
        raise ValueError("sample rate must be > 0")
    return SPEED_OF_LIGHT * (tau_hat / sample_rate) / 2.0


def aacf(x, periodic: bool = False) -> AacfResult:
    """Autocorrelation r_k = sum_n conj(x[n]) x[n+k], k = 0..N-1, FFT-based.

    psl_db = 20*log10(max_{k>=1} |r_k| / r_0).  With periodic=True the
    circular autocorrelation is returned instead.
    """
    vec = as_samples(x)
    if not np.any(vec):
        raise ValueError("PSL is undefined for an all-zero signal")
    n = vec.size
    if periodic:
        values = np.fft.ifft(np.abs(np.fft.fft(vec)) ** 2)
    else:
        spec = np.fft.fft(vec, 2 * n)
        values = np.fft.ifft(np.abs(spec) ** 2)[:n]
    r0 = values[0].real
    if n > 1:
        psl = float(20.0 * np.log10(np.abs(values[1:]).max() / r0))
    else:
        psl = float("-inf")
    return AacfResult(lags=np.arange(n), values=values, psl_db=psl)


def ranging_rmse(waveform_factory: Callable[[np.random.Generator], ComplexSignal],
                 scene_template: RadarScene, snr_grid_db: Sequence[float],
                 trials: int, master_seed) -> list[tuple[float, float]]:
    """Monte Carlo ranging RMSE over an SNR grid for a single-target scene.

    Per (snr, trial), a fresh waveform is drawn from the factory and passed
    through a freshly seeded channel; the waveform stream and the noise
    stream are derived independently of each other so different factories
    see identical noise.  Returns [(snr_db, rmse_meters), ...].
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if scene_template.num_targets != 1:
        raise ValueError("ranging RMSE is defined for single-target scenes")
    tau_true = scene_template.target_delays[0]
    base = list(np.atleast_1d(np.asarray(master_seed, dtype=np.uint64)).tolist())
    curve = []
    for i, snr in enumerate(snr_grid_db):
        scene = RadarScene(scene_template.target_delays, float(snr),
                           scene_template.carrier_freq_hz,
                           scene_template.subcarrier_spacing_hz)
        sq_err = 0.0
        for j in range(trials):
            rng_wave = np.random.default_rng(base + [1, i, j])
            x = waveform_factory(rng_wave)
            fs = scene.sample_rate(len(x))
            y = apply_radar_channel(x, scene, base + [2, i, j])
            tau_hat = estimate_delay(y, x)
            err = estimate_range(tau_hat, fs) - estimate_range(tau_true, fs)
            sq_err += err * err
        curve.append((float(snr), float(np.sqrt(sq_err / trials))))
    return curve
