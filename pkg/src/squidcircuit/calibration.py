"""Input-line attenuation from the HEMT noise floor of repeated VNA traces."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import K_B, TWO_PI
from .errors import DataQualityError, DomainError

VALID_BAND = (TWO_PI * 3.8e9, TWO_PI * 5.2e9)
# directional coupler (10 dB) plus cable (1 dB) between generator line and chip
TWO_TONE_EXTRA_LOSS_DB = 11.0


@dataclass(frozen=True)
class NoiseCalibration:
    """Noise-floor model.

    ``T_HEMT(omega) = hemt_offset + hemt_slope * omega / 1e9`` with omega in
    rad/s; the defaults are the amplifier datasheet line.
    """

    T_s: float
    f_IFBW: float = 1.0
    post_sample_loss: float = 1.0
    hemt_offset: float = 7.46
    hemt_slope: float = -3.0 / (7.0 * math.pi)

    def __post_init__(self):
        if not self.T_s > 0:
            raise DomainError("T_s must be positive")
        if not self.f_IFBW > 0:
            raise DomainError("f_IFBW must be positive")

    def T_hemt(self, omega):
        return self.hemt_offset + self.hemt_slope * np.asarray(omega, dtype=float) / 1e9


@dataclass
class AttenuationProfile:
    omega: np.ndarray
    attenuation: np.ndarray  # dB, negative
    raw: np.ndarray
    band: float = 1.0

    @property
    def upper(self):
        return self.attenuation + self.band

    @property
    def lower(self):
        return self.attenuation - self.band

    def at(self, omega):
        return float(np.interp(omega, self.omega, self.attenuation))


def _dbm(watts):
    return 10.0 * np.log10(np.asarray(watts, dtype=float) / 1e-3)


def running_median(values, window):
    """Running median over ``window`` samples, centred where possible.

    Near the ends the window slides inward instead of shrinking, so every
    output is a median of the same number of samples.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    size = max(1, min(int(window), n))
    half = size // 2
    out = np.empty_like(v)
    for i in range(n):
        start = min(max(i - half, 0), n - size)
        out[i] = np.median(v[start:start + size])
    return out


def hemt_noise_floor(omega, cal: NoiseCalibration, include_T_s=True):
    """Thermal noise power at the amplifier input within the IF bandwidth (dBm)."""
    w = np.asarray(omega, dtype=float)
    if np.any((w < VALID_BAND[0]) | (w > VALID_BAND[1])):
        warnings.warn("HEMT noise model used outside its 3.8-5.2 GHz validity band", RuntimeWarning)
    T = cal.T_hemt(w) + (cal.T_s if include_T_s else 0.0)
    return _dbm(K_B * T) + 10.0 * math.log10(cal.f_IFBW)


def attenuation_profile(omega, traces, output_power_dbm, cal: NoiseCalibration,
                        smoothing_points=101, band_db=1.0) -> AttenuationProfile:
    """Attenuation from source to chip for every frequency of repeated traces.

    ``traces`` has shape ``(n_repeats, n_freq)``. The power signal-to-noise
    ratio ``(|mean|/std)^2`` lifts the noise floor to the received signal
    power; adding back the post-sample loss and subtracting the source power
    gives the attenuation, which is then median-smoothed along frequency.
    """
    tr = np.asarray(traces)
    w = np.asarray(omega, dtype=float)
    if tr.ndim != 2 or tr.shape[1] != w.size:
        raise DataQualityError("traces must have shape (n_repeats, n_freq)")
    if tr.shape[0] < 2:
        raise DataQualityError("need at least two repeated traces")
    if tr.shape[0] < 50:
        warnings.warn("fewer than 50 repeated traces; SNR estimate will be noisy", RuntimeWarning)
    mean = np.abs(tr.mean(axis=0))
    std = tr.std(axis=0, ddof=1)
    if np.any(std == 0):
        raise DataQualityError("zero-variance traces: noise statistics are degenerate")
    snr = (mean / std) ** 2
    p_signal = hemt_noise_floor(w, cal) + 10.0 * np.log10(snr)
    raw = p_signal + cal.post_sample_loss - output_power_dbm
    smooth = running_median(raw, smoothing_points)
    return AttenuationProfile(omega=w, attenuation=smooth, raw=raw, band=max(band_db, 1.0))


def on_chip_power(generator_dbm, attenuation_db, extra_loss_db=0.0, uncertainty_db=1.0):
    """On-chip power (dBm) and its bounds ``(P, P_plus, P_minus)``.

    ``extra_loss_db`` holds offsets such as a directional coupler and cable
    in a two-tone setup (11 dB for a 10 dB coupler plus 1 dB cable).
    """
    P = generator_dbm + attenuation_db - extra_loss_db
    return P, P + uncertainty_db, P - uncertainty_db


def dbm_to_watt(p_dbm):
    return 1e-3 * 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def synthetic_calibration_traces(omega, attenuation_db, output_power_dbm, cal: NoiseCalibration,
                                 n_repeats=200, rng=None):
    """Repeated traces whose SNR corresponds to a given attenuation. For tests and ``simulate``."""
    rng = np.random.default_rng(rng)
    w = np.asarray(omega, dtype=float)
    att = np.broadcast_to(np.asarray(attenuation_db, dtype=float), w.shape)
    p_hemt_signal = output_power_dbm + att - cal.post_sample_loss
    snr = 10.0 ** ((p_hemt_signal - hemt_noise_floor(w, cal)) / 10.0)
    amp = 1.0
    sigma = amp / np.sqrt(snr)
    phase = np.exp(1j * 0.3)
    noise = (rng.standard_normal((n_repeats, w.size)) + 1j * rng.standard_normal((n_repeats, w.size)))
    return amp * phase + noise * sigma / math.sqrt(2.0)
