"""Synthetic test signals: 1/f^alpha carriers and harmonic interference.

Interference supports piecewise-linear frequency and per-harmonic
amplitude profiles (sweeps, steps, ramps) with phase-continuous
synthesis via cumulative phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _eval_profile(profile, t: np.ndarray) -> np.ndarray:
    """Evaluate a scalar or piecewise-linear profile on a time grid.

    Breakpoints are (time_s, value) pairs; values are held constant
    before the first and after the last breakpoint.
    """
    if np.isscalar(profile):
        return np.full(t.shape, float(profile))
    pts = np.asarray(profile, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
        raise ValueError(
            f"profile must be a scalar or a list of (time_s, value) pairs, got {profile!r}"
        )
    if np.any(np.diff(pts[:, 0]) < 0):
        raise ValueError("profile breakpoint times must be non-decreasing")
    return np.interp(t, pts[:, 0], pts[:, 1])


@dataclass
class InterferenceSpec:
    """Harmonic interference description.

    f0 is the fundamental frequency profile (Hz); amplitudes is one
    profile per harmonic (length sets the harmonic count); phases are
    initial phases in rad (zeros when omitted).
    """

    f0: object = 60.0
    amplitudes: tuple = (1.0,)
    phases: tuple = ()

    @property
    def harmonics(self) -> int:
        return len(self.amplitudes)


def gen_pink_noise(n: int, alpha: float, seed) -> np.ndarray:
    """1/f^alpha noise: zero mean, unit variance, reproducible per seed.

    White Gaussian noise is shaped in the frequency domain by f^(-alpha/2)
    (DC bin zeroed), transformed back, then re-centered and re-scaled.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 1.0 <= alpha <= 3.0:
        raise ValueError(f"alpha must lie in [1, 3], got {alpha}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(n)
    spec = np.fft.rfft(w)
    f = np.fft.rfftfreq(n, 1.0)
    shape = np.zeros_like(f)
    shape[1:] = f[1:] ** (-alpha / 2.0)
    y = np.fft.irfft(spec * shape, n)
    y -= y.mean()
    y /= y.std()
    return y


def gen_interference(spec: InterferenceSpec, n: int, fs: float) -> np.ndarray:
    """Sum of harmonics of a (possibly time-varying) fundamental.

    p(i) = sum_k a_k(i) * cos(k*theta(i) + phi_k) with theta the cumulative
    phase of the frequency profile, so sweeps are phase-continuous.  Every
    harmonic must stay below fs/2 for the whole duration.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if fs <= 0:
        raise ValueError(f"fs must be positive, got {fs}")
    m = spec.harmonics
    if m < 1:
        raise ValueError("amplitudes must name at least one harmonic")
    phases = tuple(spec.phases) if spec.phases else (0.0,) * m
    if len(phases) != m:
        raise ValueError(
            f"phases length {len(phases)} does not match harmonic count {m}"
        )
    t = np.arange(n) / fs
    f0_t = _eval_profile(spec.f0, t)
    if np.any(f0_t <= 0):
        raise ValueError("fundamental frequency profile must stay positive")
    f_max = float(f0_t.max())
    if m * f_max >= fs / 2.0:
        raise ValueError(
            f"harmonic {m} reaches {m * f_max} Hz >= Nyquist ({fs / 2} Hz); "
            f"reduce the harmonic count or the fundamental"
        )
    # theta(i) accumulates frequency over samples 0..i-1 so theta(0) = 0
    theta = np.empty(n)
    theta[0] = 0.0
    np.cumsum(f0_t[:-1], out=theta[1:])
    theta *= 2.0 * np.pi / fs
    p = np.zeros(n)
    for k in range(1, m + 1):
        a_k = _eval_profile(spec.amplitudes[k - 1], t)
        p += a_k * np.cos(k * theta + phases[k - 1])
    return p


def mix_at_snr(carrier: np.ndarray, interference: np.ndarray, snr_db: float):
    """Scale interference to the requested carrier/interference SNR and add.

    Returns (mixed, scaled_interference); the scale satisfies
    10*log10(P_carrier/P_interference) = snr_db.
    """
    carrier = np.asarray(carrier, dtype=np.float64)
    interference = np.asarray(interference, dtype=np.float64)
    if carrier.shape != interference.shape:
        raise ValueError(
            f"length mismatch: carrier {carrier.shape}, interference {interference.shape}"
        )
    p_c = float(np.mean(carrier**2))
    p_i = float(np.mean(interference**2))
    if p_c <= 0.0 or p_i <= 0.0:
        raise ValueError("carrier and interference must both have nonzero power")
    scale = math.sqrt(p_c / (p_i * 10.0 ** (snr_db / 10.0)))
    scaled = interference * scale
    return carrier + scaled, scaled


def measure_snr_db(carrier: np.ndarray, interference: np.ndarray) -> float:
    """10*log10 of the carrier/interference power ratio."""
    p_c = float(np.mean(np.square(carrier)))
    p_i = float(np.mean(np.square(interference)))
    if p_c <= 0.0 or p_i <= 0.0:
        raise ValueError("both signals need nonzero power to measure an SNR")
    return 10.0 * math.log10(p_c / p_i)
