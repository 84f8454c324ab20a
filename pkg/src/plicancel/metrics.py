"""Output-quality metrics for canceller runs on synthetic ground truth.

SNR_out compares the cleaned output against the known clean carrier over
a steady-state window.  Because the 1/f^alpha carrier is strongly
nonstationary at the 1 s scale, windowed SNR references each window's
error power to the carrier's whole-run power; per-window carrier power
would make the metric report carrier lulls as canceller failures.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.signal

# Zero-residual runs report this instead of +inf.
SNR_CAP_DB = 200.0


def steady_skip_s(p_st: float, w: float) -> float:
    """Steady-state onset: max(2*P_st, 2*W, 5 s) from stream start."""
    return max(2.0 * p_st, 2.0 * w, 5.0)


def snr_out(clean: np.ndarray, estimate: np.ndarray, fs: float, skip_s: float) -> float:
    """10*log10(sum s^2 / sum (s_hat - s)^2) over the post-skip window.

    Capped at SNR_CAP_DB when the residual is exactly zero.
    """
    clean = np.asarray(clean, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if clean.shape != estimate.shape:
        raise ValueError(f"length mismatch: {clean.shape} vs {estimate.shape}")
    k = int(round(skip_s * fs))
    if k >= clean.size:
        raise ValueError(
            f"skip of {skip_s} s ({k} samples) consumes the whole signal "
            f"({clean.size} samples)"
        )
    s = clean[k:]
    err = estimate[k:] - s
    p_err = float(np.sum(err**2))
    p_sig = float(np.sum(s**2))
    if p_err == 0.0:
        return SNR_CAP_DB
    return min(SNR_CAP_DB, 10.0 * math.log10(p_sig / p_err))


def windowed_snr(
    clean: np.ndarray,
    estimate: np.ndarray,
    fs: float,
    skip_s: float,
    window_s: float = 1.0,
) -> np.ndarray:
    """Per-window SNR with a whole-run signal-power reference.

    Each window's error power is compared against the clean signal's mean
    power over the full post-skip span, so a momentary tracking loss shows
    up as a dip without carrier-power fluctuations masquerading as one.
    """
    clean = np.asarray(clean, dtype=np.float64)
    estimate = np.asarray(estimate, dtype=np.float64)
    if clean.shape != estimate.shape:
        raise ValueError(f"length mismatch: {clean.shape} vs {estimate.shape}")
    k = int(round(skip_s * fs))
    win = int(round(window_s * fs))
    if win < 1:
        raise ValueError(f"window of {window_s} s is shorter than one sample")
    s = clean[k:]
    err = estimate[k:] - s
    if s.size < win:
        raise ValueError("post-skip span shorter than one window")
    p_ref = float(np.mean(s**2))
    n_win = s.size // win
    out = np.empty(n_win)
    for i in range(n_win):
        p_err = float(np.mean(err[i * win : (i + 1) * win] ** 2))
        out[i] = SNR_CAP_DB if p_err == 0.0 else min(
            SNR_CAP_DB, 10.0 * math.log10(p_ref / p_err)
        )
    return out


def convergence_time_ms(
    freq_trace_hz: np.ndarray,
    f0_hz: float,
    fs: float,
    tol_hz: float = 1.0,
    hold_s: float = 0.1,
) -> float:
    """Start (ms) of the first hold_s span staying within tol_hz of f0.

    Returns inf when the estimate never holds the tolerance.
    """
    err_ok = np.abs(np.asarray(freq_trace_hz) - f0_hz) <= tol_hz
    hold = max(1, int(round(hold_s * fs)))
    if err_ok.size < hold:
        return math.inf
    # run-length scan: first index where the next `hold` samples all pass
    count = 0
    for i, ok in enumerate(err_ok):
        count = count + 1 if ok else 0
        if count >= hold:
            return (i - hold + 1) / fs * 1000.0
    return math.inf


def mse_curve(runs) -> np.ndarray:
    """Pointwise mean of squared residuals across runs."""
    if len(runs) == 0:
        raise ValueError("mse_curve needs at least one run")
    arr = np.asarray(runs, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"runs must be equal-length 1-D series, got shape {arr.shape}")
    return np.mean(arr**2, axis=0)


def welch_psd(x: np.ndarray, fs: float, segment: int, overlap: float = 0.5):
    """One-sided Welch PSD with a Hann window; returns (freqs, psd)."""
    x = np.asarray(x, dtype=np.float64)
    if segment > x.size:
        raise ValueError(f"segment {segment} exceeds signal length {x.size}")
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must lie in [0, 1), got {overlap}")
    return scipy.signal.welch(
        x,
        fs=fs,
        window="hann",
        nperseg=segment,
        noverlap=int(round(overlap * segment)),
        return_onesided=True,
    )
