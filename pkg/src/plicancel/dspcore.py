"""Fixed filtering primitives feeding the frequency tracker.

A 4th-order Butterworth bandpass (two second-order sections, transposed
direct form II) isolates the fundamental of the interference, a first
difference whitens it, and an optional one-pole DC blocker removes bias
before everything else.  All stages are per-sample and deterministic.
"""
from __future__ import annotations

import numpy as np
import scipy.signal


def design_bandpass(fs: float, f_lo: float = 40.0, f_hi: float = 70.0) -> np.ndarray:
    """Design the 4th-order Butterworth bandpass as second-order sections.

    Parameters
    ----------
    fs : float
        Sampling rate in Hz.
    f_lo, f_hi : float
        -3 dB passband edges in Hz; must satisfy 0 < f_lo < f_hi < fs/2.

    Returns
    -------
    sos : ndarray, shape (2, 6)
        Second-order sections in scipy layout [b0, b1, b2, 1, a1, a2].
    """
    if not 0.0 < f_lo < f_hi < fs / 2.0:
        raise ValueError(
            f"passband edges must satisfy 0 < f_lo < f_hi < fs/2, "
            f"got ({f_lo}, {f_hi}) at fs={fs}"
        )
    sos = scipy.signal.butter(2, [f_lo, f_hi], btype="bandpass", output="sos", fs=fs)
    # stability of each section: |a2| < 1 and |a1| < 1 + a2
    for row in sos:
        a1, a2 = row[4], row[5]
        if not (abs(a2) < 1.0 and abs(a1) < 1.0 + a2):
            raise ValueError(
                f"designed section is unstable (a1={a1}, a2={a2}); "
                f"edges ({f_lo}, {f_hi}) too extreme for fs={fs}"
            )
    return np.asarray(sos, dtype=np.float64)


class SosFilter:
    """Cascaded biquad filter, transposed direct form II, one sample a time."""

    def __init__(self, sos: np.ndarray):
        sos = np.asarray(sos, dtype=np.float64)
        if sos.ndim != 2 or sos.shape[1] != 6:
            raise ValueError(f"sos must have shape (n_sections, 6), got {sos.shape}")
        self.sos = sos
        self.z = np.zeros((sos.shape[0], 2))

    def reset(self) -> None:
        self.z[:] = 0.0

    def step(self, x: float) -> float:
        for s in range(self.sos.shape[0]):
            b0, b1, b2, _, a1, a2 = self.sos[s]
            y = b0 * x + self.z[s, 0]
            self.z[s, 0] = b1 * x - a1 * y + self.z[s, 1]
            self.z[s, 1] = b2 * x - a2 * y
            x = y
        return x

    def process(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        out = np.empty_like(x)
        for i in range(x.size):
            out[i] = self.step(x[i])
        return out


class FirstDifference:
    """x(n) - x(n-1); previous sample starts at 0.

    Gain at angular frequency w is 2 sin(w/2), which whitens the 1/f
    background ahead of the frequency tracker.
    """

    def __init__(self):
        self.prev = 0.0

    def reset(self) -> None:
        self.prev = 0.0

    def step(self, x: float) -> float:
        y = x - self.prev
        self.prev = x
        return y


class DcBlocker:
    """One-pole DC blocker y(n) = x(n) - x(n-1) + pole*y(n-1)."""

    def __init__(self, pole: float = 0.995):
        if not 0.0 < pole < 1.0:
            raise ValueError(f"pole must lie in (0, 1), got {pole}")
        self.pole = pole
        self.prev_x = 0.0
        self.prev_y = 0.0

    def reset(self) -> None:
        self.prev_x = 0.0
        self.prev_y = 0.0

    def step(self, x: float) -> float:
        y = x - self.prev_x + self.pole * self.prev_y
        self.prev_x = x
        self.prev_y = y
        return y


def filter_sample(state: SosFilter, x: float) -> float:
    """One sample through a cascaded-SOS filter (see SosFilter.step)."""
    return state.step(x)


def differentiate(state: FirstDifference, x: float) -> float:
    """One sample through the first difference (see FirstDifference.step)."""
    return state.step(x)


def dc_block(state: DcBlocker, x: float) -> float:
    """One sample through the DC blocker (see DcBlocker.step)."""
    return state.step(x)
