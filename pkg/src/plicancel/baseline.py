"""Fixed notch-filter cascades used as comparison baselines.

Second-order IIR notches at a fundamental and its harmonics with a fixed
-3 dB bandwidth.  Unlike the adaptive canceller these assume the line
frequency exactly; the comparison quantifies what that assumption costs
when the actual frequency drifts.
"""
from __future__ import annotations

import numpy as np
import scipy.signal


def design_notch_cascade(fs: float, f0: float, bw: float, harmonics: int) -> np.ndarray:
    """Second-order sections of notches at k*f0, k = 1..harmonics."""
    if harmonics < 1:
        raise ValueError(f"harmonics must be >= 1, got {harmonics}")
    if bw <= 0:
        raise ValueError(f"bw must be positive, got {bw}")
    if harmonics * f0 >= fs / 2.0:
        raise ValueError(
            f"notch center {harmonics * f0} Hz is at or above Nyquist ({fs / 2} Hz)"
        )
    sections = []
    for k in range(1, harmonics + 1):
        w0 = k * f0
        b, a = scipy.signal.iirnotch(w0, w0 / bw, fs=fs)
        sections.append(np.hstack([b, a]))
    return np.vstack(sections)


def baseline_notch(x: np.ndarray, fs: float, f0: float, bw: float, harmonics: int) -> np.ndarray:
    """Run a signal through the notch cascade (causal, zero initial state)."""
    x = np.asarray(x, dtype=np.float64)
    sos = design_notch_cascade(fs, f0, bw, harmonics)
    return scipy.signal.sosfilt(sos, x)
