"""Harmonic reference generation without per-sample trigonometry.

Per-harmonic frequency coefficients kappa_k = cos(k*omega) come from the
Chebyshev recurrence on the tracked kappa_1.  Each harmonic then runs a
two-state digital waveguide oscillator producing an orthogonal sinusoid
pair (u, u'), stabilized by a per-sample amplitude gain.
"""
from __future__ import annotations

import math

import numpy as np

# Treat kappa as -1 (gain control undefined) below this distance.
_KAPPA_EDGE = 1e-12


def harmonic_kappas(kappa_1: float, m: int) -> np.ndarray:
    """cos(k*arccos(kappa_1)) for k = 1..m via the Chebyshev recurrence.

    kappa_k = 2*kappa_1*kappa_{k-1} - kappa_{k-2} with kappa_0 = 1; each
    output clamped to [-1, 1] against floating-error overshoot.
    """
    if not -1.0 <= kappa_1 <= 1.0:
        raise ValueError(f"kappa_1 must lie in [-1, 1], got {kappa_1}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    out = np.empty(m)
    km1 = 1.0
    k = kappa_1
    out[0] = k
    for i in range(1, m):
        knext = 2.0 * kappa_1 * k - km1
        if knext > 1.0:
            knext = 1.0
        elif knext < -1.0:
            knext = -1.0
        km1 = k
        k = knext
        out[i] = k
    return out


class OscState:
    """Waveguide oscillator state pair; advance with step() or osc_step().

    Starts at (u, u') = (0, 1); scale and phase are arbitrary because the
    amplitude estimator downstream absorbs both.
    """

    def __init__(self, u: float = 0.0, u_prime: float = 1.0):
        self.u = u
        self.u_prime = u_prime

    def step(self, kappa_k: float) -> tuple:
        s1 = kappa_k * (self.u + self.u_prime)
        s2 = self.u
        u = s1 - self.u_prime
        up = s1 + s2
        # amplitude gain control; target invariant is 0.5
        if abs(kappa_k + 1.0) < _KAPPA_EDGE:
            g = 1.0
        else:
            g = 1.5 - (u * u - ((kappa_k - 1.0) / (kappa_k + 1.0)) * up * up)
            if g < 0.0:
                g = 1.0
        self.u = u * g
        self.u_prime = up * g
        return self.u, self.u_prime


# Descriptive alias.
WaveguideOscillator = OscState


def osc_step(state: OscState, kappa_k: float) -> tuple:
    """One oscillator sample at frequency coefficient kappa_k."""
    return state.step(kappa_k)


def osc_amplitudes(kappa_k: float) -> float:
    """Steady amplitude ratio v/v' = sqrt((1+kappa)/(1-kappa)).

    The two oscillator outputs settle to unequal amplitudes; this ratio
    feeds the correlation-bound computation.
    """
    if not -1.0 < kappa_k < 1.0:
        raise ValueError(f"kappa_k must lie strictly inside (-1, 1), got {kappa_k}")
    return math.sqrt((1.0 + kappa_k) / (1.0 - kappa_k))


def osc_invariant(state: OscState, kappa_k: float) -> float:
    """Gain-control invariant u^2 - ((kappa-1)/(kappa+1))*u'^2 (target 0.5)."""
    if abs(kappa_k + 1.0) < _KAPPA_EDGE:
        raise ValueError("invariant undefined at kappa = -1")
    c1 = (kappa_k - 1.0) / (kappa_k + 1.0)
    return state.u * state.u - c1 * state.u_prime * state.u_prime
