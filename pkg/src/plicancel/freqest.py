"""Frequency tracking with a single-coefficient lattice adaptive notch filter.

The tracker runs an adaptive all-pole lattice section on the preprocessed
input.  Its one reflection coefficient kappa_f equals cos(omega) of the
notch center, so the instantaneous frequency estimate is
fs*arccos(kappa_f)/(2*pi).  Bandwidth and memory start wide/short for fast
acquisition and tighten exponentially toward narrow/long steady-state
values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ActualParams

# c and d start at a small positive epsilon so the first ratio is defined.
EPS_INIT = 1e-6
# Below this, d is treated as degenerate (no excitation) and the previous
# ratio is held instead of dividing.
DIV_GUARD = 1e-30


@dataclass
class Schedule:
    """Exponential approach v <- rate*v + (1-rate)*asymptote."""

    init: float
    asymptote: float
    rate: float

    def step(self, v: float) -> float:
        return self.rate * v + (1.0 - self.rate) * self.asymptote


def schedule_step(s: Schedule, v: float) -> float:
    """One schedule update; fixed point is the asymptote."""
    return s.step(v)


@dataclass
class AnfState:
    """Lattice tracker state; advance with step() or anf_step().

    f1, f2 hold the last two all-pole outputs.  c/d are the forgetting
    correlation numerator/denominator whose ratio is the raw per-sample
    frequency coefficient kappa_t; kappa_f is its smoothed version.
    alpha_f (pole radius) and lambda_f (forgetting factor) follow their
    schedules toward alpha_inf / lambda_inf.
    """

    f1: float = 0.0
    f2: float = 0.0
    c: float = EPS_INIT
    d: float = EPS_INIT
    kappa_t_held: float = 0.0
    kappa_f: float = 0.0
    alpha_f: float = 0.0
    lambda_f: float = 0.0
    alpha_inf: float = 0.0
    lambda_inf: float = 0.0
    alpha_st: float = 0.0
    lambda_st: float = 0.0
    gamma: float = 0.0

    def step(self, x_d: float) -> float:
        # all-pole lattice update, then correlations, ratio with clipping,
        # smoothing, and finally the bandwidth/memory schedules
        f = x_d + self.kappa_f * (1.0 + self.alpha_f) * self.f1 - self.alpha_f * self.f2
        self.c = self.lambda_f * self.c + self.f1 * (f + self.f2)
        self.d = self.lambda_f * self.d + 2.0 * self.f1 * self.f1
        if self.d < DIV_GUARD:
            kappa_t = self.kappa_t_held
        else:
            kappa_t = self.c / self.d
            if kappa_t > 1.0:
                kappa_t = 1.0
            elif kappa_t < -1.0:
                kappa_t = -1.0
        self.kappa_t_held = kappa_t
        self.kappa_f = self.gamma * self.kappa_f + (1.0 - self.gamma) * kappa_t
        self.alpha_f = self.alpha_st * self.alpha_f + (1.0 - self.alpha_st) * self.alpha_inf
        self.lambda_f = self.lambda_st * self.lambda_f + (1.0 - self.lambda_st) * self.lambda_inf
        self.f2 = self.f1
        self.f1 = f
        return self.kappa_f


def anf_init(actual: ActualParams) -> AnfState:
    """Fresh tracker state: c = d = eps, zero history, kappa_f = 0."""
    return AnfState(
        alpha_f=actual.alpha_0,
        lambda_f=actual.lambda_0,
        alpha_inf=actual.alpha_inf,
        lambda_inf=actual.lambda_inf,
        alpha_st=actual.alpha_st,
        lambda_st=actual.lambda_st,
        gamma=actual.gamma,
    )


def anf_step(state: AnfState, x_d: float) -> float:
    """Advance the tracker one sample; returns the new kappa_f."""
    return state.step(x_d)


def freq_hz(kappa_f: float, fs: float) -> float:
    """Frequency estimate in Hz: fs*arccos(kappa_f)/(2*pi)."""
    if not -1.0 <= kappa_f <= 1.0:
        raise ValueError(f"kappa_f must lie in [-1, 1], got {kappa_f}")
    return fs * math.acos(kappa_f) / (2.0 * math.pi)


def kappa_from_second_harmonic(kappa_2: float) -> float:
    """Fundamental coefficient from the tracked second harmonic.

    Half-angle identity: cos(w) = sqrt((cos(2w) + 1)/2), valid while the
    fundamental sits below a quarter of the sampling rate.
    """
    if not -1.0 <= kappa_2 <= 1.0:
        raise ValueError(f"kappa_2 must lie in [-1, 1], got {kappa_2}")
    return math.sqrt((kappa_2 + 1.0) / 2.0)
