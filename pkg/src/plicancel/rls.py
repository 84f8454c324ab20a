"""Per-harmonic amplitude/phase estimation by recursive least squares.

The production path approximates the 2x2 input correlation matrix of each
harmonic's (u, u') regressor pair as diagonal, reducing the update to two
scalar divisions.  A full-matrix variant is kept as a validation oracle,
and correlation_ratio_C computes the closed-form bound showing the
off-diagonal terms are negligible for the supported parameter range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import settling_to_lambda

# Correlation denominators below this are treated as "no excitation yet";
# the corresponding coefficient update is skipped for the sample.
DIV_GUARD = 1e-30
# Initial diagonal loading of the full-RLS correlation matrix.
FULL_RLS_EPS = 1e-6


@dataclass
class RlsState:
    """Diagonal-RLS state for one harmonic; advance with step() or rls_step.

    r1 and r4 are the forgetting-weighted energies of u and u'; b_hat and
    c_hat the in-phase/quadrature amplitude coefficients.  All start at
    zero, so the division guard covers the first samples.
    """

    lambda_a: float
    r1: float = 0.0
    r4: float = 0.0
    b_hat: float = 0.0
    c_hat: float = 0.0

    def step(self, u: float, u_prime: float, e_in: float) -> tuple:
        # estimate with pre-update coefficients, subtract, then adapt
        h_hat = self.b_hat * u + self.c_hat * u_prime
        e_out = e_in - h_hat
        self.r1 = self.lambda_a * self.r1 + u * u
        self.r4 = self.lambda_a * self.r4 + u_prime * u_prime
        if self.r1 >= DIV_GUARD:
            self.b_hat += u * e_out / self.r1
        if self.r4 >= DIV_GUARD:
            self.c_hat += u_prime * e_out / self.r4
        return h_hat, e_out


def rls_step(state: RlsState, u: float, u_prime: float, e_in: float) -> tuple:
    """One diagonal-RLS update; returns (h_hat, e_out)."""
    return state.step(u, u_prime, e_in)


@dataclass
class FullRlsState:
    """Full 2x2 RLS used only as a test oracle for the diagonal variant."""

    lambda_a: float
    R: np.ndarray = field(default_factory=lambda: FULL_RLS_EPS * np.eye(2))
    W: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def step(self, u: float, u_prime: float, e_in: float) -> tuple:
        reg = np.array([u, u_prime])
        h_hat = float(self.W @ reg)
        e_out = e_in - h_hat
        self.R = self.lambda_a * self.R + np.outer(reg, reg)
        det = self.R[0, 0] * self.R[1, 1] - self.R[0, 1] * self.R[1, 0]
        if abs(det) >= DIV_GUARD:
            r_inv = (
                np.array([[self.R[1, 1], -self.R[0, 1]], [-self.R[1, 0], self.R[0, 0]]])
                / det
            )
            self.W = self.W + r_inv @ reg * e_out
        return h_hat, e_out


def full_rls_step(state: FullRlsState, u: float, u_prime: float, e_in: float) -> tuple:
    """One full-matrix RLS update; returns (h_hat, e_out)."""
    return state.step(u, u_prime, e_in)


def correlation_ratio_C(w: float, fs: float, omega_f: float, k: int, n: int | None = None) -> float:
    """Bound C = A*B on off-diagonal vs diagonal correlation energy.

    A is the closed-form magnitude ratio of the forgetting-weighted sum of
    the cross term at 2*k*omega_f to the all-ones sum; B accounts for the
    unequal oscillator output amplitudes.  C << 1 justifies dropping the
    off-diagonal correlation entries.

    Parameters
    ----------
    w : float
        Amplitude-estimator settling time in seconds (sets lambda_a).
    fs : float
        Sampling rate in Hz.
    omega_f : float
        Fundamental frequency in rad/sample.
    k : int
        Harmonic index; k*omega_f must stay inside (0, pi).
    n : int, optional
        Number of accumulated samples; defaults to 10*fs (steady state).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    k_omega = k * omega_f
    if not 0.0 < k_omega < math.pi:
        raise ValueError(
            f"k*omega_f must lie strictly inside (0, pi), got {k_omega} "
            f"(k={k}, omega_f={omega_f})"
        )
    if n is None:
        n = int(10 * fs)
    lam = settling_to_lambda(w, fs)

    theta = 2.0 * k_omega
    lam_n1 = lam ** (n + 1)
    num = 2.0 * (1.0 + lam_n1 * lam_n1 - 2.0 * lam_n1 * math.cos(theta * (n + 1)))
    den = 1.0 + lam * lam - 2.0 * lam * math.cos(theta)
    cal_a = math.sqrt(num / den) / ((1.0 - lam_n1) / (1.0 - lam))

    ratio = math.sqrt((1.0 + math.cos(k_omega)) / (1.0 - math.cos(k_omega)))
    cal_b = max(ratio, 1.0 / ratio)
    return cal_a * cal_b


def bound_sweep(
    fs_values=(100.0, 250.0, 1000.0, 5000.0, 40000.0),
    w_range=(0.5, 5.0),
    w_points: int = 19,
    omega_f: float = 0.6 * math.pi,
    m_max: int = 16,
) -> dict:
    """Evaluate the correlation bound over rates and settling times.

    The fundamental is specified in rad/sample so the same geometry is
    evaluated at every rate; harmonics are enumerated while k*omega_f < pi.
    Returns {fs: max C over the (W, k) grid}.
    """
    if not 0.0 < omega_f < math.pi:
        raise ValueError(f"omega_f must lie in (0, pi), got {omega_f}")
    w_lo, w_hi = w_range
    if not 0.0 < w_lo <= w_hi:
        raise ValueError(f"w_range must be positive and ordered, got {w_range}")
    ws = np.linspace(w_lo, w_hi, w_points)
    ks = [k for k in range(1, m_max + 1) if k * omega_f < math.pi]
    out = {}
    for fs in fs_values:
        worst = 0.0
        for w in ws:
            for k in ks:
                c = correlation_ratio_C(float(w), float(fs), omega_f, k)
                if c > worst:
                    worst = c
        out[float(fs)] = worst
    return out
