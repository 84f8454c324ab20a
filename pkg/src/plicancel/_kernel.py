"""Compiled per-sample engine shared by the streaming and batch paths.

The whole pipeline state lives in one flat float64 vector so a single
njit step function can advance it; the batch runner just calls that step
in a loop, which guarantees streaming and batch outputs are identical
bit for bit.

State vector layout (m = requested harmonic count):
  [0]  DC blocker previous input
  [1]  DC blocker previous output
  [2 + 2s], [3 + 2s]  bandpass section s delay registers (s = 0, 1)
  [6]  differentiator previous input
  [7]  tracker f(n-1)        [8]  tracker f(n-2)
  [9]  tracker c             [10] tracker d
  [11] last valid kappa_t    [12] kappa_f
  [13] alpha_f (scheduled)   [14] lambda_f (scheduled)
  [15 + 6k .. 20 + 6k]  harmonic k: u, u', r1, r4, b_hat, c_hat
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

HEADER = 15
PER_HARMONIC = 6

# c/d initialization of the tracker correlations.
EPS_INIT = 1e-6
# r/d denominators below this hold the previous estimate instead of dividing.
DIV_GUARD = 1e-30


def state_size(m_prime: int) -> int:
    return HEADER + PER_HARMONIC * m_prime


def init_state(m_prime: int, alpha_0: float, lambda_0: float) -> np.ndarray:
    """Fresh engine state: zero filters, eps correlations, u' = 1."""
    st = np.zeros(state_size(m_prime))
    st[9] = EPS_INIT
    st[10] = EPS_INIT
    st[13] = alpha_0
    st[14] = lambda_0
    for k in range(m_prime):
        st[HEADER + PER_HARMONIC * k + 1] = 1.0
    return st


@njit(cache=True, nogil=True)
def kernel_step(
    state,
    sos,
    amps,
    x,
    alpha_inf,
    alpha_st,
    lambda_inf,
    lambda_st,
    lambda_a,
    gamma,
    m_req,
    second_harm,
    use_dc,
    dc_pole,
):
    """Advance every stage one sample; returns (s_hat, kappa_1, m_eff).

    amps receives the per-harmonic instantaneous amplitude estimates
    (0 for harmonics disabled by the Nyquist clamp).
    """
    if use_dc:
        x0 = x - state[0] + dc_pole * state[1]
        state[0] = x
        state[1] = x0
    else:
        x0 = x

    # bandpass, transposed direct form II per section
    y = x0
    for s in range(sos.shape[0]):
        o = sos[s, 0] * y + state[2 + 2 * s]
        state[2 + 2 * s] = sos[s, 1] * y - sos[s, 4] * o + state[3 + 2 * s]
        state[3 + 2 * s] = sos[s, 2] * y - sos[s, 5] * o
        y = o

    # first difference
    x_d = y - state[6]
    state[6] = y

    # lattice tracker: all-pole update, correlations, clipped ratio,
    # smoothing, then the bandwidth/memory schedules
    f1 = state[7]
    f2 = state[8]
    f = x_d + state[12] * (1.0 + state[13]) * f1 - state[13] * f2
    state[9] = state[14] * state[9] + f1 * (f + f2)
    state[10] = state[14] * state[10] + 2.0 * f1 * f1
    if state[10] >= DIV_GUARD:
        kt = state[9] / state[10]
        if kt > 1.0:
            kt = 1.0
        elif kt < -1.0:
            kt = -1.0
        state[11] = kt
    kf = gamma * state[12] + (1.0 - gamma) * state[11]
    state[12] = kf
    state[13] = alpha_st * state[13] + (1.0 - alpha_st) * alpha_inf
    state[14] = lambda_st * state[14] + (1.0 - lambda_st) * lambda_inf
    state[8] = f1
    state[7] = f

    # fundamental coefficient (tracker may sit on the second harmonic)
    if second_harm:
        k1 = math.sqrt((kf + 1.0) * 0.5)
    else:
        k1 = kf

    # keep every synthesized harmonic below Nyquist
    if k1 >= 1.0:
        m_eff = m_req
    else:
        m_eff = int(math.floor(math.pi / math.acos(max(-1.0, k1))))
        if m_eff < 1:
            m_eff = 1
        if m_eff > m_req:
            m_eff = m_req

    # cascade: subtract each harmonic's estimate from the running error
    e = x0
    km1 = 1.0
    kcur = k1
    for k in range(m_req):
        base = HEADER + PER_HARMONIC * k
        if k < m_eff:
            u = state[base]
            up = state[base + 1]
            s1 = kcur * (u + up)
            s2 = u
            un = s1 - up
            upn = s1 + s2
            if abs(kcur + 1.0) < 1e-12:
                g = 1.0
            else:
                g = 1.5 - (un * un - ((kcur - 1.0) / (kcur + 1.0)) * upn * upn)
                if g < 0.0:
                    g = 1.0
            un = un * g
            upn = upn * g
            state[base] = un
            state[base + 1] = upn
            h = state[base + 4] * un + state[base + 5] * upn
            e = e - h
            state[base + 2] = lambda_a * state[base + 2] + un * un
            state[base + 3] = lambda_a * state[base + 3] + upn * upn
            if state[base + 2] >= DIV_GUARD:
                state[base + 4] = state[base + 4] + un * e / state[base + 2]
            if state[base + 3] >= DIV_GUARD:
                state[base + 5] = state[base + 5] + upn * e / state[base + 3]
            # instantaneous amplitude: project (b, c) onto the oscillator's
            # unequal steady output amplitudes
            c1den = 1.0 + kcur
            if c1den > 1e-9:
                c1 = (1.0 - kcur) / c1den
            else:
                c1 = 1e9
            if c1 < 1e-9:
                c1 = 1e-9
            v2 = un * un + c1 * upn * upn
            vp2 = upn * upn + un * un / c1
            amps[k] = math.sqrt(
                state[base + 4] * state[base + 4] * v2
                + state[base + 5] * state[base + 5] * vp2
            )
        else:
            amps[k] = 0.0
        knext = 2.0 * k1 * kcur - km1
        if knext > 1.0:
            knext = 1.0
        elif knext < -1.0:
            knext = -1.0
        km1 = kcur
        kcur = knext
    return e, k1, m_eff


@njit(cache=True, nogil=True)
def kernel_run(
    x,
    state,
    sos,
    out,
    kappa_trace,
    amps_trace,
    alpha_inf,
    alpha_st,
    lambda_inf,
    lambda_st,
    lambda_a,
    gamma,
    m_req,
    second_harm,
    use_dc,
    dc_pole,
    capture,
):
    """Batch loop over kernel_step; fills out and kappa_trace in place."""
    amps = np.empty(m_req)
    for i in range(x.shape[0]):
        e, k1, _ = kernel_step(
            state,
            sos,
            amps,
            x[i],
            alpha_inf,
            alpha_st,
            lambda_inf,
            lambda_st,
            lambda_a,
            gamma,
            m_req,
            second_harm,
            use_dc,
            dc_pole,
        )
        out[i] = e
        kappa_trace[i] = k1
        if capture:
            for k in range(m_req):
                amps_trace[i, k] = amps[k]
