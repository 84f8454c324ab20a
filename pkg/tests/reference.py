"""Pure-Python canceller composed from the module-level pieces.

This builds the whole per-sample pipeline out of SosFilter, FirstDifference,
AnfState, OscState and the RLS state classes, independently of the compiled
engine in plicancel._kernel.  With the diagonal RLS it must agree with the
production Canceller to float round-off; swapping in the full 2x2 RLS turns
it into the oracle for the diagonal approximation.
"""
from __future__ import annotations

import math

import numpy as np

from plicancel.canceller import SECOND_HARMONIC_BAND
from plicancel.dspcore import DcBlocker, FirstDifference, SosFilter, design_bandpass
from plicancel.freqest import anf_init, kappa_from_second_harmonic
from plicancel.oscillator import OscState
from plicancel.params import AltParams, map_params
from plicancel.rls import FullRlsState, RlsState


class ComposedCanceller:
    """Per-sample cascade assembled from the public module classes."""

    def __init__(self, params: AltParams, full_rls: bool = False):
        self.params = params
        self.actual = map_params(params)
        if params.second_harmonic_mode:
            lo, hi = SECOND_HARMONIC_BAND
        else:
            lo, hi = params.band_lo, params.band_hi
        self.bp = SosFilter(design_bandpass(params.fs, lo, hi))
        self.diff = FirstDifference()
        self.dc = DcBlocker() if params.dc_block else None
        self.anf = anf_init(self.actual)
        m = params.m_prime
        self.osc = [OscState() for _ in range(m)]
        if full_rls:
            self.rls = [FullRlsState(self.actual.lambda_a) for _ in range(m)]
        else:
            self.rls = [RlsState(self.actual.lambda_a) for _ in range(m)]

    def step(self, x: float) -> float:
        x0 = self.dc.step(x) if self.dc is not None else x
        x_d = self.diff.step(self.bp.step(x0))
        kf = self.anf.step(x_d)
        if self.params.second_harmonic_mode:
            k1 = kappa_from_second_harmonic(kf)
        else:
            k1 = kf
        m_req = self.params.m_prime
        if k1 >= 1.0:
            m_eff = m_req
        else:
            m_eff = max(1, min(m_req, int(math.floor(math.pi / math.acos(max(-1.0, k1))))))
        e = x0
        km1, kcur = 1.0, k1
        self.last_h = [0.0] * m_req
        for k in range(m_req):
            if k < m_eff:
                u, up = self.osc[k].step(kcur)
                h, e = self.rls[k].step(u, up, e)
                self.last_h[k] = h
            knext = 2.0 * k1 * kcur - km1
            knext = min(1.0, max(-1.0, knext))
            km1, kcur = kcur, knext
        return e

    def process(self, x) -> np.ndarray:
        return np.array([self.step(float(v)) for v in x])
