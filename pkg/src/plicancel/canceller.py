"""End-to-end streaming canceller.

Per sample: optional DC blocker, bandpass, first difference, lattice
frequency tracker, then a bank of harmonic waveguide oscillators whose
outputs are scaled by per-harmonic least-squares amplitude estimates and
subtracted in cascade from the input sample.  The final cascade error is
the cleaned output, so output = input - (sum of harmonic estimates) by
construction and the output has no latency relative to the input.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._kernel import init_state, kernel_run, kernel_step
from .dspcore import design_bandpass
from .params import ActualParams, AltParams, clamp_harmonic_count, map_params

# Bandpass used when the tracker follows the second harmonic of 50/60 Hz.
SECOND_HARMONIC_BAND = (90.0, 130.0)

# Corner of the optional input DC blocker; well below every supported band.
DC_POLE = 0.995

THREADS_ENV = "PLICANCEL_THREADS"


@dataclass
class Diagnostics:
    """Optional per-sample traces captured during a run.

    freq_hz is the fundamental-frequency estimate; harmonic_amps holds one
    instantaneous amplitude estimate per harmonic per sample (zero while a
    harmonic is disabled by the Nyquist clamp); residual is the cleaned
    output (the cascade error).  All empty when capture was off.
    """

    freq_hz: np.ndarray = field(default_factory=lambda: np.empty(0))
    harmonic_amps: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    residual: np.ndarray = field(default_factory=lambda: np.empty(0))


class Canceller:
    """Single-channel canceller; one instance owns one stream's state.

    Parameters
    ----------
    params : AltParams
        Rate-independent settings; mapped once at construction.

    Attributes
    ----------
    actual : ActualParams
        The mapped recursion constants.
    n_processed : int
        Samples consumed since construction or reset().
    """

    def __init__(self, params: AltParams):
        self.params = params
        self.actual: ActualParams = map_params(params)
        if params.second_harmonic_mode:
            band = SECOND_HARMONIC_BAND
        else:
            band = (params.band_lo, params.band_hi)
        self.sos = design_bandpass(params.fs, band[0], band[1])
        self.state = init_state(params.m_prime, self.actual.alpha_0, self.actual.lambda_0)
        self._amps = np.zeros(params.m_prime)
        self._kappa_1 = 0.0
        self.n_processed = 0

    def reset(self) -> None:
        """Forget all adaptation; next sample starts a fresh stream."""
        self.state = init_state(
            self.params.m_prime, self.actual.alpha_0, self.actual.lambda_0
        )
        self._amps[:] = 0.0
        self._kappa_1 = 0.0
        self.n_processed = 0

    def process_sample(self, x: float) -> float:
        """Consume one input sample, return the cleaned sample.

        Rejects non-finite input without touching state.
        """
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"non-finite input sample at index {self.n_processed}: {x}")
        e, k1, _ = kernel_step(
            self.state,
            self.sos,
            self._amps,
            x,
            self.actual.alpha_inf,
            self.actual.alpha_st,
            self.actual.lambda_inf,
            self.actual.lambda_st,
            self.actual.lambda_a,
            self.actual.gamma,
            self.params.m_prime,
            self.params.second_harmonic_mode,
            self.params.dc_block,
            DC_POLE,
        )
        self._kappa_1 = k1
        self.n_processed += 1
        return e

    @property
    def freq_hz(self) -> float:
        """Current fundamental-frequency estimate in Hz."""
        k = min(1.0, max(-1.0, self._kappa_1))
        return self.params.fs * math.acos(k) / (2.0 * math.pi)

    @property
    def harmonic_amplitudes(self) -> np.ndarray:
        """Instantaneous per-harmonic amplitude estimates (copy)."""
        return self._amps.copy()

    @property
    def harmonics_active(self) -> int:
        """Harmonic count currently allowed by the Nyquist clamp."""
        return clamp_harmonic_count(
            min(1.0, max(-1.0, self._kappa_1)), self.params.m_prime
        )

    def process(self, x: np.ndarray, capture: bool = False):
        """Process a 1-D block of samples, preserving streaming state.

        Returns (cleaned, Diagnostics); diagnostics are empty unless
        capture is set.  Successive calls continue the same stream.
        """
        x = np.ascontiguousarray(x, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError(f"expected a 1-D array, got shape {x.shape}")
        if not np.isfinite(x).all():
            bad = int(np.flatnonzero(~np.isfinite(x))[0])
            raise ValueError(
                f"non-finite input sample at index {self.n_processed + bad}"
            )
        n = x.size
        out = np.empty(n)
        kappa_trace = np.empty(n)
        m = self.params.m_prime
        amps_trace = np.empty((n if capture else 0, m))
        kernel_run(
            x,
            self.state,
            self.sos,
            out,
            kappa_trace,
            amps_trace,
            self.actual.alpha_inf,
            self.actual.alpha_st,
            self.actual.lambda_inf,
            self.actual.lambda_st,
            self.actual.lambda_a,
            self.actual.gamma,
            m,
            self.params.second_harmonic_mode,
            self.params.dc_block,
            DC_POLE,
            capture,
        )
        if n:
            self._kappa_1 = float(kappa_trace[-1])
            if capture:
                self._amps[:] = amps_trace[-1]
        self.n_processed += n
        if capture:
            freq = self.params.fs * np.arccos(np.clip(kappa_trace, -1.0, 1.0)) / (2.0 * np.pi)
            diag = Diagnostics(freq_hz=freq, harmonic_amps=amps_trace, residual=out.copy())
        else:
            diag = Diagnostics()
        return out, diag


def _process_channel(args):
    params, x, capture = args
    return Canceller(params).process(x, capture=capture)


def process_stream(params: AltParams, samples, capture: bool = False):
    """Run the canceller over a whole (possibly multi-channel) signal.

    samples is a Signal (data + fs); its rate must match params.fs.
    Channels are independent: each gets a fresh canceller, and they may
    run on separate threads (count from the PLICANCEL_THREADS environment
    variable, default one thread per channel up to the CPU count).
    Returns (Signal, list of per-channel Diagnostics).
    """
    from .io import Signal

    if not math.isclose(samples.fs, params.fs, rel_tol=1e-12):
        raise ValueError(
            f"signal rate {samples.fs} Hz does not match params.fs {params.fs} Hz"
        )
    data = samples.data
    if data.ndim == 1:
        chans = [data]
    else:
        chans = [np.ascontiguousarray(data[:, c]) for c in range(data.shape[1])]

    n_threads = len(chans)
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            n_threads = max(1, int(env))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}")
    n_threads = min(n_threads, len(chans), os.cpu_count() or 1)

    jobs = [(params, ch, capture) for ch in chans]
    if n_threads > 1 and len(chans) > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(_process_channel, jobs))
    else:
        results = [_process_channel(j) for j in jobs]

    outs = [r[0] for r in results]
    diags = [r[1] for r in results]
    if data.ndim == 1:
        out_data = outs[0]
    else:
        out_data = np.stack(outs, axis=1)
    return Signal(data=out_data, fs=samples.fs), diags
