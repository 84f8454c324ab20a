"""Reusable synthetic evaluation scenarios.

One scenario = seeded 1/f^alpha carrier + harmonic interference mixed at
a requested SNR, run through the canceller, scored against the known
clean carrier.  The CLI's simulate/bench commands and the acceptance
tests share this code so they measure exactly the same thing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .canceller import Canceller
from .metrics import convergence_time_ms, snr_out, steady_skip_s
from .params import AltParams
from .siggen import InterferenceSpec, gen_interference, gen_pink_noise, mix_at_snr


@dataclass
class ScenarioConfig:
    """Synthetic run description.

    f0 may be a scalar (stationary) or (time_s, value) breakpoints for
    sweeps/steps; amplitudes likewise, one per harmonic (all-ones when
    omitted).  Harmonic phases are drawn uniformly per seed.
    """

    fs: float = 1000.0
    duration_s: float = 60.0
    f0: object = 60.0
    harmonics: int = 3
    amplitudes: tuple | None = None
    snr_in_db: float = 0.0
    alpha: float = 2.0
    seed: int = 0


@dataclass
class ScenarioResult:
    clean: np.ndarray
    mixed: np.ndarray
    output: np.ndarray
    freq_trace_hz: np.ndarray
    harmonic_amps: np.ndarray
    fs: float
    skip_s: float
    snr_in_db: float
    snr_out_db: float
    convergence_ms: float
    params_resolved: dict


def build_scenario(cfg: ScenarioConfig):
    """Generate (clean, interference_scaled, mixed) for a config."""
    n = int(round(cfg.fs * cfg.duration_s))
    rng = np.random.default_rng(cfg.seed)
    clean = gen_pink_noise(n, cfg.alpha, rng)
    amplitudes = cfg.amplitudes
    if amplitudes is None:
        amplitudes = (1.0,) * cfg.harmonics
    phases = tuple(rng.uniform(0.0, 2.0 * math.pi, len(amplitudes)))
    spec = InterferenceSpec(f0=cfg.f0, amplitudes=tuple(amplitudes), phases=phases)
    interference = gen_interference(spec, n, cfg.fs)
    mixed, scaled = mix_at_snr(clean, interference, cfg.snr_in_db)
    return clean, scaled, mixed


def _f0_initial(f0) -> float:
    if np.isscalar(f0):
        return float(f0)
    return float(np.asarray(f0, dtype=np.float64)[0, 1])


def run_scenario(
    cfg: ScenarioConfig,
    params: AltParams | None = None,
    capture: bool = True,
) -> ScenarioResult:
    """Run one scenario through the canceller and score it.

    params defaults to the recommended mid-range settings at cfg.fs with
    the scenario's harmonic count.
    """
    if params is None:
        params = AltParams(fs=cfg.fs, m_prime=cfg.harmonics)
    if not math.isclose(params.fs, cfg.fs, rel_tol=1e-12):
        raise ValueError(f"params.fs {params.fs} does not match scenario fs {cfg.fs}")
    clean, _, mixed = build_scenario(cfg)
    canc = Canceller(params)
    output, diag = canc.process(mixed, capture=capture)
    skip = steady_skip_s(params.p_st, params.w)
    snr = snr_out(clean, output, cfg.fs, skip)
    if capture:
        conv = convergence_time_ms(diag.freq_hz, _f0_initial(cfg.f0), cfg.fs)
        freq_trace = diag.freq_hz
        amps = diag.harmonic_amps
    else:
        conv = math.inf
        freq_trace = np.empty(0)
        amps = np.empty((0, params.m_prime))
    return ScenarioResult(
        clean=clean,
        mixed=mixed,
        output=output,
        freq_trace_hz=freq_trace,
        harmonic_amps=amps,
        fs=cfg.fs,
        skip_s=skip,
        snr_in_db=cfg.snr_in_db,
        snr_out_db=snr,
        convergence_ms=conv,
        params_resolved=params_to_dict(params),
    )


def params_to_dict(params: AltParams) -> dict:
    """Resolved parameter snapshot for reports: settings plus constants."""
    from .params import map_params

    d = dict(params.as_dict())
    d.update({f"mapped_{k}": v for k, v in map_params(params).as_dict().items()})
    return d
