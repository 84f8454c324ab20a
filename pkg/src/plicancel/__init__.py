"""Streaming canceller for power-line interference in biosignal recordings.

Tracks the interference fundamental with a single-coefficient adaptive
notch filter, synthesizes each harmonic with a digital waveguide
oscillator, fits per-harmonic amplitudes by diagonal recursive least
squares, and subtracts the reconstruction from the input with zero
latency.  No reference electrode or notch at a fixed line frequency is
needed; tracking follows drifts and steps of the actual line frequency.
"""

from .canceller import Canceller, Diagnostics, process_stream
from .estimator import PowerLineCanceller
from .experiments import ScenarioConfig, ScenarioResult, build_scenario, run_scenario
from .fixedpoint import FixedConfig, FpCanceller, QFormat, fp_vs_float_report, quantize
from .io import Signal, read_signal, write_signal
from .metrics import (
    convergence_time_ms,
    mse_curve,
    snr_out,
    steady_skip_s,
    welch_psd,
    windowed_snr,
)
from .params import (
    ActualParams,
    AltParams,
    bandwidth_to_pole,
    clamp_harmonic_count,
    gamma_from_cutoff,
    map_params,
    settling_to_lambda,
)
from .siggen import (
    InterferenceSpec,
    gen_interference,
    gen_pink_noise,
    measure_snr_db,
    mix_at_snr,
)
from .baseline import baseline_notch
from .rls import bound_sweep, correlation_ratio_C

__version__ = "0.1.0"

__all__ = [
    "ActualParams",
    "AltParams",
    "Canceller",
    "Diagnostics",
    "FixedConfig",
    "FpCanceller",
    "InterferenceSpec",
    "PowerLineCanceller",
    "QFormat",
    "ScenarioConfig",
    "ScenarioResult",
    "Signal",
    "bandwidth_to_pole",
    "baseline_notch",
    "bound_sweep",
    "build_scenario",
    "clamp_harmonic_count",
    "convergence_time_ms",
    "correlation_ratio_C",
    "fp_vs_float_report",
    "gamma_from_cutoff",
    "gen_interference",
    "gen_pink_noise",
    "map_params",
    "measure_snr_db",
    "mix_at_snr",
    "mse_curve",
    "process_stream",
    "quantize",
    "read_signal",
    "run_scenario",
    "settling_to_lambda",
    "snr_out",
    "steady_skip_s",
    "welch_psd",
    "windowed_snr",
    "write_signal",
]
