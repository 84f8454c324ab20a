"""Canceller settings and their mapping to per-sample recursion constants.

Users configure the canceller with bandwidths (Hz) and settling times
(seconds), which are independent of the sampling rate.  Internally the
recursions run on pole radii and forgetting factors; the conversion
formulas live here.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict

# 95%-settling convention: a forgetting factor lambda reaches 95% of its
# asymptotic (1/(1-lambda)) weight after t seconds when
# lambda**(t*fs + 1) = 0.05.
_LN_SETTLE = math.log(0.05)

# Recommended operating ranges.  Values outside only warn; hard validity is
# checked separately.
RECOMMENDED_RANGES = {
    "b0": (10.0, 50.0),
    "b_inf": (0.01, 0.1),
    "b_st": (0.5, 10.0),
    "p0": (0.01, 0.5),
    "p_inf": (1.0, 5.0),
    "p_st": (1.0, 10.0),
    "w": (0.5, 5.0),
}


@dataclass
class AltParams:
    """Alternative (rate-independent) canceller settings.

    Bandwidths in Hz and settling times in seconds instead of raw pole
    radii and forgetting factors, so the same values work across sampling
    rates.

    Parameters
    ----------
    fs : float
        Sampling rate in Hz.
    b0, b_inf : float
        Initial and steady-state notch bandwidth of the frequency tracker,
        Hz.  Wide at start for fast acquisition, narrow at steady state for
        low jitter.
    b_st : float
        Settling time of the bandwidth schedule, seconds.
    p0, p_inf : float
        Initial and steady-state 95%-settling time of the frequency
        tracker's correlation memory, seconds.
    p_st : float
        Settling time of the memory schedule, seconds.
    w : float
        95%-settling time of the per-harmonic amplitude estimators, seconds.
    m_prime : int
        Requested number of harmonics to cancel (clamped below Nyquist at
        run time).
    band_lo, band_hi : float
        Edges of the tracker's input bandpass, Hz.
    gamma_cutoff : float
        Cutoff of the one-pole smoother applied to the tracked reflection
        coefficient, Hz.
    dc_block : bool
        Prepend a DC-blocking filter to the whole pipeline.
    second_harmonic_mode : bool
        Track the second harmonic instead of the fundamental (for setups
        where the fundamental is too weak or out of band); experimental.
    """

    fs: float
    b0: float = 50.0
    b_inf: float = 0.1
    b_st: float = 1.0
    p0: float = 0.1
    p_inf: float = 2.0
    p_st: float = 1.0
    w: float = 2.0
    m_prime: int = 3
    band_lo: float = 40.0
    band_hi: float = 70.0
    gamma_cutoff: float = 90.0
    dc_block: bool = False
    second_harmonic_mode: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


# Descriptive alias.
CancellerParams = AltParams


@dataclass(frozen=True)
class ActualParams:
    """Recursion constants consumed by the per-sample engine."""

    fs: float
    alpha_0: float
    alpha_inf: float
    alpha_st: float
    lambda_0: float
    lambda_inf: float
    lambda_st: float
    lambda_a: float
    gamma: float
    m_prime: int

    def as_dict(self) -> dict:
        return asdict(self)


def settling_to_lambda(t: float, fs: float) -> float:
    """Forgetting factor with a 95% settling time of ``t`` seconds.

    Defined by lambda**(t*fs + 1) = 0.05, i.e. the exponentially weighted
    sum reaches 95% of its asymptote after t seconds.
    """
    if not t > 0.0:
        raise ValueError(f"settling time must be positive, got {t}")
    return math.exp(_LN_SETTLE / (t * fs + 1.0))


def bandwidth_to_pole(b: float, fs: float) -> float:
    """Pole radius giving a -3 dB bandwidth of ``b`` Hz at rate ``fs``.

    Tangent (bilinear) mapping; returns 0 at b = fs/4 and goes negative
    beyond, so callers must range-check the result.
    """
    if not 0.0 < b < fs / 2.0:
        raise ValueError(f"bandwidth must lie in (0, fs/2), got {b} at fs={fs}")
    t = math.tan(math.pi * b / fs)
    return (1.0 - t) / (1.0 + t)


def gamma_from_cutoff(cutoff: float, fs: float) -> float:
    """Pole of the one-pole smoother on the tracked reflection coefficient.

    Smoothing is disabled (gamma = 0) when the requested cutoff sits at or
    beyond fs/4, where the tangent mapping leaves (0, 1).
    """
    if cutoff <= 0.0:
        raise ValueError(f"smoother cutoff must be positive, got {cutoff}")
    if cutoff >= fs / 4.0:
        return 0.0
    g = bandwidth_to_pole(cutoff, fs)
    return min(max(g, 0.0), 0.999)


def map_params(alt: AltParams) -> ActualParams:
    """Resolve user-facing settings into recursion constants.

    Raises ValueError naming the offending field when a value cannot be
    mapped into its valid range; warns (but proceeds) when a value is legal
    yet outside the recommended operating range.
    """
    if not (math.isfinite(alt.fs) and alt.fs > 0.0):
        raise ValueError(f"fs must be a positive finite number, got {alt.fs}")
    for name in ("b0", "b_inf", "b_st", "p0", "p_inf", "p_st", "w"):
        v = getattr(alt, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
            raise ValueError(f"{name} must be a positive finite number, got {v}")
    if not (isinstance(alt.m_prime, int) and alt.m_prime >= 1):
        raise ValueError(f"m_prime must be a positive integer, got {alt.m_prime}")
    if not (0.0 < alt.band_lo < alt.band_hi < alt.fs / 2.0):
        raise ValueError(
            f"band_lo/band_hi must satisfy 0 < band_lo < band_hi < fs/2, "
            f"got ({alt.band_lo}, {alt.band_hi}) at fs={alt.fs}"
        )

    for name, (lo, hi) in RECOMMENDED_RANGES.items():
        v = getattr(alt, name)
        if not lo <= v <= hi:
            warnings.warn(
                f"{name}={v} is outside the recommended range [{lo}, {hi}]",
                stacklevel=2,
            )

    def _pole(name: str) -> float:
        b = getattr(alt, name)
        if b >= alt.fs / 4.0:
            raise ValueError(
                f"{name}={b} Hz maps to a pole outside (0, 1) at fs={alt.fs}; "
                f"bandwidths must stay below fs/4"
            )
        a = bandwidth_to_pole(b, alt.fs)
        if not 0.0 < a < 1.0:
            raise ValueError(f"{name}={b} maps to pole {a} outside (0, 1)")
        return a

    return ActualParams(
        fs=float(alt.fs),
        alpha_0=_pole("b0"),
        alpha_inf=_pole("b_inf"),
        alpha_st=settling_to_lambda(alt.b_st, alt.fs),
        lambda_0=settling_to_lambda(alt.p0, alt.fs),
        lambda_inf=settling_to_lambda(alt.p_inf, alt.fs),
        lambda_st=settling_to_lambda(alt.p_st, alt.fs),
        lambda_a=settling_to_lambda(alt.w, alt.fs),
        gamma=gamma_from_cutoff(alt.gamma_cutoff, alt.fs),
        m_prime=alt.m_prime,
    )


def clamp_harmonic_count(kappa_f: float, m_requested: int) -> int:
    """Largest harmonic count keeping every k*omega below Nyquist.

    kappa_f is cos of the fundamental's normalized frequency.  At
    kappa_f = 1 the frequency estimate sits at DC and no bound can be
    derived, so the request passes through with a warning.
    """
    if not -1.0 <= kappa_f <= 1.0:
        raise ValueError(f"kappa_f must lie in [-1, 1], got {kappa_f}")
    if m_requested < 1:
        raise ValueError(f"m_requested must be >= 1, got {m_requested}")
    if kappa_f >= 1.0:
        warnings.warn(
            "frequency estimate at DC; harmonic count left unclamped",
            stacklevel=2,
        )
        return m_requested
    m_max = int(math.floor(math.pi / math.acos(kappa_f)))
    return max(1, min(m_requested, m_max))
