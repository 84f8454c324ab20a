"""Command-line interface.

Subcommands: cancel (clean a recording file), simulate (synthetic
end-to-end run with metrics), bench (parameter-grid sweeps), and
validate-bound (closed-form correlation-bound sweep).  Exit codes:
0 success, 1 runtime/validation failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .canceller import process_stream
from .experiments import ScenarioConfig, params_to_dict, run_scenario
from .fixedpoint import FixedConfig, FpCanceller
from .io import Signal, read_signal, write_signal
from .metrics import convergence_time_ms
from .params import AltParams
from .rls import bound_sweep

BOUND_FS_DEFAULT = (100.0, 250.0, 1000.0, 5000.0, 40000.0)
BOUND_LIMIT = 0.1

_PARAM_FIELDS = {f.name: f.type for f in dataclasses.fields(AltParams)}
_BOOL_FIELDS = {"dc_block", "second_harmonic_mode"}
_INT_FIELDS = {"m_prime"}


class UsageError(Exception):
    pass


def _parse_config_value(key: str, raw: str):
    if key in _BOOL_FIELDS:
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"config key {key!r}: expected a boolean, got {raw!r}")
    try:
        if key in _INT_FIELDS:
            return int(raw)
        return float(raw)
    except ValueError:
        raise UsageError(f"config key {key!r}: expected a number, got {raw!r}") from None


def parse_config_file(path: str) -> dict:
    """Flat `key = value` lines with # comments; keys are AltParams fields."""
    out = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(
                    f"{path}:{lineno}: expected `key = value`, got {line!r}"
                )
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _PARAM_FIELDS:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = _parse_config_value(key, raw)
    return out


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key = value parameter file")
    sp.add_argument("--fs", type=float, help="sampling rate, Hz")
    sp.add_argument("--b0", type=float, help="initial tracker bandwidth, Hz")
    sp.add_argument("--b-inf", type=float, dest="b_inf", help="steady tracker bandwidth, Hz")
    sp.add_argument("--b-st", type=float, dest="b_st", help="bandwidth settling time, s")
    sp.add_argument("--p0", type=float, help="initial tracker memory, s")
    sp.add_argument("--p-inf", type=float, dest="p_inf", help="steady tracker memory, s")
    sp.add_argument("--p-st", type=float, dest="p_st", help="memory settling time, s")
    sp.add_argument("--w", type=float, help="amplitude settling time, s")
    sp.add_argument("--m-prime", type=int, dest="m_prime", help="harmonics to cancel")
    sp.add_argument("--band-lo", type=float, dest="band_lo", help="bandpass low edge, Hz")
    sp.add_argument("--band-hi", type=float, dest="band_hi", help="bandpass high edge, Hz")
    sp.add_argument("--gamma-cutoff", type=float, dest="gamma_cutoff",
                    help="tracker-output smoother cutoff, Hz")
    sp.add_argument("--dc-block", action=argparse.BooleanOptionalAction, default=None,
                    help="prepend a DC blocker")
    sp.add_argument("--second-harmonic-mode", action=argparse.BooleanOptionalAction,
                    default=None, dest="second_harmonic_mode",
                    help="track the second harmonic instead of the fundamental")


def resolve_param_kwargs(args) -> dict:
    """Merge config file under command-line flags (flag wins per key)."""
    kwargs = {}
    if getattr(args, "config", None):
        kwargs.update(parse_config_file(args.config))
    for name in _PARAM_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            kwargs[name] = v
    return kwargs


def resolve_params(args, default_fs: float | None = None) -> AltParams:
    """Resolved settings with precedence flag > config file > default."""
    kwargs = resolve_param_kwargs(args)
    if "fs" not in kwargs:
        if default_fs is None:
            raise UsageError("sampling rate required: pass --fs or a config with fs")
        kwargs["fs"] = default_fs
    try:
        return AltParams(**kwargs)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _metrics_dict(snr_in, snr_out_db, convergence_ms, freq_trace, harmonic_amps, params) -> dict:
    def _num(v):
        if v is None or (isinstance(v, float) and not math.isfinite(v)):
            return None
        return float(v)

    return {
        "snr_in_db": _num(snr_in),
        "snr_out_db": _num(snr_out_db),
        "convergence_ms": _num(convergence_ms),
        "freq_trace": [float(v) for v in np.asarray(freq_trace).ravel()],
        "harmonic_amps": [
            [float(v) for v in row] for row in np.atleast_2d(np.asarray(harmonic_amps))
        ] if np.asarray(harmonic_amps).size else [],
        "params_resolved": params,
    }


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=None, separators=(",", ":"), allow_nan=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_cancel(args) -> int:
    kwargs = resolve_param_kwargs(args)
    fs_given = kwargs.get("fs")

    sig = read_signal(args.input, fmt=args.format, fs=fs_given)
    if fs_given is not None and not math.isclose(sig.fs, fs_given, rel_tol=1e-9):
        raise UsageError(f"--fs {fs_given} conflicts with the file's rate {sig.fs} Hz")
    kwargs["fs"] = sig.fs
    try:
        params = AltParams(**kwargs)
    except TypeError as exc:
        raise UsageError(str(exc)) from None

    capture = args.metrics is not None
    if args.fixed_point:
        data = sig.data if sig.data.ndim == 2 else sig.data[:, None]
        outs = []
        ktraces = []
        for c in range(data.shape[1]):
            fp = FpCanceller(params, FixedConfig(fs=params.fs, m_prime=params.m_prime))
            out_c, ktrace = fp.process(np.ascontiguousarray(data[:, c]))
            outs.append(out_c)
            ktraces.append(ktrace)
        out_data = outs[0] if sig.data.ndim == 1 else np.stack(outs, axis=1)
        cleaned = Signal(data=out_data, fs=sig.fs)
        freq = params.fs * np.arccos(np.clip(ktraces[0], -1.0, 1.0)) / (2.0 * np.pi)
        amps = np.empty((0, params.m_prime))
    else:
        cleaned, diags = process_stream(params, sig, capture=capture)
        freq = diags[0].freq_hz if capture else np.empty(0)
        amps = diags[0].harmonic_amps if capture else np.empty((0, params.m_prime))

    write_signal(args.output, cleaned, fmt=args.format)
    if capture:
        payload = _metrics_dict(None, None, None, freq, amps, params_to_dict(params))
        _write_json(payload, args.metrics)
    return 0


def _cmd_simulate(args) -> int:
    params = resolve_params(args, default_fs=1000.0)
    if args.m_prime is None and params.m_prime != args.harmonics:
        params = dataclasses.replace(params, m_prime=args.harmonics)
    cfg = ScenarioConfig(
        fs=params.fs,
        duration_s=args.duration,
        f0=args.f0,
        harmonics=args.harmonics,
        snr_in_db=args.snr_in,
        alpha=args.alpha,
        seed=args.seed,
    )

    if args.fixed_point:
        from .fixedpoint import fp_vs_float_report

        rep = fp_vs_float_report(cfg, params=params)
        freq = cfg.fs * np.arccos(np.clip(rep["kappa_fixed"], -1.0, 1.0)) / (2.0 * np.pi)
        conv = convergence_time_ms(freq, cfg.f0 if np.isscalar(cfg.f0) else 0.0, cfg.fs)
        payload = _metrics_dict(
            cfg.snr_in_db,
            rep["snr_fixed_db"],
            conv,
            freq,
            np.empty((0, params.m_prime)),
            params_to_dict(params),
        )
    else:
        res = run_scenario(cfg, params=params, capture=True)
        payload = _metrics_dict(
            res.snr_in_db,
            res.snr_out_db,
            res.convergence_ms,
            res.freq_trace_hz,
            res.harmonic_amps,
            res.params_resolved,
        )
        if args.out_clean:
            write_signal(args.out_clean, Signal(res.clean, cfg.fs))
        if args.out_mixed:
            write_signal(args.out_mixed, Signal(res.mixed, cfg.fs))
        if args.out_cleaned:
            write_signal(args.out_cleaned, Signal(res.output, cfg.fs))
    _write_json(payload, args.metrics)
    return 0


def _cmd_bench(args) -> int:
    base = resolve_params(args, default_fs=1000.0)
    if args.m_prime is None:
        base = dataclasses.replace(base, m_prime=3)
    fs = base.fs
    rows = [("grid", "value", "seed", "snr_in_db", "snr_out_db", "convergence_ms")]
    if args.grid == "snr":
        values = (-20.0, -10.0, 0.0, 10.0, 20.0)
        for v in values:
            for seed in range(args.seeds):
                cfg = ScenarioConfig(fs=fs, duration_s=args.duration, f0=61.0,
                                     harmonics=3, snr_in_db=v, seed=seed)
                res = run_scenario(cfg, params=base)
                rows.append(("snr", v, seed, v, res.snr_out_db, res.convergence_ms))
    elif args.grid == "freq":
        values = (45.0, 50.0, 55.0, 60.0, 65.0)
        for v in values:
            for seed in range(args.seeds):
                cfg = ScenarioConfig(fs=fs, duration_s=args.duration, f0=v,
                                     harmonics=3, snr_in_db=0.0, seed=seed)
                res = run_scenario(cfg, params=base)
                rows.append(("freq", v, seed, 0.0, res.snr_out_db, res.convergence_ms))
    else:
        values = (0.5, 1.0, 2.0, 5.0)
        for v in values:
            for seed in range(args.seeds):
                cfg = ScenarioConfig(fs=fs, duration_s=args.duration, f0=61.0,
                                     harmonics=3, snr_in_db=0.0, seed=seed)
                res = run_scenario(cfg, params=dataclasses.replace(base, w=v))
                rows.append(("w", v, seed, 0.0, res.snr_out_db, res.convergence_ms))

    lines = []
    for row in rows:
        lines.append(",".join(
            v if isinstance(v, str) else format(float(v), ".6g") for v in row
        ))
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate_bound(args) -> int:
    fs_values = tuple(args.fs) if args.fs else BOUND_FS_DEFAULT
    omega = args.omega_frac * math.pi
    res = bound_sweep(
        fs_values=fs_values,
        w_range=(args.w_min, args.w_max),
        w_points=args.w_points,
        omega_f=omega,
    )
    worst = max(res.values())
    for fs, c in res.items():
        print(f"fs={fs:g} Hz: max C = {c:.6f}")
    print(f"overall max C = {worst:.6f} (limit {BOUND_LIMIT})")
    ordered = [res[fs] for fs in sorted(res)]
    monotone = all(a >= b - 1e-15 for a, b in zip(ordered, ordered[1:]))
    if len(ordered) > 1:
        print(f"non-increasing in fs: {'yes' if monotone else 'NO'}")
    if worst < BOUND_LIMIT and (monotone or len(ordered) == 1):
        return 0
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plicancel",
        description="Reference-free canceller for power-line interference in biosignals",
    )
    sub = p.add_subparsers(dest="command")

    sp = sub.add_parser("cancel", help="clean a recording file")
    sp.add_argument("input", help="input CSV or WAV file")
    sp.add_argument("output", help="output file (same format family)")
    sp.add_argument("--format", choices=("csv", "wav"), help="override extension sniffing")
    sp.add_argument("--metrics", help="write diagnostics JSON to this path")
    sp.add_argument("--fixed-point", action="store_true", dest="fixed_point",
                    help="use the quantized 16/24-bit engine")
    _add_param_flags(sp)

    sp = sub.add_parser("simulate", help="synthetic end-to-end run with metrics")
    sp.add_argument("--snr-in", type=float, default=0.0, dest="snr_in")
    sp.add_argument("--f0", type=float, default=60.0, help="interference fundamental, Hz")
    sp.add_argument("--harmonics", type=int, default=3)
    sp.add_argument("--duration", type=float, default=60.0, help="seconds")
    sp.add_argument("--alpha", type=float, default=2.0, help="carrier PSD exponent")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--metrics", help="metrics JSON path (default: stdout)")
    sp.add_argument("--out-clean", help="write the clean carrier here")
    sp.add_argument("--out-mixed", help="write the contaminated input here")
    sp.add_argument("--out-cleaned", help="write the canceller output here")
    sp.add_argument("--fixed-point", action="store_true", dest="fixed_point")
    _add_param_flags(sp)

    sp = sub.add_parser("bench", help="parameter-grid sweeps, CSV table output")
    sp.add_argument("--grid", choices=("snr", "freq", "w"), required=True)
    sp.add_argument("--seeds", type=int, default=5)
    sp.add_argument("--duration", type=float, default=60.0)
    sp.add_argument("--output", help="CSV path (default: stdout)")
    _add_param_flags(sp)

    sp = sub.add_parser("validate-bound", help="correlation-bound sweep")
    sp.add_argument("--fs", type=float, action="append",
                    help="rate to evaluate (repeatable; default full grid)")
    sp.add_argument("--w-min", type=float, default=0.5)
    sp.add_argument("--w-max", type=float, default=5.0)
    sp.add_argument("--w-points", type=int, default=19)
    sp.add_argument("--omega-frac", type=float, default=0.6,
                    help="fundamental as a fraction of pi rad/sample")
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        if args.command == "cancel":
            return _cmd_cancel(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_validate_bound(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())
