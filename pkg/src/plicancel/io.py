"""Signal file I/O: headerless/headered CSV and PCM16/float32 WAV.

CSV carries no rate, so reading CSV requires an explicit sampling rate.
Values are written with 17 significant digits, enough for doubles to
round-trip exactly.  WAV reads accept PCM16 (scaled by 1/32768 into
[-1, 1)) and IEEE float32; writes are float32.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io.wavfile


@dataclass
class Signal:
    """Samples plus their rate; data is (n,) or (n, channels) float64."""

    data: np.ndarray
    fs: float

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return 1 if self.data.ndim == 1 else self.data.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.fs


def _sniff_format(path: str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".wav":
        return "wav"
    return "csv"


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def read_signal(path, fmt: str | None = None, fs: float | None = None) -> Signal:
    """Read a signal file.

    Parameters
    ----------
    path : str or Path
        Input file.
    fmt : {'csv', 'wav'}, optional
        Defaults from the file extension.
    fs : float, optional
        Sampling rate; required for CSV (the format stores none), ignored
        for WAV (the header wins).
    """
    path = str(path)
    fmt = fmt or _sniff_format(path)
    if fmt == "csv":
        if fs is None:
            raise ValueError(f"{path}: CSV carries no sampling rate; pass fs explicitly")
        return _read_csv(path, float(fs))
    if fmt == "wav":
        return _read_wav(path)
    raise ValueError(f"unsupported format {fmt!r}; expected 'csv' or 'wav'")


def _read_csv(path: str, fs: float) -> Signal:
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            toks = [t.strip() for t in line.split(",")]
            if lineno == 1 and any(not _is_number(t) for t in toks):
                # single header row allowed
                continue
            vals = []
            for col, tok in enumerate(toks, start=1):
                try:
                    vals.append(float(tok))
                except ValueError:
                    raise ValueError(
                        f"{path}: non-numeric value {tok!r} at row {lineno}, column {col}"
                    ) from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise ValueError(
                    f"{path}: ragged row at row {lineno}: expected {width} "
                    f"columns, got {len(vals)}"
                )
            rows.append(vals)
    if not rows:
        return Signal(data=np.empty(0), fs=fs)
    arr = np.asarray(rows, dtype=np.float64)
    if arr.shape[1] == 1:
        arr = arr[:, 0]
    return Signal(data=arr, fs=fs)


def _read_wav(path: str) -> Signal:
    rate, data = scipy.io.wavfile.read(path)
    if data.dtype == np.int16:
        arr = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        arr = data.astype(np.float64)
    else:
        raise ValueError(
            f"{path}: unsupported WAV encoding {data.dtype}; "
            f"expected PCM16 or IEEE float32"
        )
    return Signal(data=arr, fs=float(rate))


def write_signal(path, signal: Signal, fmt: str | None = None) -> None:
    """Write a signal file; format defaults from the extension.

    CSV values round-trip doubles exactly; WAV is written as float32.
    """
    path = str(path)
    fmt = fmt or _sniff_format(path)
    if fmt == "csv":
        _write_csv(path, signal)
    elif fmt == "wav":
        data = np.asarray(signal.data, dtype=np.float32)
        scipy.io.wavfile.write(path, int(round(signal.fs)), data)
    else:
        raise ValueError(f"unsupported format {fmt!r}; expected 'csv' or 'wav'")


def _write_csv(path: str, signal: Signal) -> None:
    data = signal.data
    if data.ndim == 1:
        data = data[:, None]
    with open(path, "w", encoding="utf-8") as fh:
        for row in data:
            fh.write(",".join(format(v, ".17g") for v in row))
            fh.write("\n")
