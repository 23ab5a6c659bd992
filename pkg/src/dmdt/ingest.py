"""Dataset ingestion: one channel of a WAV/CSV/raw file as a float vector,
with the source bit depth recorded for compression-ratio accounting."""

from __future__ import annotations

import csv
import wave
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

FORMATS = ("csv", "wav", "raw-i16", "raw-f32")

# bit depth used for CR when the caller does not override it: 11-bit CSV
# matches the usual ECG-record conversion, 16-bit PCM for WAV and raw-i16,
# 32 bits/sample for float sources.
DEFAULT_BIT_DEPTH = {"csv": 11, "wav": 16, "raw-i16": 16, "raw-f32": 32}

_EXTENSION_FORMATS = {".csv": "csv", ".txt": "csv", ".wav": "wav"}


@dataclass(frozen=True)
class IngestSpec:
    path: str
    format: Optional[str] = None   # inferred from the extension when None
    channel: int = 0
    bit_depth: Optional[int] = None
    sample_rate: Optional[float] = None

    def resolved_format(self) -> str:
        if self.format is not None:
            if self.format not in FORMATS:
                raise ValueError(f"unknown format {self.format!r}")
            return self.format
        ext = Path(self.path).suffix.lower()
        if ext in _EXTENSION_FORMATS:
            return _EXTENSION_FORMATS[ext]
        raise ValueError(
            f"cannot infer format from {self.path!r}; pass one of {FORMATS}"
        )


@dataclass
class Signal:
    samples: np.ndarray
    bit_depth: int
    sample_rate: Optional[float]
    source: str
    format: str


def _read_wav(path: str, channel: int) -> tuple[np.ndarray, float]:
    with wave.open(path, "rb") as w:
        if w.getsampwidth() != 2 or w.getcomptype() != "NONE":
            raise ValueError(f"{path}: only 16-bit PCM WAV is supported")
        nch = w.getnchannels()
        if not 0 <= channel < nch:
            raise ValueError(f"{path}: channel {channel} out of range (has {nch})")
        frames = w.readframes(w.getnframes())
        rate = float(w.getframerate())
    data = np.frombuffer(frames, dtype="<i2").reshape(-1, nch)
    return data[:, channel].astype(np.float64), rate


def _read_csv(path: str, channel: int) -> np.ndarray:
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for row_idx, row in enumerate(reader):
            row = [c.strip() for c in row if c.strip() != ""]
            if not row:
                continue
            if channel >= len(row):
                raise ValueError(
                    f"{path}: row {row_idx + 1} has {len(row)} columns, "
                    f"need channel {channel}"
                )
            try:
                values.append(float(row[channel]))
            except ValueError:
                if row_idx == 0:
                    continue  # header row
                raise ValueError(
                    f"{path}: non-numeric value {row[channel]!r} at row {row_idx + 1}"
                ) from None
    if not values:
        raise ValueError(f"{path}: no numeric samples found")
    return np.asarray(values, dtype=np.float64)


def _read_raw(path: str, dtype: str, channel: int) -> np.ndarray:
    if channel != 0:
        raise ValueError("raw formats are single-channel; use channel 0")
    data = np.fromfile(path, dtype=dtype)
    if data.size == 0:
        raise ValueError(f"{path}: empty file")
    return data.astype(np.float64)


def ingest(spec: IngestSpec) -> Signal:
    """Load one channel according to the spec; raises ValueError on malformed
    input or an out-of-range channel."""
    fmt = spec.resolved_format()
    rate = spec.sample_rate
    if fmt == "wav":
        samples, wav_rate = _read_wav(spec.path, spec.channel)
        rate = rate if rate is not None else wav_rate
    elif fmt == "csv":
        samples = _read_csv(spec.path, spec.channel)
    elif fmt == "raw-i16":
        samples = _read_raw(spec.path, "<i2", spec.channel)
    else:
        samples = _read_raw(spec.path, "<f4", spec.channel)
    bit_depth = spec.bit_depth if spec.bit_depth is not None \
        else DEFAULT_BIT_DEPTH[fmt]
    return Signal(samples=samples, bit_depth=bit_depth, sample_rate=rate,
                  source=spec.path, format=fmt)
