"""Benchmark harness: theta sweeps, codec-vs-baseline comparison and report
emission, plus deterministic synthetic corpora for self-contained runs.

Report rows carry {dataset, record, codec, n, d1, d2, theta, cr, prd, qs,
snr_db, max_dev, enc_time_ms, dec_time_ms} and are ordered by
(record, theta) regardless of execution order.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import metrics
from .codec import CodecConfig, compress_stream, decompress_stream
from .wtbaseline import WtConfig, wt_compress_stream, wt_decompress_stream

REPORT_FIELDS = [
    "dataset", "record", "codec", "n", "d1", "d2", "theta",
    "cr", "prd", "qs", "snr_db", "max_dev", "enc_time_ms", "dec_time_ms",
]


@dataclass
class Record:
    name: str
    samples: np.ndarray
    bit_depth: int


def theta_grid(spec: str) -> list[float]:
    """Parse "a:b:step" into an inclusive grid, e.g. "5:30:2" -> 5,7,...,29."""
    try:
        parts = [float(p) for p in spec.split(":")]
        a, b, step = parts
    except (ValueError, IndexError):
        raise ValueError(f"sweep spec must be 'a:b:step', got {spec!r}") from None
    if step <= 0 or b < a:
        raise ValueError(f"invalid sweep range {spec!r}")
    return [float(t) for t in np.arange(a, b + step * 0.5, step)]


# -- synthetic corpora -----------------------------------------------------------


def synthetic_ppg(n: int, seed: int = 0, fs: float = 400.0) -> np.ndarray:
    """Wearable-style pulse waveform: fast systolic upstroke, slower decay,
    dicrotic notch, respiratory wander, slight motion ripple and a few-LSB
    sensor noise floor, offset to positive ADC counts."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) / fs
    beat_rate = 1.2 + 0.08 * np.sin(2 * np.pi * 0.05 * t) \
        + 0.02 * rng.standard_normal()
    phase = np.mod(np.cumsum(beat_rate) / fs, 1.0)
    systolic = np.exp(-0.5 * ((phase - 0.12) / 0.022) ** 2)
    decay = 0.75 * np.exp(-0.5 * ((phase - 0.23) / 0.075) ** 2)
    notch = 0.28 * np.exp(-0.5 * ((phase - 0.42) / 0.030) ** 2)
    wander = 0.06 * np.sin(2 * np.pi * 0.27 * t + rng.uniform(0, 2 * np.pi))
    motion = 0.02 * np.sin(2 * np.pi * 3.1 * t + rng.uniform(0, 2 * np.pi))
    noise = 0.0025 * rng.standard_normal(n)
    pulse = systolic + decay + notch + wander + motion + noise
    return np.round(2200.0 * pulse + 3000.0)


def synthetic_accelerometer(n: int, seed: int = 0, fs: float = 100.0) -> np.ndarray:
    """Body-motion-like acceleration trace: slow gait harmonics over a gravity
    offset, with wideband sensor noise (float source)."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) / fs
    gait = 1.9 + 0.1 * rng.standard_normal()
    x = 9.81 * 0.55
    x = x + 1.8 * np.sin(2 * np.pi * gait * t + rng.uniform(0, 2 * np.pi))
    x = x + 0.7 * np.sin(2 * np.pi * 2 * gait * t + rng.uniform(0, 2 * np.pi))
    x = x + 0.25 * np.sin(2 * np.pi * 3 * gait * t + rng.uniform(0, 2 * np.pi))
    x = x + 0.4 * np.sin(2 * np.pi * 0.11 * t)
    x = x + 0.02 * rng.standard_normal(n)
    return x


def synthetic_ecg(n: int, seed: int = 0, fs: float = 360.0) -> np.ndarray:
    """ECG-like trace (P, QRS, T bumps per beat) in offset 11-bit counts."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) / fs
    rate = 1.15 + 0.06 * np.sin(2 * np.pi * 0.08 * t) \
        + 0.02 * rng.standard_normal()
    phase = np.mod(np.cumsum(rate) / fs, 1.0)

    def bump(center, width, height):
        return height * np.exp(-0.5 * ((phase - center) / width) ** 2)

    wave = (bump(0.18, 0.025, 0.12)        # P
            - bump(0.285, 0.008, 0.18)     # Q
            + bump(0.30, 0.009, 1.0)       # R
            - bump(0.315, 0.008, 0.25)     # S
            + bump(0.48, 0.045, 0.28))     # T
    wander = 0.03 * np.sin(2 * np.pi * 0.33 * t + rng.uniform(0, 2 * np.pi))
    noise = 0.004 * rng.standard_normal(n)
    return np.round(620.0 * (wave + wander + noise) + 1024.0)


_CORPUS_BUILDERS = {
    "ppg": (synthetic_ppg, 16),
    "accel": (synthetic_accelerometer, 32),
    "ecg": (synthetic_ecg, 11),
}


def bundled_corpus(kind: str, records: int = 5, length: int = 8192) -> list[Record]:
    """Deterministic synthetic records; kind is one of ppg, accel, ecg."""
    if kind not in _CORPUS_BUILDERS:
        raise ValueError(f"unknown corpus kind {kind!r}; "
                         f"choose from {sorted(_CORPUS_BUILDERS)}")
    build, bit_depth = _CORPUS_BUILDERS[kind]
    return [
        Record(name=f"{kind}-{i:02d}", samples=build(length, seed=1000 + i),
               bit_depth=bit_depth)
        for i in range(records)
    ]


# -- sweeps -----------------------------------------------------------------------


def _evaluate_once(record: Record, codec: str, theta: float, block_len: int,
                   d1: int, d2: int, levels: int, subtract_mean: str) -> dict:
    x = record.samples
    if codec == "dmdt":
        cfg = CodecConfig(d1=d1, d2=d2, theta=theta, block_len=block_len,
                          subtract_mean=subtract_mean)
        t0 = time.perf_counter()
        containers = compress_stream(x, cfg)
        t1 = time.perf_counter()
        xhat = decompress_stream(containers)
        t2 = time.perf_counter()
        nbytes = sum(len(c.to_bytes()) for c in containers)
        row_d1, row_d2 = d1, d2
    elif codec == "wt":
        cfg = WtConfig(theta=theta, levels=levels, block_len=block_len)
        t0 = time.perf_counter()
        containers = wt_compress_stream(x, cfg)
        t1 = time.perf_counter()
        xhat = wt_decompress_stream(containers)
        t2 = time.perf_counter()
        nbytes = sum(len(c) for c in containers)
        row_d1 = row_d2 = 2
    else:
        raise ValueError(f"unknown codec {codec!r}")

    report = metrics.evaluate(x, xhat,
                              original_bits=len(x) * record.bit_depth,
                              compressed_bits=8 * nbytes, theta=theta)
    return {
        "record": record.name, "codec": codec, "n": len(x),
        "d1": row_d1, "d2": row_d2, "theta": theta,
        "cr": report.cr, "prd": report.prd, "qs": report.qs,
        # lossless rows carry null instead of +inf so reports stay valid JSON
        "snr_db": None if math.isinf(report.snr_db) else report.snr_db,
        "max_dev": report.max_dev,
        "enc_time_ms": 1e3 * (t1 - t0), "dec_time_ms": 1e3 * (t2 - t1),
    }


def run_sweep(records: Sequence[Record], codec: str, thetas: Sequence[float],
              block_len: int = 512, d1: int = 32, d2: int = 16,
              levels: int = 4, subtract_mean: str = "auto",
              dataset: str = "") -> list[dict]:
    """Compress/decompress every record at every theta and report metrics."""
    if not records:
        raise ValueError("no records to sweep")
    rows = []
    for record in records:
        for theta in thetas:
            row = _evaluate_once(record, codec, float(theta), block_len,
                                 d1, d2, levels, subtract_mean)
            row["dataset"] = dataset
            rows.append(row)
    rows.sort(key=lambda r: (r["record"], r["theta"]))
    return rows


def compare_codecs(records: Sequence[Record], thetas: Sequence[float],
                   block_len: int = 512, d1: int = 32, d2: int = 16,
                   levels: int = 4, snr_window_db: float = 1.0,
                   dataset: str = "") -> dict:
    """Pair each divisor-codec sweep point with the nearest-SNR baseline point
    of the same record (within the window) and count rate wins."""
    rows_d = run_sweep(records, "dmdt", thetas, block_len=block_len,
                       d1=d1, d2=d2, dataset=dataset)
    rows_w = run_sweep(records, "wt", thetas, block_len=block_len,
                       levels=levels, dataset=dataset)
    by_record: dict[str, list[dict]] = {}
    for row in rows_w:
        by_record.setdefault(row["record"], []).append(row)

    pairs = []
    for row in rows_d:
        if row["snr_db"] is None:
            continue
        candidates = [
            w for w in by_record.get(row["record"], ())
            if w["snr_db"] is not None
            and abs(w["snr_db"] - row["snr_db"]) <= snr_window_db
        ]
        if not candidates:
            continue
        nearest = min(candidates, key=lambda w: abs(w["snr_db"] - row["snr_db"]))
        pairs.append({
            "record": row["record"], "theta_dmdt": row["theta"],
            "theta_wt": nearest["theta"], "snr_dmdt": row["snr_db"],
            "snr_wt": nearest["snr_db"], "cr_dmdt": row["cr"],
            "cr_wt": nearest["cr"],
            "dmdt_wins": bool(row["cr"] >= nearest["cr"]),
        })
    wins = sum(p["dmdt_wins"] for p in pairs)
    gains = [p["cr_dmdt"] / p["cr_wt"] - 1.0 for p in pairs]
    return {
        "pairs": pairs,
        "matched": len(pairs),
        "wins": wins,
        "win_fraction": wins / len(pairs) if pairs else 0.0,
        "mean_cr_gain": float(np.mean(gains)) if gains else 0.0,
        "rows_dmdt": rows_d,
        "rows_wt": rows_w,
    }


def summarize_rows(rows: Sequence[dict]) -> list[dict]:
    """Corpus-level summary per (codec, theta): mean CR/PRD/SNR plus QS both
    ways: averaged per record, and recomputed from the aggregate means
    (published summaries round before dividing, so both are reported)."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["codec"], row["theta"]), []).append(row)
    summary = []
    for (codec, theta), members in sorted(groups.items()):
        crs = np.array([m["cr"] for m in members], dtype=float)
        prds = np.array([m["prd"] for m in members], dtype=float)
        qss = [m["qs"] for m in members if m["qs"] is not None]
        snrs = [m["snr_db"] for m in members if m["snr_db"] is not None]
        mean_cr = float(np.mean(crs))
        mean_prd = float(np.mean(prds))
        summary.append({
            "codec": codec,
            "theta": theta,
            "records": len(members),
            "mean_cr": mean_cr,
            "mean_prd": mean_prd,
            "mean_snr_db": float(np.mean(snrs)) if snrs else None,
            "qs_per_record": float(np.mean(qss)) if qss else None,
            "qs_aggregate": mean_cr / mean_prd if mean_prd > 0 else None,
            "mean_cr_rounded": round(mean_cr, 2),
            "mean_prd_rounded": round(mean_prd, 2),
        })
    return summary


# -- report output ---------------------------------------------------------------


def write_report(rows: list[dict], path: str, fmt: str = "csv"):
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS,
                                    extrasaction="ignore")
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump([{k: row.get(k) for k in REPORT_FIELDS} for row in rows],
                      fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unknown report format {fmt!r}")


def write_plot_data(rows: list[dict], path: str):
    """(theta, cr, snr) triples per record, ready for external plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["record", "codec", "theta", "cr", "snr_db"])
        for row in rows:
            writer.writerow([row["record"], row["codec"], row["theta"],
                             row["cr"], row["snr_db"]])
