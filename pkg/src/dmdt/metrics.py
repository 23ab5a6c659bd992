"""Quality and rate metrics: PRD, SNR, CR, QS, maximum deviation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np


def prd(x, xhat) -> float:
    """Percentage root mean square difference, 100*||x-xhat||/||x||."""
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise ValueError("signals must have equal length")
    ref = float(np.sum(x * x))
    if ref == 0.0:
        raise ValueError("reference signal has zero energy")
    err = float(np.sum((x - xhat) ** 2))
    return 100.0 * math.sqrt(err / ref)


def snr(x, xhat) -> float:
    """Signal-to-noise ratio in dB; returns +inf for a zero error vector."""
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise ValueError("signals must have equal length")
    ref = float(np.sum(x * x))
    if ref == 0.0:
        raise ValueError("reference signal has zero energy")
    err = float(np.sum((x - xhat) ** 2))
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(ref / err)


def cr(original_bits: float, compressed_bits: float) -> float:
    """Compression ratio; values below 1 are reported as-is."""
    if original_bits <= 0 or compressed_bits <= 0:
        raise ValueError("bit counts must be positive")
    return original_bits / compressed_bits


def qs(cr_value: float, prd_value: float) -> float:
    """Quality score CR/PRD; undefined (raises) when PRD is zero."""
    if prd_value <= 0:
        raise ValueError("QS undefined for zero PRD")
    return cr_value / prd_value


def max_deviation(x, xhat) -> float:
    """Largest absolute sample error."""
    x = np.asarray(x, dtype=np.float64)
    xhat = np.asarray(xhat, dtype=np.float64)
    if x.shape != xhat.shape:
        raise ValueError("signals must have equal length")
    if x.size == 0:
        return 0.0
    return float(np.max(np.abs(x - xhat)))


@dataclass
class MetricsReport:
    prd: float
    cr: float
    qs: Optional[float]
    snr_db: float
    max_dev: float
    n: int
    theta: float

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(x, xhat, original_bits: int, compressed_bits: int,
             theta: float) -> MetricsReport:
    """Bundle all metrics for one (original, reconstructed) pair."""
    p = prd(x, xhat)
    c = cr(original_bits, compressed_bits)
    return MetricsReport(
        prd=p,
        cr=c,
        qs=qs(c, p) if p > 0 else None,
        snr_db=snr(x, xhat),
        max_dev=max_deviation(x, xhat),
        n=len(np.asarray(x)),
        theta=theta,
    )
