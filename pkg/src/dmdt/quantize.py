"""Normalized uniform quantization of subband pyramids.

Each subband coefficient c is mapped to floor(c*f + 0.5) where f folds the
global step theta together with the constant that orthonormalizes the
unnormalized cosine rows: the deepest average uses 1/(theta*sqrt(d1*...*dk)),
level-j details use sqrt(2)/(theta*sqrt(d1*...*dj)).  With these factors the
quantization error of every coefficient, viewed in the orthonormal frame, is
at most theta/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import QuantizerOverflowError
from .transform import DecompositionPlan, SubbandPyramid

_INT32_MIN = -(2**31)
_INT32_MAX = 2**31 - 1


@dataclass(frozen=True)
class QuantizerParams:
    theta: float
    plan: DecompositionPlan

    def __post_init__(self):
        if not (self.theta > 0):
            raise ValueError(f"theta must be positive, got {self.theta}")

    def average_factor(self) -> float:
        """Multiplier for the deepest average subband."""
        return 1.0 / (self.theta * math.sqrt(math.prod(self.plan.divisors)))

    def detail_factor(self, level: int) -> float:
        """Multiplier for level-j detail subbands (1-based level)."""
        prod = math.prod(self.plan.divisors[:level])
        return math.sqrt(2.0) / (self.theta * math.sqrt(prod))


@dataclass
class QuantizedPyramid:
    """Integer subbands mirroring a SubbandPyramid, plus the optional
    stored mean of the deepest average component."""

    deepest_average: np.ndarray
    details: list[list[np.ndarray]]
    mean_offset: Optional[int]
    params: QuantizerParams

    def serialize(self) -> np.ndarray:
        """Flat int32 stream in the same order as SubbandPyramid.serialize."""
        parts = [self.deepest_average]
        for level in reversed(self.details):
            parts.extend(level)
        return np.concatenate(parts).astype(np.int32, copy=False)

    @classmethod
    def from_serialized(cls, flat, params: QuantizerParams,
                        mean_offset: Optional[int] = None) -> "QuantizedPyramid":
        shaped = SubbandPyramid.from_serialized(np.asarray(flat, dtype=np.int32),
                                                params.plan)
        return cls(deepest_average=shaped.deepest_average,
                   details=shaped.details,
                   mean_offset=mean_offset, params=params)


def _quantize_array(c: np.ndarray, factor: float) -> np.ndarray:
    q = np.floor(np.asarray(c, dtype=np.float64) * factor + 0.5)
    if not np.all(np.isfinite(q)) or np.any(q < _INT32_MIN) or np.any(q > _INT32_MAX):
        raise QuantizerOverflowError(
            "quantized coefficient outside signed 32-bit range"
        )
    return q.astype(np.int32)


def quantize(p: SubbandPyramid, params: QuantizerParams,
             subtract_mean: bool = False) -> QuantizedPyramid:
    """Quantize a pyramid produced with the same plan.

    With ``subtract_mean`` the rounded mean of the deepest average component
    is removed before quantization and kept as ``mean_offset`` so it can be
    restored exactly.
    """
    p.check_shapes()
    if p.plan.divisors != params.plan.divisors or \
            p.plan.signal_len != params.plan.signal_len:
        raise ValueError("pyramid plan does not match quantizer params")

    avg = np.asarray(p.deepest_average, dtype=np.float64)
    mean_offset = None
    if subtract_mean:
        mean_offset = int(math.floor(float(np.mean(avg)) + 0.5))
        avg = avg - mean_offset
    q_avg = _quantize_array(avg, params.average_factor())

    q_details: list[list[np.ndarray]] = []
    for j, level in enumerate(p.details, start=1):
        f = params.detail_factor(j)
        q_details.append([_quantize_array(w, f) for w in level])

    return QuantizedPyramid(deepest_average=q_avg, details=q_details,
                            mean_offset=mean_offset, params=params)


def dequantize(q: QuantizedPyramid) -> SubbandPyramid:
    """Map integers back to coefficients (reciprocal factors); restores the
    stored mean after de-quantizing the deepest average."""
    params = q.params
    avg = np.asarray(q.deepest_average, dtype=np.float64) / params.average_factor()
    if q.mean_offset is not None:
        avg = avg + q.mean_offset
    details = []
    for j, level in enumerate(q.details, start=1):
        f = params.detail_factor(j)
        details.append([np.asarray(w, dtype=np.float64) / f for w in level])
    return SubbandPyramid(deepest_average=avg, details=details, plan=params.plan)
