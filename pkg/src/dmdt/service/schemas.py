"""Pydantic request/response models for the compression service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class CodecSettings(BaseModel):
    codec: Literal["dmdt", "wt"] = "dmdt"
    block_len: int = 512
    theta: float = Field(default=5.0, gt=0)
    d1: int = 32          # divisor codec only
    d2: int = 16
    levels: int = 4       # wavelet baseline only
    subtract_mean: Literal["auto", "on", "off"] = "auto"


class CompressRequest(BaseModel):
    samples: list[float]
    settings: CodecSettings = CodecSettings()


class CompressResponse(BaseModel):
    codec: str
    n_samples: int
    n_blocks: int
    compressed_bytes: int
    containers: list[str]  # base64, one per block


class DecompressRequest(BaseModel):
    # each entry may hold one container or a concatenation of containers;
    # with codec="auto" the magic bytes decide per entry
    containers: list[str]
    codec: Literal["auto", "dmdt", "wt"] = "auto"


class DecompressResponse(BaseModel):
    samples: list[float]
    n_samples: int


class MetricsRequest(BaseModel):
    original: list[float]
    reconstructed: list[float]
    bit_depth: int = Field(default=16, gt=0)
    compressed_bytes: Optional[int] = Field(default=None, gt=0)
    theta: float = 0.0


class MetricsResponse(BaseModel):
    prd: float
    snr_db: Optional[float]  # null encodes a zero-error (+inf) pair
    max_dev: float
    n: int
    cr: Optional[float] = None
    qs: Optional[float] = None


class SweepRecord(BaseModel):
    name: str
    samples: list[float]
    bit_depth: int = Field(default=16, gt=0)


class SweepRequest(BaseModel):
    records: list[SweepRecord]
    thetas: list[float]
    settings: CodecSettings = CodecSettings()
    dataset: str = ""


class SweepResponse(BaseModel):
    rows: list[dict]
    summary: list[dict]  # per (codec, theta) corpus aggregates


class CompareRequest(BaseModel):
    records: list[SweepRecord]
    thetas: list[float]
    settings: CodecSettings = CodecSettings()
    snr_window_db: float = 1.0
    dataset: str = ""


class ComparePair(BaseModel):
    record: str
    theta_dmdt: float
    theta_wt: float
    snr_dmdt: float
    snr_wt: float
    cr_dmdt: float
    cr_wt: float
    dmdt_wins: bool


class CompareResponse(BaseModel):
    matched: int
    wins: int
    win_fraction: float
    mean_cr_gain: float
    pairs: list[ComparePair]


class FixtureStatus(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyResponse(BaseModel):
    passed: bool
    fixtures: list[FixtureStatus]


class ContainerInfo(BaseModel):
    index: int
    codec: str
    n: int
    theta: float
    payload_bytes: int
    d1: Optional[int] = None
    d2: Optional[int] = None
    levels: Optional[int] = None
    mean_offset: Optional[int] = None


class InspectRequest(BaseModel):
    containers: list[str]


class InspectResponse(BaseModel):
    containers: list[ContainerInfo]


class InfoResponse(BaseModel):
    name: str
    version: str
    container_magic: str
    baseline_magic: str
    default_settings: CodecSettings
    corpora: list[str]
