"""End-to-end block codec: two-level decomposition, quantization,
serialization and entropy coding, framed in a bit-exact container.

Container layout (little-endian, normative; see FORMAT.md):

    magic       4 bytes  b"DMDT"
    version     u8       1
    flags       u8       bit0 = mean offset present
    n           u32      true sample count of the block
    d1, d2      u8, u8   level divisors
    theta       f64      quantization step
    mean_offset i64      only if flags bit0 set
    checksum    u32      CRC32 of the decoded symbol stream (int32 LE bytes)
    payload_len u32
    payload     bytes    arithmetic-coded symbol stream

The coded symbol count is the smallest multiple of d1*d2 that is >= n, so a
container is self-describing even for a zero-padded final stream block.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from . import entropy
from .errors import FormatError, IntegrityError
from .quantize import QuantizedPyramid, QuantizerParams, dequantize, quantize
from .transform import DecompositionPlan, decompose, reconstruct

MAGIC = b"DMDT"
VERSION = 1
_FLAG_MEAN = 0x01

_FIXED_HEADER = struct.Struct("<4sBBIBBd")   # magic..theta
_MEAN_FIELD = struct.Struct("<q")
_TRAILER = struct.Struct("<II")              # checksum, payload_len


@dataclass(frozen=True)
class CodecConfig:
    d1: int = 32
    d2: int = 16
    theta: float = 5.0
    block_len: int = 512
    subtract_mean: str = "auto"  # auto | on | off

    def __post_init__(self):
        if self.d1 < 2 or self.d2 < 2:
            raise ValueError("divisors must be >= 2")
        if self.d1 > 255 or self.d2 > 255:
            raise ValueError("divisors must fit in one octet")
        if not (self.theta > 0):
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.block_len % self.d1 != 0 or (self.block_len // self.d1) % self.d2 != 0:
            raise ValueError(
                f"block length {self.block_len} not divisible by "
                f"{self.d1} then {self.d2}"
            )
        if self.subtract_mean not in ("auto", "on", "off"):
            raise ValueError("subtract_mean must be auto, on or off")


@dataclass
class CompressedContainer:
    n: int
    d1: int
    d2: int
    theta: float
    mean_offset: Optional[int]
    checksum: int
    payload: bytes

    @property
    def symbol_count(self) -> int:
        """Coded symbols: n rounded up to a multiple of d1*d2."""
        group = self.d1 * self.d2
        return -(-self.n // group) * group

    def to_bytes(self) -> bytes:
        flags = _FLAG_MEAN if self.mean_offset is not None else 0
        head = _FIXED_HEADER.pack(MAGIC, VERSION, flags, self.n,
                                  self.d1, self.d2, self.theta)
        mean = _MEAN_FIELD.pack(self.mean_offset) if self.mean_offset is not None \
            else b""
        trail = _TRAILER.pack(self.checksum, len(self.payload))
        return head + mean + trail + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedContainer":
        container, used = parse_container(data)
        if used != len(data):
            raise FormatError(f"{len(data) - used} trailing bytes after container")
        return container


def parse_container(data: bytes, offset: int = 0) -> tuple[CompressedContainer, int]:
    """Parse one container starting at ``offset``; returns it and the offset
    just past its payload."""
    if len(data) - offset < _FIXED_HEADER.size:
        raise FormatError("container header truncated")
    magic, version, flags, n, d1, d2, theta = _FIXED_HEADER.unpack_from(data, offset)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    pos = offset + _FIXED_HEADER.size
    mean_offset = None
    if flags & _FLAG_MEAN:
        if len(data) - pos < _MEAN_FIELD.size:
            raise FormatError("container header truncated")
        (mean_offset,) = _MEAN_FIELD.unpack_from(data, pos)
        pos += _MEAN_FIELD.size
    if len(data) - pos < _TRAILER.size:
        raise FormatError("container header truncated")
    checksum, payload_len = _TRAILER.unpack_from(data, pos)
    pos += _TRAILER.size
    if len(data) - pos < payload_len:
        raise FormatError("container payload truncated")
    payload = bytes(data[pos : pos + payload_len])
    if d1 < 2 or d2 < 2 or n == 0:
        raise FormatError("inconsistent header fields")
    container = CompressedContainer(n=n, d1=d1, d2=d2, theta=theta,
                                    mean_offset=mean_offset, checksum=checksum,
                                    payload=payload)
    return container, pos + payload_len


def iter_containers(data: bytes) -> Iterator[CompressedContainer]:
    offset = 0
    while offset < len(data):
        container, offset = parse_container(data, offset)
        yield container


def symbol_checksum(symbols: np.ndarray) -> int:
    """CRC32 over the canonical little-endian int32 serialization."""
    return zlib.crc32(np.ascontiguousarray(symbols, dtype="<i4").tobytes())


def _resolve_mean_flag(mode: str, x: np.ndarray) -> bool:
    if mode == "on":
        return True
    if mode == "off":
        return False
    return bool(np.all(x >= 0))


def _compress_block(x: np.ndarray, cfg: CodecConfig, true_n: int) -> CompressedContainer:
    block_len = len(x)
    plan = DecompositionPlan((cfg.d1, cfg.d2), block_len)
    pyramid = decompose(x, plan)
    params = QuantizerParams(theta=cfg.theta, plan=plan)
    qp = quantize(pyramid, params,
                  subtract_mean=_resolve_mean_flag(cfg.subtract_mean, x))
    symbols = qp.serialize()
    split = block_len // (cfg.d1 * cfg.d2)
    payload = entropy.encode(symbols, split=split)
    return CompressedContainer(
        n=true_n, d1=cfg.d1, d2=cfg.d2, theta=cfg.theta,
        mean_offset=qp.mean_offset,
        checksum=symbol_checksum(symbols), payload=payload,
    )


def compress(x, cfg: CodecConfig) -> CompressedContainer:
    """Compress one full block of cfg.block_len samples."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) != cfg.block_len:
        raise ValueError(f"expected block of {cfg.block_len} samples, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    return _compress_block(x, cfg, true_n=cfg.block_len)


def decompress(c: CompressedContainer) -> np.ndarray:
    """Exact pipeline inverse; truncates zero-padding for ragged tail blocks."""
    count = c.symbol_count
    group = c.d1 * c.d2
    split = count // group
    symbols = entropy.decode(c.payload, count, split=split)
    if symbol_checksum(symbols) != c.checksum:
        raise IntegrityError("decoded symbol stream fails checksum")
    plan = DecompositionPlan((c.d1, c.d2), count)
    params = QuantizerParams(theta=c.theta, plan=plan)
    qp = QuantizedPyramid.from_serialized(symbols, params,
                                          mean_offset=c.mean_offset)
    x = reconstruct(dequantize(qp))
    return x[: c.n]


def compress_stream(samples, cfg: CodecConfig) -> list[CompressedContainer]:
    """Blockwise compression of an arbitrary-length sequence.

    A final partial block is zero-padded up to the next multiple of d1*d2
    (the smallest valid block length) and its container records the true
    sample count, so decompression reproduces the input length exactly.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    n = len(samples)
    block = cfg.block_len
    containers = []
    for start in range(0, n - n % block, block):
        containers.append(compress(samples[start : start + block], cfg))
    tail = n % block
    if tail:
        group = cfg.d1 * cfg.d2
        padded_len = -(-tail // group) * group
        padded = np.zeros(padded_len, dtype=np.float64)
        padded[:tail] = samples[n - tail :]
        tail_cfg = CodecConfig(d1=cfg.d1, d2=cfg.d2, theta=cfg.theta,
                               block_len=padded_len,
                               subtract_mean=cfg.subtract_mean)
        containers.append(_compress_block(padded, tail_cfg, true_n=tail))
    return containers


def decompress_stream(containers: Sequence[CompressedContainer]) -> np.ndarray:
    if not containers:
        return np.empty(0, dtype=np.float64)
    return np.concatenate([decompress(c) for c in containers])
