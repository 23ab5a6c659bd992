"""Wavelet comparison baseline: CDF 9/7 lifting, uniform quantization and
canonical Huffman coding, framed in a "WTBL" container.

The lifting scaling puts the transform in the near-orthonormal convention
(analysis lowpass DC gain sqrt(2)), so a single global quantization step
theta plays the same role as in the divisor codec and rate/quality sweeps
of the two codecs are directly comparable.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .entropy import unzigzag, zigzag
from .errors import DecodeError, FormatError, IntegrityError, QuantizerOverflowError

ALPHA = -1.586134342059924
BETA = -0.052980118572961
GAMMA = 0.882911075530934
DELTA = 0.443506852043971
SCALE_LO = 1.149604398
SCALE_HI = 1.0 / SCALE_LO

MAGIC = b"WTBL"
VERSION = 1

_ALPHABET = 33  # bucket symbols 0..32
_INT32_MIN = -(2**31)
_INT32_MAX = 2**31 - 1

_FIXED_HEADER = struct.Struct("<4sBBIBd")  # magic, ver, flags, n, levels, theta
_TRAILER = struct.Struct("<II")            # checksum, payload_len


@dataclass(frozen=True)
class WtConfig:
    theta: float
    levels: int = 4
    block_len: int = 512

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if not (self.theta > 0):
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.block_len % (1 << self.levels) != 0:
            raise ValueError(
                f"block length {self.block_len} not divisible by 2^{self.levels}"
            )


# -- CDF 9/7 lifting -----------------------------------------------------------


def _lift_odd(x: np.ndarray, c: float):
    # x[2k+1] += c*(x[2k] + x[2k+2]), right edge mirrored whole-sample
    even = x[0::2]
    x[1::2] += c * (even + np.concatenate((even[1:], even[-1:])))


def _lift_even(x: np.ndarray, c: float):
    # x[2k] += c*(x[2k-1] + x[2k+1]), left edge mirrored whole-sample
    odd = x[1::2]
    x[0::2] += c * (np.concatenate((odd[:1], odd[:-1])) + odd)


def dwt97_forward(x) -> tuple[np.ndarray, np.ndarray]:
    """One analysis level; returns (lowpass, highpass) halves."""
    x = np.array(x, dtype=np.float64)
    if len(x) % 2 or len(x) < 2:
        raise ValueError(f"need even length >= 2, got {len(x)}")
    _lift_odd(x, ALPHA)
    _lift_even(x, BETA)
    _lift_odd(x, GAMMA)
    _lift_even(x, DELTA)
    return x[0::2] * SCALE_LO, x[1::2] * SCALE_HI


def dwt97_inverse(lo, hi) -> np.ndarray:
    """Exact inverse of :func:`dwt97_forward`."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if len(lo) != len(hi):
        raise ValueError("subband length mismatch")
    x = np.empty(2 * len(lo), dtype=np.float64)
    x[0::2] = lo / SCALE_LO
    x[1::2] = hi / SCALE_HI
    _lift_even(x, -DELTA)
    _lift_odd(x, -GAMMA)
    _lift_even(x, -BETA)
    _lift_odd(x, -ALPHA)
    return x


def wavedec(x, levels: int) -> list[np.ndarray]:
    """Dyadic decomposition: [a_L, d_L, d_{L-1}, ..., d_1]."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) % (1 << levels) != 0:
        raise ValueError(f"length {len(x)} not divisible by 2^{levels}")
    coeffs = []
    a = x
    for _ in range(levels):
        a, d = dwt97_forward(a)
        coeffs.append(d)
    coeffs.append(a)
    return coeffs[::-1]


def waverec(coeffs: list[np.ndarray]) -> np.ndarray:
    a = np.asarray(coeffs[0], dtype=np.float64)
    for d in coeffs[1:]:
        a = dwt97_inverse(a, d)
    return a


# -- canonical Huffman over zigzag buckets --------------------------------------


class _BitWriter:
    __slots__ = ("_out", "_acc", "_nbits")

    def __init__(self):
        self._out = bytearray()
        self._acc = 0
        self._nbits = 0

    def write(self, code: int, nbits: int):
        acc = (self._acc << nbits) | code
        nbits += self._nbits
        while nbits >= 8:
            nbits -= 8
            self._out.append((acc >> nbits) & 0xFF)
        self._acc = acc & ((1 << nbits) - 1)
        self._nbits = nbits

    def finish(self) -> bytes:
        if self._nbits:
            self._out.append((self._acc << (8 - self._nbits)) & 0xFF)
            self._acc = 0
            self._nbits = 0
        return bytes(self._out)


class _BitReader:
    __slots__ = ("_data", "_pos", "_acc", "_nbits")

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self._acc = 0
        self._nbits = 0

    def read_bit(self) -> int:
        if self._nbits == 0:
            if self._pos >= len(self._data):
                raise DecodeError("payload exhausted mid-stream")
            self._acc = self._data[self._pos]
            self._pos += 1
            self._nbits = 8
        self._nbits -= 1
        return (self._acc >> self._nbits) & 1

    def read(self, nbits: int) -> int:
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value


def huffman_code_lengths(freqs: list[int]) -> list[int]:
    """Code length per symbol (0 when unused); a lone used symbol gets 1."""
    import heapq

    heap = [(f, i, ("leaf", i)) for i, f in enumerate(freqs) if f > 0]
    if not heap:
        return [0] * len(freqs)
    if len(heap) == 1:
        lengths = [0] * len(freqs)
        lengths[heap[0][1]] = 1
        return lengths
    heapq.heapify(heap)
    tick = len(freqs)  # tiebreaker keeps the tree deterministic
    while len(heap) > 1:
        f1, _, t1 = heapq.heappop(heap)
        f2, _, t2 = heapq.heappop(heap)
        heapq.heappush(heap, (f1 + f2, tick, ("node", t1, t2)))
        tick += 1
    lengths = [0] * len(freqs)

    stack = [(heap[0][2], 0)]
    while stack:
        node, depth = stack.pop()
        if node[0] == "leaf":
            lengths[node[1]] = depth
        else:
            stack.append((node[1], depth + 1))
            stack.append((node[2], depth + 1))
    return lengths


def canonical_codes(lengths: list[int]) -> dict[int, tuple[int, int]]:
    """Symbol -> (code, nbits) with codes assigned in (length, symbol) order."""
    order = sorted((l, s) for s, l in enumerate(lengths) if l > 0)
    codes = {}
    code = 0
    prev_len = 0
    for l, s in order:
        code <<= l - prev_len
        codes[s] = (code, l)
        code += 1
        prev_len = l
    return codes


class _CanonicalDecoder:
    def __init__(self, lengths: list[int]):
        order = sorted((l, s) for s, l in enumerate(lengths) if l > 0)
        self.symbols = [s for _, s in order]
        self.max_len = order[-1][0] if order else 0
        # per length: code of the first symbol and its index in `symbols`
        self.first_code = {}
        self.first_index = {}
        self.count = {}
        code = 0
        prev_len = 0
        for idx, (l, _) in enumerate(order):
            code <<= l - prev_len
            if l not in self.first_code:
                self.first_code[l] = code
                self.first_index[l] = idx
                self.count[l] = 0
            self.count[l] += 1
            code += 1
            prev_len = l

    def decode_symbol(self, reader: _BitReader) -> int:
        code = 0
        for l in range(1, self.max_len + 1):
            code = (code << 1) | reader.read_bit()
            if l in self.first_code:
                off = code - self.first_code[l]
                if 0 <= off < self.count[l]:
                    return self.symbols[self.first_index[l] + off]
        raise DecodeError("invalid Huffman code")


def _bucket(u: int) -> int:
    return u.bit_length()


def huffman_encode(values: np.ndarray) -> tuple[bytes, bytes]:
    """Returns (code-length table bytes, payload bytes)."""
    us = [zigzag(int(v)) for v in values]
    freqs = [0] * _ALPHABET
    for u in us:
        freqs[_bucket(u)] += 1
    lengths = huffman_code_lengths(freqs)
    codes = canonical_codes(lengths)
    w = _BitWriter()
    for u in us:
        k = _bucket(u)
        code, nbits = codes[k]
        w.write(code, nbits)
        if k >= 2:
            w.write(u - (1 << (k - 1)), k - 1)
    return bytes(lengths), w.finish()


def huffman_decode(table: bytes, payload: bytes, count: int) -> np.ndarray:
    if len(table) != _ALPHABET:
        raise FormatError(f"expected {_ALPHABET}-byte code table")
    out = np.empty(count, dtype=np.int32)
    if count == 0:
        return out
    lengths = list(table)
    if max(lengths) == 0:
        raise DecodeError("empty code table with nonzero symbol count")
    decoder = _CanonicalDecoder(lengths)
    r = _BitReader(payload)
    for i in range(count):
        k = decoder.decode_symbol(r)
        if k == 0:
            u = 0
        elif k == 1:
            u = 1
        else:
            u = (1 << (k - 1)) | r.read(k - 1)
        out[i] = unzigzag(u)
    return out


# -- codec --------------------------------------------------------------------


def _quantize(coeffs: list[np.ndarray], theta: float) -> np.ndarray:
    flat = np.concatenate(coeffs)
    q = np.floor(flat / theta + 0.5)
    if not np.all(np.isfinite(q)) or np.any(q < _INT32_MIN) or np.any(q > _INT32_MAX):
        raise QuantizerOverflowError(
            "quantized coefficient outside signed 32-bit range"
        )
    return q.astype(np.int32)


def _split_lengths(n: int, levels: int) -> list[int]:
    lens = [n >> levels]
    for j in range(levels, 0, -1):
        lens.append(n >> j)
    return lens


def wt_compress(x, cfg: WtConfig) -> bytes:
    """4-level (by default) CDF 9/7 analysis, uniform quantization with step
    theta, canonical Huffman coding."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) != cfg.block_len:
        raise ValueError(f"expected block of {cfg.block_len} samples, got {len(x)}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    return _compress_block(x, cfg, true_n=cfg.block_len)


def _compress_block(x: np.ndarray, cfg: WtConfig, true_n: int) -> bytes:
    coeffs = wavedec(x, cfg.levels)
    symbols = _quantize(coeffs, cfg.theta)
    table, payload = huffman_encode(symbols)
    checksum = zlib.crc32(np.ascontiguousarray(symbols, dtype="<i4").tobytes())
    head = _FIXED_HEADER.pack(MAGIC, VERSION, 0, true_n, cfg.levels, cfg.theta)
    return head + table + _TRAILER.pack(checksum, len(payload)) + payload


def _parse(data: bytes, offset: int = 0):
    if len(data) - offset < _FIXED_HEADER.size:
        raise FormatError("container header truncated")
    magic, version, _flags, n, levels, theta = _FIXED_HEADER.unpack_from(data, offset)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    pos = offset + _FIXED_HEADER.size
    if len(data) - pos < _ALPHABET + _TRAILER.size:
        raise FormatError("container header truncated")
    table = bytes(data[pos : pos + _ALPHABET])
    pos += _ALPHABET
    checksum, payload_len = _TRAILER.unpack_from(data, pos)
    pos += _TRAILER.size
    if len(data) - pos < payload_len:
        raise FormatError("container payload truncated")
    payload = bytes(data[pos : pos + payload_len])
    return (n, levels, theta, table, checksum, payload), pos + payload_len


def wt_decompress(data: bytes) -> np.ndarray:
    """Inverse of :func:`wt_compress` up to quantization loss."""
    (n, levels, theta, table, checksum, payload), used = _parse(data)
    if used != len(data):
        raise FormatError(f"{len(data) - used} trailing bytes after container")
    return _decompress_parsed(n, levels, theta, table, checksum, payload)


def _decompress_parsed(n, levels, theta, table, checksum, payload) -> np.ndarray:
    group = 1 << levels
    padded = -(-n // group) * group
    symbols = huffman_decode(table, payload, padded)
    if zlib.crc32(np.ascontiguousarray(symbols, dtype="<i4").tobytes()) != checksum:
        raise IntegrityError("decoded symbol stream fails checksum")
    flat = symbols.astype(np.float64) * theta
    coeffs = []
    pos = 0
    for m in _split_lengths(padded, levels):
        coeffs.append(flat[pos : pos + m])
        pos += m
    return waverec(coeffs)[:n]


def wt_compress_stream(samples, cfg: WtConfig) -> list[bytes]:
    """Blockwise compression; the ragged tail is zero-padded to the next
    multiple of 2^levels with the true length kept in the header."""
    samples = np.asarray(samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    n = len(samples)
    block = cfg.block_len
    out = []
    for start in range(0, n - n % block, block):
        out.append(wt_compress(samples[start : start + block], cfg))
    tail = n % block
    if tail:
        group = 1 << cfg.levels
        padded_len = -(-tail // group) * group
        padded = np.zeros(padded_len, dtype=np.float64)
        padded[:tail] = samples[n - tail :]
        tail_cfg = WtConfig(theta=cfg.theta, levels=cfg.levels, block_len=padded_len)
        out.append(_compress_block(padded, tail_cfg, true_n=tail))
    return out


def wt_decompress_stream(containers) -> np.ndarray:
    if not containers:
        return np.empty(0, dtype=np.float64)
    return np.concatenate([wt_decompress(c) for c in containers])


def split_containers(data: bytes) -> list[bytes]:
    """Split a concatenation of WTBL containers into the individual frames."""
    out = []
    offset = 0
    while offset < len(data):
        _, end = _parse(data, offset)
        out.append(bytes(data[offset:end]))
        offset = end
    return out


def wt_container_info(data: bytes) -> dict:
    (n, levels, theta, _table, _checksum, payload), _ = _parse(data)
    return {"n": n, "levels": levels, "theta": theta,
            "payload_bytes": len(payload)}
