"""Adaptive binary arithmetic coding of quantized integer streams.

Wire scheme (see FORMAT.md for the normative description):

* signed values are zigzag-mapped to unsigned,
* the number of significant bits of the unsigned value (its "bucket",
  0..32) is sent as a unary run of 1s plus a 0 terminator, each bit coded
  with an adaptive context indexed by its position in the run,
* for buckets >= 2 the magnitude's bits below the implicit leading 1 are
  coded in bypass mode (fixed 1/2 probability), most significant first.

Two independent context sets exist per stream: one for the leading
"average" symbols, one for the remaining "detail" symbols.  All state is
integer arithmetic, so output bytes are identical across platforms.
"""

from __future__ import annotations

import numpy as np

from .errors import DecodeError

_TOP = 0xFFFFFFFF
_HALF = 0x80000000
_QUARTER = 0x40000000
_THREE_QUARTER = 0xC0000000

_MAX_BUCKET = 32          # zigzagged int32 values need at most 32 bits
_RESCALE = 1 << 16        # halve context counts when they reach this total
_READ_SLACK_BITS = 64     # tolerated reads past payload end before erroring

_INT32_MIN = -(2**31)
_INT32_MAX = 2**31 - 1


def zigzag(v: int) -> int:
    """Map signed to unsigned interleaving signs: 0,-1,1,-2,2 -> 0,1,2,3,4."""
    return (v << 1) if v >= 0 else ((-v << 1) - 1)


def unzigzag(u: int) -> int:
    return (u >> 1) if (u & 1) == 0 else -((u + 1) >> 1)


class _ContextSet:
    """Per-position adaptive bit counts for the unary bucket code."""

    __slots__ = ("c0", "c1")

    def __init__(self):
        self.c0 = [1] * _MAX_BUCKET
        self.c1 = [1] * _MAX_BUCKET


class Encoder:
    """Single-use binary arithmetic encoder (32-bit state, pending-bit
    renormalization)."""

    __slots__ = ("low", "high", "pending", "_acc", "_nbits", "_out")

    def __init__(self):
        self.low = 0
        self.high = _TOP
        self.pending = 0
        self._acc = 0
        self._nbits = 0
        self._out = bytearray()

    def _emit(self, bit: int):
        acc = (self._acc << 1) | bit
        nbits = self._nbits + 1
        if nbits == 8:
            self._out.append(acc)
            acc = 0
            nbits = 0
        self._acc = acc
        self._nbits = nbits

    def _emit_with_pending(self, bit: int):
        self._emit(bit)
        inv = 1 - bit
        while self.pending:
            self._emit(inv)
            self.pending -= 1

    def _renorm(self):
        low = self.low
        high = self.high
        while True:
            if high < _HALF:
                self._emit_with_pending(0)
            elif low >= _HALF:
                self._emit_with_pending(1)
                low -= _HALF
                high -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTER:
                self.pending += 1
                low -= _QUARTER
                high -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        self.low = low
        self.high = high

    def encode_bit(self, bit: int, c0: int, c1: int):
        rng = self.high - self.low + 1
        split = self.low + rng * c0 // (c0 + c1) - 1
        if bit == 0:
            self.high = split
        else:
            self.low = split + 1
        self._renorm()

    def encode_bypass(self, bit: int):
        split = self.low + ((self.high - self.low + 1) >> 1) - 1
        if bit == 0:
            self.high = split
        else:
            self.low = split + 1
        self._renorm()

    def finish(self) -> bytes:
        self.pending += 1
        self._emit_with_pending(0 if self.low < _QUARTER else 1)
        if self._nbits:
            self._out.append((self._acc << (8 - self._nbits)) & 0xFF)
            self._nbits = 0
        return bytes(self._out)


class Decoder:
    """Single-use mirror of :class:`Encoder`.

    Reading a bounded number of bits past the payload end is legitimate
    (the encoder's final flush is short); anything beyond that margin means
    the payload was truncated and raises DecodeError.
    """

    __slots__ = ("low", "high", "value", "_data", "_pos", "_acc", "_nbits",
                 "_overrun")

    def __init__(self, data: bytes):
        self.low = 0
        self.high = _TOP
        self._data = data
        self._pos = 0
        self._acc = 0
        self._nbits = 0
        self._overrun = 0
        value = 0
        for _ in range(32):
            value = (value << 1) | self._read_bit()
        self.value = value

    def _read_bit(self) -> int:
        nbits = self._nbits
        if nbits == 0:
            pos = self._pos
            if pos >= len(self._data):
                self._overrun += 1
                if self._overrun * 8 > _READ_SLACK_BITS:
                    raise DecodeError("payload exhausted mid-stream")
                self._acc = 0
            else:
                self._acc = self._data[pos]
                self._pos = pos + 1
            nbits = 8
        bit = (self._acc >> (nbits - 1)) & 1
        self._nbits = nbits - 1
        return bit

    def _renorm(self):
        low = self.low
        high = self.high
        value = self.value
        while True:
            if high < _HALF:
                pass
            elif low >= _HALF:
                low -= _HALF
                high -= _HALF
                value -= _HALF
            elif low >= _QUARTER and high < _THREE_QUARTER:
                low -= _QUARTER
                high -= _QUARTER
                value -= _QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            value = (value << 1) | self._read_bit()
        self.low = low
        self.high = high
        self.value = value

    def decode_bit(self, c0: int, c1: int) -> int:
        rng = self.high - self.low + 1
        split = self.low + rng * c0 // (c0 + c1) - 1
        if self.value <= split:
            bit = 0
            self.high = split
        else:
            bit = 1
            self.low = split + 1
        self._renorm()
        return bit

    def decode_bypass(self) -> int:
        split = self.low + ((self.high - self.low + 1) >> 1) - 1
        if self.value <= split:
            bit = 0
            self.high = split
        else:
            bit = 1
            self.low = split + 1
        self._renorm()
        return bit


def _put_symbol(enc: Encoder, ctx: _ContextSet, v: int):
    u = zigzag(v)
    k = u.bit_length()
    c0 = ctx.c0
    c1 = ctx.c1
    for i in range(k):
        enc.encode_bit(1, c0[i], c1[i])
        c1[i] += 1
        if c0[i] + c1[i] >= _RESCALE:
            c0[i] = max(1, c0[i] >> 1)
            c1[i] = max(1, c1[i] >> 1)
    if k < _MAX_BUCKET:
        enc.encode_bit(0, c0[k], c1[k])
        c0[k] += 1
        if c0[k] + c1[k] >= _RESCALE:
            c0[k] = max(1, c0[k] >> 1)
            c1[k] = max(1, c1[k] >> 1)
    for shift in range(k - 2, -1, -1):
        enc.encode_bypass((u >> shift) & 1)


def _get_symbol(dec: Decoder, ctx: _ContextSet) -> int:
    c0 = ctx.c0
    c1 = ctx.c1
    k = 0
    while k < _MAX_BUCKET:
        bit = dec.decode_bit(c0[k], c1[k])
        if bit:
            c1[k] += 1
        else:
            c0[k] += 1
        if c0[k] + c1[k] >= _RESCALE:
            c0[k] = max(1, c0[k] >> 1)
            c1[k] = max(1, c1[k] >> 1)
        if not bit:
            break
        k += 1
    if k == 0:
        return 0
    u = 1
    for _ in range(k - 1):
        u = (u << 1) | dec.decode_bypass()
    return unzigzag(u)


def encode(values, split: int = 0) -> bytes:
    """Losslessly encode a sequence of int32 values.

    The first ``split`` symbols use the "average" context set, the rest the
    "detail" set; pass the same split to :func:`decode`.
    """
    enc = Encoder()
    avg_ctx = _ContextSet()
    det_ctx = _ContextSet()
    for idx, v in enumerate(values):
        v = int(v)
        if v < _INT32_MIN or v > _INT32_MAX:
            raise ValueError(f"symbol {v} outside signed 32-bit range")
        _put_symbol(enc, avg_ctx if idx < split else det_ctx, v)
    return enc.finish()


def decode(payload: bytes, count: int, split: int = 0) -> np.ndarray:
    """Decode exactly ``count`` symbols; raises DecodeError on truncated or
    badly corrupted payloads (final integrity is the container checksum)."""
    if count < 0:
        raise ValueError("count must be non-negative")
    out = np.empty(count, dtype=np.int32)
    if count == 0:
        return out
    if len(payload) == 0:
        raise DecodeError("empty payload")  # encode always emits >= 1 byte
    dec = Decoder(payload)
    avg_ctx = _ContextSet()
    det_ctx = _ContextSet()
    for idx in range(count):
        out[idx] = _get_symbol(dec, avg_ctx if idx < split else det_ctx)
    return out
