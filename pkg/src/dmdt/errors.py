"""Exception types shared across the codec."""


class CodecError(Exception):
    """Base class for all container/bitstream failures."""


class FormatError(CodecError):
    """Container is malformed: bad magic, unsupported version, truncated header."""


class IntegrityError(CodecError):
    """Decoded symbol stream does not match the header checksum."""


class DecodeError(CodecError):
    """Entropy decoder ran out of payload bits; the payload is truncated or corrupt."""


class QuantizerOverflowError(CodecError):
    """A quantized coefficient does not fit in a signed 32-bit integer."""
