"""Lossy compression toolkit for one-dimensional sensor signals, built on
multi-level divisor-radix cosine block transforms."""

from .codec import (
    CodecConfig,
    CompressedContainer,
    compress,
    compress_stream,
    decompress,
    decompress_stream,
    iter_containers,
)
from .errors import (
    CodecError,
    DecodeError,
    FormatError,
    IntegrityError,
    QuantizerOverflowError,
)
from .metrics import MetricsReport, cr, evaluate, max_deviation, prd, qs, snr
from .quantize import QuantizedPyramid, QuantizerParams, dequantize, quantize
from .transform import (
    DecompositionPlan,
    DivisorBasis,
    Subband2D,
    SubbandPyramid,
    build_cosine_basis,
    build_haar_basis,
    decompose,
    decompose_2d,
    forward_block,
    inverse_block,
    reconstruct,
    reconstruct_2d,
)
from .wtbaseline import WtConfig, wt_compress, wt_decompress

__version__ = "0.1.0"

__all__ = [
    "CodecConfig", "CompressedContainer", "compress", "compress_stream",
    "decompress", "decompress_stream", "iter_containers",
    "CodecError", "DecodeError", "FormatError", "IntegrityError",
    "QuantizerOverflowError",
    "MetricsReport", "cr", "evaluate", "max_deviation", "prd", "qs", "snr",
    "QuantizedPyramid", "QuantizerParams", "dequantize", "quantize",
    "DecompositionPlan", "DivisorBasis", "Subband2D", "SubbandPyramid",
    "build_cosine_basis", "build_haar_basis", "decompose", "decompose_2d",
    "forward_block", "inverse_block", "reconstruct", "reconstruct_2d",
    "WtConfig", "wt_compress", "wt_decompress",
    "__version__",
]
