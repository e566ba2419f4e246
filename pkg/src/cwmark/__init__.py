"""Constant-weight-code watermarking of model weight vectors.

A k-bit message maps bijectively onto a length-L binary codeword with
exactly alpha ones (enumerative coding). The codeword is projected onto
L secretly selected weights by pushing 1-positions to magnitude >= t1
and capping 0-positions at t0 < t1. Detection reads the alpha largest
magnitudes back, so the mark survives magnitude pruning up to a rate of
1 - alpha/L by design, and the thresholds are sized from the Gaussian
quantiles of the host weight distribution.
"""

from .codec import (
    CodeParams,
    ParamSearchResult,
    as_bits,
    binomial,
    bits_to_int,
    decode,
    decode_index,
    encode,
    encode_index,
    find_params,
    find_params_for_tolerance,
    int_to_bits,
)
from .errors import (
    BadMagicError,
    CapacityError,
    CwmarkError,
    MalformedCodewordError,
    MessageRangeError,
    NonFiniteWeightError,
    PositionRangeError,
    SelectionRatioError,
    SpecFormatError,
    ThresholdDesignError,
    TrailingDataError,
    TruncatedPayloadError,
    UnsupportedVersionError,
    WeightFileError,
)
from .stats import (
    GaussianModel,
    ThresholdPair,
    design_t1,
    design_thresholds,
    estimate_sigma,
    q_function,
    q_inverse,
    sample_gaussian_weights,
    standard_normals,
)
from .watermark import (
    DENSITY_LIMIT,
    EmbedReceipt,
    EmbedSpec,
    embed,
    embed_message,
    embed_message_blocks,
    extract,
    extract_message,
    extract_message_blocks,
    join_blocks,
    select_positions,
    split_blocks,
)
from .attacks import PruneSpec, add_noise, prune, targeted_flip_attack
from .model_io import SpecDocument, read_spec, read_weights, write_spec, write_weights

__version__ = "0.1.0"

__all__ = [
    "BadMagicError",
    "CapacityError",
    "CodeParams",
    "CwmarkError",
    "DENSITY_LIMIT",
    "EmbedReceipt",
    "EmbedSpec",
    "GaussianModel",
    "MalformedCodewordError",
    "MessageRangeError",
    "NonFiniteWeightError",
    "ParamSearchResult",
    "PositionRangeError",
    "PruneSpec",
    "SelectionRatioError",
    "SpecDocument",
    "SpecFormatError",
    "ThresholdDesignError",
    "ThresholdPair",
    "TrailingDataError",
    "TruncatedPayloadError",
    "UnsupportedVersionError",
    "WeightFileError",
    "add_noise",
    "as_bits",
    "binomial",
    "bits_to_int",
    "decode",
    "decode_index",
    "design_t1",
    "design_thresholds",
    "embed",
    "embed_message",
    "embed_message_blocks",
    "encode",
    "encode_index",
    "estimate_sigma",
    "extract",
    "extract_message",
    "extract_message_blocks",
    "find_params",
    "find_params_for_tolerance",
    "int_to_bits",
    "join_blocks",
    "prune",
    "q_function",
    "q_inverse",
    "read_spec",
    "read_weights",
    "sample_gaussian_weights",
    "select_positions",
    "split_blocks",
    "standard_normals",
    "targeted_flip_attack",
    "write_spec",
    "write_weights",
]
