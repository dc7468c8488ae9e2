"""Reduced-complexity soft-output decoding of polar codes."""

from .code import (
    CodeError,
    NodeClass,
    PolarCode,
    classify_tree,
    construct_frozen_set,
    encode,
    is_valid_codeword,
    load_frozen_file,
    save_frozen_file,
)
from .decoders import (
    DecodeResult,
    Decoder,
    DecoderConfig,
    bp_decode,
    decode,
    rcsc_decode,
    scan_decode,
    srcsc_decode,
)
from .llr import QuantSpec, f_minsum, quantize_channel, sat_add
from .memory import MessageMemory, accounted_llrs, alloc, e_index, s_index

__version__ = "0.1.0"
