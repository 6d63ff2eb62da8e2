"""Compressed-gap set representations: entropy measures, self-delimiting gap
codes, and a two-level rank/select dictionary over sorted integer sets."""

from .errors import CgapError, FormatError, VerificationError
from .gapcore import (
    GapStream,
    MeasureReport,
    SortedSet,
    binom_bound,
    gap_measure,
    gaps_from_set,
    h0_gaps,
    measure_report,
    set_from_gaps,
    u_h0,
    z_delta,
    z_gamma,
)
from .codec import (
    Codebook,
    EncodedStream,
    HuffmanBook,
    build_codebook,
    decode_all,
    decode_at,
    delta_decode,
    delta_encode,
    delta_length,
    encode_stream,
    gamma_decode,
    gamma_encode,
    gamma_length,
    huffman_build,
    huffman_decode,
    huffman_encode,
)
from .bitvec import RsBitvector
from .bsd import Bsd, QueryStats, bsd_build, bsd_elements, bsd_rank, bsd_select
from .fid import (
    Fid,
    SpaceReport,
    deserialize,
    fid_build,
    fid_elements,
    fid_rank,
    fid_select,
    fid_space_report,
    serialize,
    verify_index,
)
from .simgen import SimSpec, binomial_gaps, rank_universe, table_csv, uniform_gaps

__version__ = "0.1.0"

__all__ = [
    "CgapError",
    "FormatError",
    "VerificationError",
    "SortedSet",
    "GapStream",
    "MeasureReport",
    "gaps_from_set",
    "set_from_gaps",
    "gap_measure",
    "z_gamma",
    "z_delta",
    "h0_gaps",
    "binom_bound",
    "u_h0",
    "measure_report",
    "gamma_encode",
    "gamma_decode",
    "gamma_length",
    "delta_encode",
    "delta_decode",
    "delta_length",
    "Codebook",
    "EncodedStream",
    "HuffmanBook",
    "build_codebook",
    "encode_stream",
    "decode_at",
    "decode_all",
    "huffman_build",
    "huffman_encode",
    "huffman_decode",
    "RsBitvector",
    "Bsd",
    "QueryStats",
    "bsd_build",
    "bsd_rank",
    "bsd_select",
    "bsd_elements",
    "Fid",
    "SpaceReport",
    "fid_build",
    "fid_rank",
    "fid_select",
    "fid_elements",
    "fid_space_report",
    "serialize",
    "deserialize",
    "verify_index",
    "SimSpec",
    "uniform_gaps",
    "binomial_gaps",
    "rank_universe",
    "table_csv",
    "__version__",
]
