"""Decoding algorithms: SC, SCL (conventional and pruned), SCF, SCO-1, BP."""

from .bp import bp_decode, bp_decode_batch
from .crc import CRC16, NO_CRC, CrcConfig, crc_attach, crc_check, crc_select
from .ml import ml_decode
from .result import DecodeResult
from .sc import (
    genie_error_matrix,
    path_transition_probs,
    sc_decode,
    sc_decode_batch,
    scf_decode,
    scf_decode_batch,
    sco1_decode,
    sco1_decode_batch,
)
from .scl import scl_decode, scl_decode_batch

__all__ = [
    "CRC16",
    "NO_CRC",
    "CrcConfig",
    "DecodeResult",
    "bp_decode",
    "bp_decode_batch",
    "crc_attach",
    "crc_check",
    "crc_select",
    "genie_error_matrix",
    "ml_decode",
    "path_transition_probs",
    "sc_decode",
    "sc_decode_batch",
    "scf_decode",
    "scf_decode_batch",
    "scl_decode",
    "scl_decode_batch",
    "sco1_decode",
    "sco1_decode_batch",
]
