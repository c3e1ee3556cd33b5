"""Systematic CRC attach/check and CRC-aided list selection.

Default generator is the 16-bit CCITT polynomial x^16 + x^12 + x^5 + 1
with zero initial state; the remainder is appended MSB-first after the
message.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CrcConfig:
    length: int = 16
    poly: int = 0x1021  # generator without the leading x^length term

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("CRC length must be >= 0")
        if self.length and self.poly >> self.length:
            raise ValueError("generator wider than the CRC length")


CRC16 = CrcConfig()
NO_CRC = CrcConfig(length=0, poly=0)


def crc_remainder(bits: np.ndarray, cfg: CrcConfig) -> np.ndarray:
    """Remainder of message(x) * x^length modulo the generator."""
    bits = np.asarray(bits, dtype=np.int64)
    reg = np.zeros(bits.shape[:-1], dtype=np.int64)
    if cfg.length == 0:
        return reg
    mask = (1 << cfg.length) - 1
    topshift = cfg.length - 1
    for j in range(bits.shape[-1]):
        fb = ((reg >> topshift) & 1) ^ bits[..., j]
        reg = ((reg << 1) & mask) ^ fb * cfg.poly
    return reg


def crc_attach(bits: np.ndarray, cfg: CrcConfig) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    if cfg.length == 0:
        return bits.copy()
    rem = crc_remainder(bits, cfg)
    shifts = np.arange(cfg.length - 1, -1, -1)
    crc_bits = (rem[..., None] >> shifts) & 1
    return np.concatenate([bits, crc_bits], axis=-1)


def crc_check(bits: np.ndarray, cfg: CrcConfig) -> np.ndarray:
    """True where the trailing CRC matches; scalar bool for a single vector."""
    bits = np.asarray(bits, dtype=np.int64)
    if cfg.length == 0:
        return np.ones(bits.shape[:-1], dtype=bool) if bits.ndim > 1 else True
    ok = crc_remainder(bits, cfg) == 0
    return bool(ok) if ok.ndim == 0 else ok


def crc_select(spec, result, cfg: CrcConfig):
    """Pick the best-metric list candidate that passes the CRC.

    Updates ``result`` in place with the chosen path, its message bits and
    the crc_passed flag; falls back to the best-metric path when nothing
    passes.  Returns the message bits.
    """
    from ..code import extract_payload

    cands = result.candidates
    if cands is None or len(cands) == 0:
        raise ValueError("decode result carries no candidates")
    payload = extract_payload(spec, cands)
    ok = crc_check(payload, cfg)
    if cfg.length == 0:
        chosen = 0
    else:
        chosen = int(np.argmax(ok)) if ok.any() else 0
    result.u_hat = cands[chosen]
    result.crc_passed = bool(ok[chosen]) if cfg.length else None
    result.message_bits = payload[chosen][: spec.k]
    return result.message_bits
