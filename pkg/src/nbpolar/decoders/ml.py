"""Brute-force maximum likelihood decoding for tiny codes (test oracle)."""

from __future__ import annotations

import numpy as np

from ..code import CodeSpec, encode
from .result import DecodeResult
from .sc import _check_pmfs

_MAX_SPACE = 1 << 20


def enumerate_messages(spec: CodeSpec) -> np.ndarray:
    """All valid u vectors (every u_i in S(u_i)), in mixed-radix order."""
    sizes = spec.s_sizes
    total = int(np.prod(sizes, dtype=np.int64))
    if total > _MAX_SPACE:
        raise ValueError(f"message space {total} exceeds the brute-force limit {_MAX_SPACE}")
    u = np.zeros((total, spec.n_c), dtype=np.int64)
    stride = total
    idx = np.arange(total)
    for i, s in enumerate(sizes):
        stride //= int(s)
        u[:, i] = (idx // stride) % s
    return u


def ml_decode(spec: CodeSpec, ch_pmfs: np.ndarray) -> DecodeResult:
    """Exhaustive argmax of prod_i P(c_i | y); exact MAP under a uniform prior."""
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    if ch_pmfs.ndim != 2:
        raise ValueError("ml_decode handles one frame at a time")
    u = enumerate_messages(spec)
    c = encode(spec, u)
    with np.errstate(divide="ignore"):
        scores = np.log(ch_pmfs[np.arange(spec.n_c), c]).sum(axis=1)
    best = int(np.argmax(scores))
    return DecodeResult(u_hat=u[best])
