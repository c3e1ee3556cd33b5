"""BPSK mapping, biAWGN transmission and a-posteriori soft demapping.

Bit polarity convention: bit 0 maps to +Delta, bit 1 to -Delta, with
Delta = 1.  The channel is symmetric, so the choice does not affect error
rates.  With E_s/N_0 given in dB, sigma^2 = 10^(-esn0_db/10).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .galois import GaloisField
from .pmf import normalize


@dataclass(frozen=True)
class ChannelParams:
    esn0_db: float
    delta: float = 1.0

    @property
    def sigma(self) -> float:
        return self.delta * 10.0 ** (-self.esn0_db / 20.0)


def _bit_patterns(q: int, r: int) -> np.ndarray:
    # row mu = its r bits, most significant first
    return (np.arange(q)[:, None] >> np.arange(r - 1, -1, -1)) & 1


def modulate(f: GaloisField, c: np.ndarray) -> np.ndarray:
    """Expand each symbol MSB-first into r BPSK amplitudes (+1 for bit 0)."""
    c = np.asarray(c, dtype=np.int64)
    shifts = np.arange(f.r - 1, -1, -1)
    bits = (c[..., None] >> shifts) & 1
    x = 1.0 - 2.0 * bits
    return x.reshape(c.shape[:-1] + (-1,))


def transmit(x: np.ndarray, params: ChannelParams, rng: np.random.Generator) -> np.ndarray:
    if params.sigma == 0.0:
        return np.array(x, dtype=np.float64, copy=True)
    return x + params.sigma * rng.standard_normal(np.shape(x))


def bit_app_zero(y: np.ndarray, params: ChannelParams) -> np.ndarray:
    """P(X = +Delta | y) per channel use, assuming equiprobable signalling.

    Equals expit(2*Delta*y/sigma^2); written with tanh for numerical
    stability.  sigma = 0 degenerates to a hard decision.
    """
    y = np.asarray(y, dtype=np.float64)
    if params.sigma == 0.0:
        return np.where(y > 0, 1.0, np.where(y < 0, 0.0, 0.5))
    return 0.5 * (1.0 + np.tanh(params.delta * y / params.sigma**2))


def demap_bits(y: np.ndarray, params: ChannelParams) -> np.ndarray:
    """A-posteriori pairs (P(X=+Delta|y), P(X=-Delta|y)) per channel use."""
    p0 = bit_app_zero(y, params)
    return np.stack([p0, 1.0 - p0], axis=-1)


def bits_to_symbol_pmf(apps: np.ndarray, f: GaloisField) -> np.ndarray:
    """Combine r consecutive bit APPs into one pmf per code symbol.

    ``apps[..., j, :]`` is the (P(bit=0), P(bit=1)) pair of channel use j;
    entry mu of the output is the product of the APPs of mu's MSB-first
    bit expansion.
    """
    apps = np.asarray(apps, dtype=np.float64)
    n = apps.shape[-2]
    if n % f.r:
        raise ValueError(f"{n} channel uses not divisible by r={f.r}")
    pat = _bit_patterns(f.q, f.r)
    g = apps.reshape(apps.shape[:-2] + (n // f.r, f.r, 2))
    out = np.ones(g.shape[:-2] + (f.q,))
    for v in range(f.r):
        out *= g[..., v, :][..., pat[:, v]]
    return normalize(out)
