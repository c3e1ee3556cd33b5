"""Probability-domain message operations on length-q vectors.

Messages are plain float64 ndarrays whose last axis has length q (a power
of two); every operation here is vectorised over arbitrary leading axes.
The check-node update is an XOR-convolution, diagonalised by the
Walsh-Hadamard transform; a direct O(q^2) convolution is kept as an
independent oracle.

Underflow policy: check/variable-node outputs are floored at EPS before
normalising, so deep recursions never produce an all-zero message.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

EPS = 1e-30


@lru_cache(maxsize=None)
def _hadamard(n: int) -> np.ndarray:
    if n & (n - 1) or n < 1:
        raise ValueError(f"transform length must be a power of two, got {n}")
    h = np.array([[1.0]])
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    h.setflags(write=False)
    return h


@lru_cache(maxsize=None)
def _xor_table(q: int) -> np.ndarray:
    idx = np.arange(q)
    t = idx[:, None] ^ idx[None, :]
    t.setflags(write=False)
    return t


def uniform(q: int) -> np.ndarray:
    return np.full(q, 1.0 / q)


def delta(q: int, value: int) -> np.ndarray:
    p = np.zeros(q)
    p[value] = 1.0
    return p


def normalize(p: np.ndarray) -> np.ndarray:
    """Scale so the last axis sums to 1; an all-zero vector becomes uniform."""
    p = np.asarray(p, dtype=np.float64)
    s = p.sum(axis=-1, keepdims=True)
    q = p.shape[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(s > 0.0, p / np.where(s > 0.0, s, 1.0), 1.0 / q)
    return out


def apply_perm(p: np.ndarray, perm: np.ndarray) -> np.ndarray:
    p = np.asarray(p)
    if p.shape[-1] != len(perm):
        raise ValueError(f"pmf length {p.shape[-1]} != permutation length {len(perm)}")
    return p[..., perm]


def fht(v: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis.

    Self-inverse up to the factor q: fht(fht(v)) == q * v.  Realised as a
    Kronecker factorisation H_a (x) H_b evaluated with two batched matmuls,
    which is considerably faster than a strided butterfly loop in numpy.
    """
    v = np.asarray(v, dtype=np.float64)
    n = v.shape[-1]
    if n & (n - 1) or n < 1:
        raise ValueError(f"transform length must be a power of two, got {n}")
    if n <= 64:
        return v @ _hadamard(n)
    a = 1 << (n.bit_length() // 2)
    b = n // a
    lead = v.shape[:-1]
    z = v.reshape(lead + (a, b))
    return (_hadamard(a) @ z @ _hadamard(b)).reshape(lead + (n,))


def cn_update(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pmf of A+B over GF(2^r) addition (XOR-convolution), normalised.

    O(q log q) via the Hadamard transform; tiny negative entries from
    rounding are clamped before normalisation.
    """
    c = fht(fht(a) * fht(b))
    np.maximum(c, EPS, out=c)
    return normalize(c)


def cn_update_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """O(q^2) XOR-convolution, the independent oracle for cn_update."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    q = a.shape[-1]
    if b.shape[-1] != q:
        raise ValueError("pmf lengths differ")
    t = _xor_table(q)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    for mu in range(q):
        out[..., mu] = (a * b[..., t[mu]]).sum(axis=-1)
    np.maximum(out, EPS, out=out)
    return normalize(out)


def vn_update(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product of two observations of the same symbol, normalised.

    An identically-zero product (contradictory observations) comes out
    uniform through the flooring rule.
    """
    c = np.asarray(a, dtype=np.float64) * np.asarray(b, dtype=np.float64)
    np.maximum(c, EPS, out=c)
    return normalize(c)
