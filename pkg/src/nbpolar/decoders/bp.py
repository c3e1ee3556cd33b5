"""Belief propagation on the q-ary polar encoding graph.

The graph has log2(n_c) stages of butterflies between n_c-wide columns
of degree-two variable nodes; pmf messages travel in both directions.
One iteration sweeps every stage rightward (toward the channel) and then
leftward, using freshly updated messages within the sweep.  Decoding
stops early once the hard decisions on both boundaries are consistent
under re-encoding.

Per butterfly with west-side inputs (R1, R2) and east-side inputs
(L1, L2), writing P* for the multiply permutations:

    L_u1 = norm(CN(L1, Pa(VN(Pb^-1(L2), R2))))
    L_u2 = norm(VN(Pa^-1(CN(L1, R1)), Pb^-1(L2)))
    R_c1 = norm(CN(R1, Pa(VN(Pb^-1(L2), R2))))
    R_c2 = norm(Pb(VN(Pa^-1(CN(L1, R1)), R2)))
"""

from __future__ import annotations

import numpy as np

from ..code import CodeSpec, encode
from .result import DecodeResult
from .sc import _check_pmfs, _cn, _vn


def _priors(spec: CodeSpec) -> np.ndarray:
    """Rightward boundary: delta at zero when fully frozen, else uniform on S."""
    q = spec.field.q
    p = np.zeros((spec.n_c, q))
    for i, s in enumerate(spec.s_sizes):
        p[i, :s] = 1.0 / s
    return p


def bp_decode_batch(spec: CodeSpec, ch_pmfs: np.ndarray, i_max: int):
    """Flooding BP over a batch; returns (u_hat, iterations used)."""
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    B = ch_pmfs.shape[0]
    n_c, q = spec.n_c, spec.field.q
    m = n_c.bit_length() - 1
    tab = spec.tables
    stages = spec._stage_idx

    prior = np.broadcast_to(_priors(spec), (B, n_c, q)).copy()
    right = np.full((m + 1, B, n_c, q), 1.0 / q)
    left = np.full((m + 1, B, n_c, q), 1.0 / q)
    right[0] = prior
    left[m] = ch_pmfs

    u_hat = np.zeros((B, n_c), dtype=np.int64)
    iters = np.full(B, i_max, dtype=np.int64)
    active = np.arange(B)

    for it in range(1, i_max + 1):
        for s in range(1, m + 1):
            i1, i2 = stages[s - 1]
            r1, r2 = right[s - 1][:, i1], right[s - 1][:, i2]
            l1, l2 = left[s][:, i1], left[s][:, i2]
            wv = _vn(l2[..., tab.perm_inv_beta], r2)[..., tab.perm_alpha]
            wc = _cn(l1, r1)[..., tab.perm_inv_alpha]
            right[s][:, i1] = _cn(r1, wv)
            right[s][:, i2] = _vn(wc, r2)[..., tab.perm_beta]
        for s in range(m, 0, -1):
            i1, i2 = stages[s - 1]
            r1, r2 = right[s - 1][:, i1], right[s - 1][:, i2]
            l1, l2 = left[s][:, i1], left[s][:, i2]
            l2b = l2[..., tab.perm_inv_beta]
            wv = _vn(l2b, r2)[..., tab.perm_alpha]
            wc = _cn(l1, r1)[..., tab.perm_inv_alpha]
            left[s - 1][:, i1] = _cn(l1, wv)
            left[s - 1][:, i2] = _vn(wc, l2b)

        u = (right[0] * left[0]).argmax(axis=-1)
        c = (left[m] * right[m]).argmax(axis=-1)
        done = (encode(spec, u) == c).all(axis=1)
        if it == i_max:
            u_hat[active] = u
            break
        if done.any():
            u_hat[active[done]] = u[done]
            iters[active[done]] = it
            keep = ~done
            if not keep.any():
                break
            active = active[keep]
            right = right[:, keep]
            left = left[:, keep]
    return u_hat, iters


def bp_decode(spec: CodeSpec, ch_pmfs: np.ndarray, i_max: int) -> DecodeResult:
    u, iters = bp_decode_batch(spec, ch_pmfs[None], i_max)
    return DecodeResult(u_hat=u[0], iterations=int(iters[0]))
