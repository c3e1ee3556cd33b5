"""Successive cancellation list decoding with an optional pruned tree.

Paths are tracked as lanes of batched arrays, so the butterfly updates
run vectorised over frames x paths.  Forking happens only at leaves; the
per-level messages saved while descending are copied lazily: each saved
tensor is tagged with the fork epoch it was computed at, and gathered
through the composed survivor genealogy the next time it is read.  A
naive copy-everything implementation produces identical output.

Path metrics are probabilities, multiplied per phase by the transition
probability of the chosen symbol and renormalised by the phase maximum
across live paths.  Pruning drops a survivor whose metric falls below
delta1 times the best or delta2 times its sorted neighbour; with
delta1 = delta2 = 0 the decoder is conventional SCL, with 1 it degrades
to plain SC.
"""

from __future__ import annotations

import numpy as np

from ..code import CodeSpec
from .result import DecodeResult
from .sc import _check_pmfs, _cn, _vn


def _gather_lanes(arr: np.ndarray, lane_map: np.ndarray | None) -> np.ndarray:
    """Reindex the lane axis (axis 1); a single shared lane needs no copy."""
    if lane_map is None or arr.shape[1] == 1:
        return arr
    idx = lane_map.reshape(lane_map.shape + (1,) * (arr.ndim - 2))
    return np.take_along_axis(arr, idx, axis=1)


class _ListState:
    def __init__(self, spec: CodeSpec, batch: int, list_size: int, delta1: float, delta2: float):
        self.spec = spec
        self.L = list_size
        self.d1 = delta1
        self.d2 = delta2
        self.B = batch
        self.pm = np.ones((batch, 1))
        self.alive = np.ones((batch, 1), dtype=bool)
        self.u_hat = np.zeros((batch, 1, spec.n_c), dtype=np.int64)
        self.n_node = np.zeros(batch, dtype=np.int64)
        self.scale_log = np.zeros(batch)
        self.fork_maps: list[np.ndarray] = []

    @property
    def epoch(self) -> int:
        return len(self.fork_maps)

    def lane_map_to(self, epoch: int) -> np.ndarray | None:
        """Map current lanes back to the lanes alive at ``epoch``."""
        if epoch == self.epoch:
            return None
        m = self.fork_maps[-1]
        for e in range(self.epoch - 2, epoch - 1, -1):
            m = np.take_along_axis(self.fork_maps[e], m, axis=1)
        return m

    def leaf(self, phase: int, pmfs: np.ndarray) -> np.ndarray:
        """Fork each live path on one symbol; select, prune, renormalise."""
        B, lanes = self.pm.shape
        s = int(self.spec.s_sizes[phase])
        scores = self.pm[:, :, None] * pmfs[:, :, 0, :s]
        scores[~self.alive] = -np.inf
        flat = scores.reshape(B, lanes * s)
        # descending metric; stable, so ties keep (parent, symbol) order
        order = np.argsort(-flat, axis=1, kind="stable")[:, : min(self.L, lanes * s)]
        parent = order // s
        sym = order % s
        pm = np.take_along_axis(flat, order, axis=1)
        alive = np.take_along_axis(self.alive, parent, axis=1) & (pm > -np.inf)

        if self.d1 > 0.0 or self.d2 > 0.0:
            drop = (pm < self.d1 * pm[:, :1]) | (pm < self.d2 * np.concatenate([pm[:, :1], pm[:, :-1]], axis=1))
            drop[:, 0] = False
            alive &= ~drop
            if drop.any():
                # repack so live lanes stay a metric-sorted prefix
                repack = np.argsort(~alive, axis=1, kind="stable")
                pm = np.take_along_axis(pm, repack, axis=1)
                alive = np.take_along_axis(alive, repack, axis=1)
                parent = np.take_along_axis(parent, repack, axis=1)
                sym = np.take_along_axis(sym, repack, axis=1)

        keep = max(1, int(alive.sum(axis=1).max()))
        pm, alive, parent, sym = pm[:, :keep], alive[:, :keep], parent[:, :keep], sym[:, :keep]
        pm = np.where(alive, pm, 0.0)
        self.scale_log += np.log(pm[:, 0])
        pm /= pm[:, :1]
        self.n_node += alive.sum(axis=1)

        self.fork_maps.append(parent)
        self.u_hat = np.take_along_axis(self.u_hat, parent[:, :, None], axis=1)
        self.u_hat[:, :, phase] = sym
        self.pm = pm
        self.alive = alive
        return sym[:, :, None]


def scl_decode_batch(
    spec: CodeSpec,
    ch_pmfs: np.ndarray,
    list_size: int,
    delta1: float = 0.0,
    delta2: float = 0.0,
):
    """List-decode a batch; returns (candidates, pms, alive, n_node).

    Candidates come back sorted by descending path metric with the live
    paths as a prefix (``alive`` marks them).
    """
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    if not 0.0 <= delta1 <= delta2 <= 1.0:
        raise ValueError("pruning thresholds need 0 <= delta1 <= delta2 <= 1")
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    tab = spec.tables
    state = _ListState(spec, ch_pmfs.shape[0], list_size, delta1, delta2)

    def rec(pmfs: np.ndarray, epoch_in: int, phase0: int) -> np.ndarray:
        size = pmfs.shape[2]
        if size == 1:
            return state.leaf(phase0, pmfs)
        half = size // 2
        a = pmfs[:, :, :half, :]
        b = pmfs[:, :, half:, :]
        v1 = rec(_cn(a, b[..., tab.perm_ratio]), epoch_in, phase0)
        m = state.lane_map_to(epoch_in)
        a = _gather_lanes(a, m)
        b = _gather_lanes(b, m)
        shifted = np.take_along_axis(a, tab.xor[v1], axis=-1)
        lower = _vn(shifted[..., tab.perm_inv_alpha], b[..., tab.perm_inv_beta])
        mid_epoch = state.epoch
        v2 = rec(lower, mid_epoch, phase0 + half)
        v1 = _gather_lanes(v1, state.lane_map_to(mid_epoch))
        return np.concatenate([v1 ^ tab.mul_alpha[v2], tab.mul_beta[v2]], axis=2)

    rec(ch_pmfs[:, None, :, :], 0, 0)
    return state.u_hat, state.pm, state.alive, state.n_node, state.scale_log


def scl_decode(
    spec: CodeSpec,
    ch_pmfs: np.ndarray,
    list_size: int,
    delta1: float = 0.0,
    delta2: float = 0.0,
) -> DecodeResult:
    """List-decode one frame; candidates sorted by path metric.

    ``pms`` are renormalised per phase by the running maximum; adding
    ``pm_log_scale`` to their logs recovers the unnormalised metrics.
    """
    cands, pms, alive, n_node, scale_log = scl_decode_batch(spec, ch_pmfs[None], list_size, delta1, delta2)
    live = alive[0]
    return DecodeResult(
        u_hat=cands[0, 0],
        candidates=cands[0, live],
        pms=pms[0, live],
        n_node=int(n_node[0]),
        pm_log_scale=float(scale_log[0]),
    )
