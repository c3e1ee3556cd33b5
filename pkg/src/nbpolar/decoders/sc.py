"""Successive cancellation decoding and its genie/flip variants.

One batched recursive core evaluates the butterfly update rules over a
whole batch of frames at once; the per-phase decision is a pluggable
policy, which is how plain SC, genie-aided probing (for code design),
oracle-assisted SCO-1 and the flip attempts of SCF all share the same
message-passing machinery.

Butterfly with channel-side pmfs (P1, P2) and kernel (alpha, beta):
the upper branch combines P1 with P2 permuted by the multiply-by
alpha/beta map through a check-node convolution; once u1 is decided, the
lower branch is the variable-node product of P1 shifted by u1 and
divided by alpha with P2 divided by beta.
"""

from __future__ import annotations

import numpy as np

from ..code import CodeSpec, extract_payload
from ..pmf import EPS, fht
from .crc import CrcConfig, crc_check
from .result import DecodeResult


def _cn(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    c = fht(fht(a) * fht(b))
    np.maximum(c, EPS, out=c)
    c /= c.sum(axis=-1, keepdims=True)
    return c


def _vn(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    c = a * b
    np.maximum(c, EPS, out=c)
    c /= c.sum(axis=-1, keepdims=True)
    return c


# ---------------------------------------------------------------------------
# decision policies
# ---------------------------------------------------------------------------

class ScPolicy:
    """Hard decision: argmax of the leaf pmf restricted to S(u_i)."""

    def __init__(self, spec: CodeSpec, batch: int, record: bool = False):
        self.s_sizes = spec.s_sizes
        self.phase_pmfs = np.empty((batch, spec.n_c, spec.field.q)) if record else None

    def __call__(self, phase: int, leaf: np.ndarray) -> np.ndarray:
        if self.phase_pmfs is not None:
            self.phase_pmfs[:, phase, :] = leaf
        s = self.s_sizes[phase]
        if s == 1:
            return np.zeros(leaf.shape[0], dtype=np.int64)
        return leaf[:, :s].argmax(axis=-1)


class GeniePolicy:
    """Decide, compare against the truth, then correct before proceeding."""

    def __init__(self, spec: CodeSpec, true_u: np.ndarray):
        self.s_sizes = spec.s_sizes
        self.true_u = true_u
        self.errors = np.zeros(true_u.shape, dtype=bool)

    def __call__(self, phase: int, leaf: np.ndarray) -> np.ndarray:
        s = self.s_sizes[phase]
        truth = self.true_u[:, phase]
        if s > 1:
            guess = leaf[:, :s].argmax(axis=-1)
            self.errors[:, phase] = guess != truth
        return truth


class Sco1Policy:
    """Correct only the first wrong decision, then run free."""

    def __init__(self, spec: CodeSpec, true_u: np.ndarray):
        self.s_sizes = spec.s_sizes
        self.true_u = true_u
        self.corrected = np.zeros(true_u.shape[0], dtype=bool)

    def __call__(self, phase: int, leaf: np.ndarray) -> np.ndarray:
        s = self.s_sizes[phase]
        if s == 1:
            return np.zeros(leaf.shape[0], dtype=np.int64)
        guess = leaf[:, :s].argmax(axis=-1)
        truth = self.true_u[:, phase]
        fix = (guess != truth) & ~self.corrected
        guess[fix] = truth[fix]
        self.corrected |= fix
        return guess


class FlipPolicy:
    """Plain SC decisions with one per-frame decision overridden."""

    def __init__(self, spec: CodeSpec, flip_phase: np.ndarray, flip_sym: np.ndarray):
        self.s_sizes = spec.s_sizes
        self.flip_phase = flip_phase
        self.flip_sym = flip_sym

    def __call__(self, phase: int, leaf: np.ndarray) -> np.ndarray:
        s = self.s_sizes[phase]
        if s == 1:
            guess = np.zeros(leaf.shape[0], dtype=np.int64)
        else:
            guess = leaf[:, :s].argmax(axis=-1)
        hit = self.flip_phase == phase
        if hit.any():
            guess[hit] = self.flip_sym[hit]
        return guess


class ForcedPolicy:
    """Replay a fixed decision sequence, recording transition probabilities."""

    def __init__(self, u_seq: np.ndarray):
        self.u_seq = u_seq
        self.trans = np.empty(u_seq.shape)

    def __call__(self, phase: int, leaf: np.ndarray) -> np.ndarray:
        u = self.u_seq[:, phase]
        self.trans[:, phase] = leaf[np.arange(leaf.shape[0]), u]
        return u


# ---------------------------------------------------------------------------
# core recursion
# ---------------------------------------------------------------------------

def sc_run(spec: CodeSpec, ch_pmfs: np.ndarray, policy) -> np.ndarray:
    """Run one SC pass over a batch; returns decided symbols (B, n_c)."""
    tab = spec.tables
    u_out = np.empty((ch_pmfs.shape[0], spec.n_c), dtype=np.int64)

    def rec(pmfs: np.ndarray, phase0: int) -> np.ndarray:
        size = pmfs.shape[1]
        if size == 1:
            u = policy(phase0, pmfs[:, 0, :])
            u_out[:, phase0] = u
            return u[:, None]
        half = size // 2
        a = pmfs[:, :half, :]
        b = pmfs[:, half:, :]
        v1 = rec(_cn(a, b[..., tab.perm_ratio]), phase0)
        shifted = np.take_along_axis(a, tab.xor[v1], axis=-1)
        lower = _vn(shifted[..., tab.perm_inv_alpha], b[..., tab.perm_inv_beta])
        v2 = rec(lower, phase0 + half)
        return np.concatenate([v1 ^ tab.mul_alpha[v2], tab.mul_beta[v2]], axis=1)

    rec(np.asarray(ch_pmfs, dtype=np.float64), 0)
    return u_out


def _check_pmfs(spec: CodeSpec, ch_pmfs: np.ndarray) -> np.ndarray:
    ch_pmfs = np.asarray(ch_pmfs, dtype=np.float64)
    if ch_pmfs.shape[-2:] != (spec.n_c, spec.field.q):
        raise ValueError(
            f"expected channel pmfs of shape (..., {spec.n_c}, {spec.field.q}), got {ch_pmfs.shape}"
        )
    return ch_pmfs


def sc_decode_batch(spec: CodeSpec, ch_pmfs: np.ndarray, record_pmfs: bool = False):
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    policy = ScPolicy(spec, ch_pmfs.shape[0], record=record_pmfs)
    u = sc_run(spec, ch_pmfs, policy)
    return u, policy.phase_pmfs


def sc_decode(spec: CodeSpec, ch_pmfs: np.ndarray, return_phase_pmfs: bool = False) -> DecodeResult:
    """Plain successive cancellation of a single frame."""
    u, pmfs = sc_decode_batch(spec, ch_pmfs[None], record_pmfs=return_phase_pmfs)
    return DecodeResult(u_hat=u[0], phase_pmfs=None if pmfs is None else pmfs[0])


def genie_error_matrix(spec: CodeSpec, ch_pmfs: np.ndarray, true_u: np.ndarray) -> np.ndarray:
    """Per-phase decision-error indicators of a fully corrected SC pass."""
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    policy = GeniePolicy(spec, np.asarray(true_u, dtype=np.int64))
    sc_run(spec, ch_pmfs, policy)
    return policy.errors


def path_transition_probs(spec: CodeSpec, ch_pmfs: np.ndarray, u_seq: np.ndarray) -> np.ndarray:
    """Per-phase conditional probabilities along a forced decision path.

    The product over phases is the path metric of ``u_seq`` before any
    shared renormalisation.
    """
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    squeeze = ch_pmfs.ndim == 2  # single frame
    if squeeze:
        ch_pmfs = ch_pmfs[None]
        u_seq = np.asarray(u_seq)[None]
    policy = ForcedPolicy(np.asarray(u_seq, dtype=np.int64))
    sc_run(spec, ch_pmfs, policy)
    return policy.trans[0] if squeeze else policy.trans


def sco1_decode_batch(spec: CodeSpec, ch_pmfs: np.ndarray, true_u: np.ndarray):
    """Oracle-assisted SC correcting the first error; returns (u_hat, error counts).

    The channel-caused error count comes from a fully corrected pass.  A
    frame with at most one such error is recovered exactly by the
    single-correction decoder, so the second (single-correction) pass is
    only run for frames with two or more errors.
    """
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    true_u = np.asarray(true_u, dtype=np.int64)
    errors = genie_error_matrix(spec, ch_pmfs, true_u)
    counts = errors.sum(axis=1)
    u_hat = true_u.copy()
    bad = counts >= 2
    if bad.any():
        policy = Sco1Policy(spec, true_u[bad])
        u_hat[bad] = sc_run(spec, ch_pmfs[bad], policy)
    return u_hat, counts


def sco1_decode(spec: CodeSpec, ch_pmfs: np.ndarray, true_u: np.ndarray) -> DecodeResult:
    u, counts = sco1_decode_batch(spec, ch_pmfs[None], np.asarray(true_u)[None])
    return DecodeResult(u_hat=u[0], error_count=int(counts[0]))


# ---------------------------------------------------------------------------
# SC flip
# ---------------------------------------------------------------------------

def _flip_candidates(spec: CodeSpec, phase_pmfs: np.ndarray, u_hat: np.ndarray) -> np.ndarray:
    """Likelihood-ratio matrix of alternative decisions, zero outside S(u_i)."""
    B, n_c, q = phase_pmfs.shape
    at_hat = np.take_along_axis(phase_pmfs, u_hat[:, :, None], axis=-1)
    lam = phase_pmfs / at_hat
    lam[:, spec.s_sizes[:, None] <= np.arange(q)[None, :]] = 0.0
    np.put_along_axis(lam, u_hat[:, :, None], 0.0, axis=-1)
    return lam


def scf_decode_batch(spec: CodeSpec, ch_pmfs: np.ndarray, t_max: int, crc_cfg: CrcConfig):
    """CRC-guided flip decoding of a batch.

    Returns (u_hat, crc_ok, attempts).  Attempt T re-runs SC with the
    decision holding the T-th largest flip candidate overridden; frames
    whose CRC never passes keep the initial SC estimate.
    """
    if spec.crc_len <= 0 or crc_cfg.length != spec.crc_len:
        raise ValueError("flip decoding needs a CRC-configured code")
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    ch_pmfs = _check_pmfs(spec, ch_pmfs)
    B = ch_pmfs.shape[0]
    q = spec.field.q

    policy = ScPolicy(spec, B, record=True)
    u_hat = sc_run(spec, ch_pmfs, policy)
    ok = crc_check(extract_payload(spec, u_hat), crc_cfg)
    attempts = np.zeros(B, dtype=np.int64)
    pending = np.flatnonzero(~ok)
    if t_max == 0 or pending.size == 0:
        return u_hat, ok, attempts

    lam = _flip_candidates(spec, policy.phase_pmfs[pending], u_hat[pending])
    # global candidate order; ties resolve to lower phase, then lower symbol
    order = np.argsort(-lam.reshape(pending.size, -1), axis=1, kind="stable")[:, :t_max]
    row_of = {int(f): i for i, f in enumerate(pending)}

    for t in range(1, t_max + 1):
        rows = np.array([row_of[int(f)] for f in pending])
        flat = order[rows, t - 1]
        flip_phase = flat // q
        flip_sym = flat % q
        u_try = sc_run(spec, ch_pmfs[pending], FlipPolicy(spec, flip_phase, flip_sym))
        ok_try = crc_check(extract_payload(spec, u_try), crc_cfg)
        attempts[pending] = t
        if ok_try.any():
            fixed = pending[ok_try]
            u_hat[fixed] = u_try[ok_try]
            ok[fixed] = True
            pending = pending[~ok_try]
            if pending.size == 0:
                break
    return u_hat, ok, attempts


def scf_decode(spec: CodeSpec, ch_pmfs: np.ndarray, t_max: int, crc_cfg: CrcConfig) -> DecodeResult:
    u, ok, att = scf_decode_batch(spec, ch_pmfs[None], t_max, crc_cfg)
    return DecodeResult(
        u_hat=u[0],
        crc_passed=bool(ok[0]),
        attempts=int(att[0]),
        message_bits=extract_payload(spec, u[0])[: spec.k],
    )
