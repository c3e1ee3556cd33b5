"""Code specification, q-ary polar encoding and Monte-Carlo construction.

A code is the Kronecker power of the 2x2 kernel [[1, 0], [alpha, beta]]
over GF(2^r), plus a per-symbol frozen profile: symbol i has its t_i most
significant bits frozen to zero, restricting it to
S(u_i) = {0, ..., 2^(r - t_i) - 1}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .channel import ChannelParams, bit_app_zero, bits_to_symbol_pmf, modulate, transmit
from .galois import GaloisField
from .pmf import normalize


@dataclass(frozen=True)
class Kernel:
    alpha: int
    beta: int = 1

    def validate(self, f: GaloisField) -> None:
        if not (0 < self.alpha < f.q and 0 < self.beta < f.q):
            raise ValueError("kernel entries alpha, beta must be nonzero field elements")

    @property
    def ratio_of(self):  # pragma: no cover - convenience repr helper
        return f"{self.alpha}/{self.beta}"


@dataclass
class FrozenProfile:
    """Per-symbol frozen-bit counts plus the design metadata that produced them."""

    q: int
    prim_poly: int
    alpha: int
    beta: int
    n_c: int
    t: np.ndarray
    design_snr_db: float | None = None
    seed: int | None = None
    frames: int | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.int64)
        if len(self.t) != self.n_c:
            raise ValueError("frozen profile length differs from n_c")

    @property
    def k_bin(self) -> int:
        r = self.q.bit_length() - 1
        return int((r - self.t).sum())

    def save(self, path) -> None:
        doc = {
            "q": self.q,
            "prim_poly": self.prim_poly,
            "alpha": self.alpha,
            "beta": self.beta,
            "n_c": self.n_c,
            "design_snr_db": self.design_snr_db,
            "seed": self.seed,
            "frames": self.frames,
            "t": self.t.tolist(),
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "FrozenProfile":
        with open(path) as fh:
            doc = json.load(fh)
        return cls(**doc)


class CodeSpec:
    """Immutable description of one code instance.

    ``t[i]`` is the number of frozen (most significant) bits of symbol i;
    ``k`` counts the message bits excluding the CRC.
    """

    def __init__(
        self,
        field: GaloisField,
        n_c: int,
        kernel: Kernel,
        t: Sequence[int] | np.ndarray,
        crc_len: int = 0,
    ):
        if n_c < 2 or n_c & (n_c - 1):
            raise ValueError(f"code length must be a power of two >= 2, got {n_c}")
        kernel.validate(field)
        t = np.asarray(t, dtype=np.int64)
        if t.shape != (n_c,) or t.min() < 0 or t.max() > field.r:
            raise ValueError("frozen profile must give t_i in [0, r] for each symbol")
        self.field = field
        self.n_c = n_c
        self.kernel = kernel
        self.t = t
        self.crc_len = int(crc_len)
        self.k_bin = int((field.r - t).sum())
        self.k = self.k_bin - self.crc_len
        if self.k < 0:
            raise ValueError("CRC longer than the available information bits")
        self.n_bin = n_c * field.r
        # |S(u_i)| per symbol
        self.s_sizes = (1 << (field.r - t)).astype(np.int64)
        self._stages = [1 << s for s in range(n_c.bit_length() - 1)]
        self._stage_idx = []
        pos = np.arange(n_c)
        for h in self._stages:
            i1 = pos[(pos & h) == 0]
            self._stage_idx.append((i1, i1 + h))
        # data-bit slot maps for message insertion/extraction (MSB-first
        # inside each symbol's low r - t_i bits)
        widths = (field.r - t).astype(np.int64)
        sym_of_bit = np.repeat(np.arange(n_c), widths)
        shifts = np.concatenate([np.arange(w - 1, -1, -1) for w in widths if w > 0]) if self.k_bin else np.zeros(0, dtype=np.int64)
        self._sym_of_bit = sym_of_bit
        self._bit_shifts = shifts.astype(np.int64)
        self._tables = None

    @property
    def rate(self) -> float:
        return self.k_bin / self.n_bin

    @property
    def tables(self):
        """Decoder lookup tables, built once per spec."""
        if self._tables is None:
            f, kr = self.field, self.kernel
            ratio = f.mul(kr.alpha, f.inv(kr.beta))
            self._tables = _DecoderTables(
                perm_ratio=f.mul_perm(ratio),
                perm_alpha=f.mul_perm(kr.alpha),
                perm_beta=f.mul_perm(kr.beta),
                perm_inv_alpha=f.mul_table[kr.alpha].copy(),
                perm_inv_beta=f.mul_table[kr.beta].copy(),
                xor=f.xor_table,
                mul_alpha=f.mul_table[kr.alpha],
                mul_beta=f.mul_table[kr.beta],
            )
        return self._tables

    def __repr__(self) -> str:
        return (
            f"CodeSpec(GF({self.field.q}) poly {self.field.prim_poly}, n_c={self.n_c}, "
            f"alpha={self.kernel.alpha}, beta={self.kernel.beta}, k={self.k}, crc={self.crc_len})"
        )


@dataclass
class _DecoderTables:
    perm_ratio: np.ndarray      # gather for pmf(C2) -> pmf(C2 * alpha/beta)
    perm_alpha: np.ndarray      # gather for multiply-by-alpha
    perm_beta: np.ndarray       # gather for multiply-by-beta
    perm_inv_alpha: np.ndarray  # gather for multiply-by-alpha^-1
    perm_inv_beta: np.ndarray   # gather for multiply-by-beta^-1
    xor: np.ndarray
    mul_alpha: np.ndarray
    mul_beta: np.ndarray


# ---------------------------------------------------------------------------
# encoding and bit/symbol packing
# ---------------------------------------------------------------------------

def encode(spec: CodeSpec, u: np.ndarray) -> np.ndarray:
    """Kronecker-power transform of the kernel, applied in place per stage.

    Accepts a single symbol vector of length n_c or a batch (..., n_c);
    every 2-element butterfly maps (u1, u2) to (u1 + alpha*u2, beta*u2).
    """
    u = np.asarray(u, dtype=np.int64)
    if u.shape[-1] != spec.n_c:
        raise ValueError(f"expected {spec.n_c} symbols, got {u.shape[-1]}")
    ma = spec.tables.mul_alpha
    mb = spec.tables.mul_beta
    c = u.copy()
    for i1, i2 in spec._stage_idx:
        v2 = c[..., i2]
        c[..., i1] ^= ma[v2]
        c[..., i2] = mb[v2]
    return c


def kernel_matrix(spec: CodeSpec) -> np.ndarray:
    """Explicit n_c x n_c transform matrix (Kronecker power), test oracle."""
    f, kr = spec.field, spec.kernel
    g = np.array([[1]], dtype=np.int64)
    base = np.array([[1, 0], [kr.alpha, kr.beta]], dtype=np.int64)
    while g.shape[0] < spec.n_c:
        m = g.shape[0]
        out = np.zeros((2 * m, 2 * m), dtype=np.int64)
        out[:m, :m] = g
        out[m:, :m] = f.mul_table[kr.alpha][g]
        out[m:, m:] = f.mul_table[kr.beta][g]
        g = out
    return g


def bits_to_symbols(f: GaloisField, bits: np.ndarray) -> np.ndarray:
    """Pack consecutive r-tuples of bits, left bit most significant."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] % f.r:
        raise ValueError(f"bit count {bits.shape[-1]} not divisible by r={f.r}")
    groups = bits.reshape(bits.shape[:-1] + (-1, f.r))
    weights = 1 << np.arange(f.r - 1, -1, -1)
    return groups @ weights


def symbols_to_bits(f: GaloisField, syms: np.ndarray) -> np.ndarray:
    syms = np.asarray(syms, dtype=np.int64)
    shifts = np.arange(f.r - 1, -1, -1)
    bits = (syms[..., None] >> shifts) & 1
    return bits.reshape(syms.shape[:-1] + (-1,))


def insert_payload(spec: CodeSpec, payload_bits: np.ndarray) -> np.ndarray:
    """Place k_bin payload bits (message + CRC) into the unfrozen bit slots."""
    payload_bits = np.asarray(payload_bits, dtype=np.int64)
    if payload_bits.shape[-1] != spec.k_bin:
        raise ValueError(f"expected {spec.k_bin} payload bits, got {payload_bits.shape[-1]}")
    u = np.zeros(payload_bits.shape[:-1] + (spec.n_c,), dtype=np.int64)
    vals = payload_bits << spec._bit_shifts
    np.add.at(u.reshape(-1, spec.n_c), (slice(None), spec._sym_of_bit), vals.reshape(-1, spec.k_bin))
    return u


def extract_payload(spec: CodeSpec, u: np.ndarray) -> np.ndarray:
    """Inverse of insert_payload: read the k_bin data bits out of u."""
    u = np.asarray(u, dtype=np.int64)
    return (u[..., spec._sym_of_bit] >> spec._bit_shifts) & 1


def conventional_scl_node_count(spec: CodeSpec, list_size: int) -> int:
    """Sum over phases of min(L, |S(u_i)| * L_{i-1}), starting from one path."""
    live = 1
    total = 0
    for s in spec.s_sizes:
        live = min(list_size, int(s) * live)
        total += live
    return total


# ---------------------------------------------------------------------------
# Monte-Carlo kernel selection
# ---------------------------------------------------------------------------

@dataclass
class RatioEstimate:
    ratio: int
    estimate: float
    std_error: float


def kernel_select(
    f: GaloisField,
    snr_db: float,
    trials: int,
    rng_seed: int = 0,
) -> list[RatioEstimate]:
    """Rank candidate kernel ratios alpha/beta by E[1 - P2'(u2)].

    For each nonzero ratio rho the two-symbol code with alpha = rho,
    beta = 1 is simulated: u1 = 0, u2 uniform, BPSK over biAWGN, and the
    lower-branch conditional pmf evaluated at the true u2.  Smaller
    estimates mean stronger single-level polarisation; the returned list
    is sorted ascending (best ratio first).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    params = ChannelParams(esn0_db=snr_db)
    q, r = f.q, f.r
    streams = np.random.SeedSequence(rng_seed).spawn(q - 1)
    results = []
    for ratio in range(1, q):
        rng = np.random.default_rng(streams[ratio - 1])
        u2 = rng.integers(0, q, size=trials)
        c = np.stack([f.mul_table[ratio][u2], u2], axis=1)
        x = modulate(f, c)
        y = transmit(x, params, rng)
        apps = bit_app_zero(y, params)
        pmfs = bits_to_symbol_pmf(np.stack([apps, 1.0 - apps], axis=-1), f)
        # Eq-form lower branch with u1 = 0 known and beta = 1:
        # P2' = norm((P1 permuted by mul-perm of ratio^-1) * P2)
        p1 = pmfs[:, 0, :][:, f.mul_table[ratio]]
        p2 = pmfs[:, 1, :]
        post = normalize(p1 * p2)
        miss = 1.0 - post[np.arange(trials), u2]
        est = float(miss.mean())
        se = float(miss.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        results.append(RatioEstimate(ratio=ratio, estimate=est, std_error=se))
    results.sort(key=lambda e: (e.estimate, e.ratio))
    return results


# ---------------------------------------------------------------------------
# Monte-Carlo frozen-position design
# ---------------------------------------------------------------------------

def _design_count_chunk(args) -> np.ndarray:
    """Genie symbol-error counts for one contiguous frame range."""
    from .decoders.sc import genie_error_matrix  # deferred: decoders import this module

    f, n_c, kernel, design_snr_db, rng_seed, f0, f1, batch = args
    spec_probe = CodeSpec(f, n_c, kernel, t=np.zeros(n_c, dtype=np.int64))
    params = ChannelParams(esn0_db=design_snr_db)
    n_bin = n_c * f.r
    counts = np.zeros(n_c, dtype=np.int64)
    for b0 in range(f0, f1, batch):
        b1 = min(b0 + batch, f1)
        rngs = [np.random.default_rng([rng_seed, fi]) for fi in range(b0, b1)]
        u = np.stack([rg.integers(0, f.q, size=n_c) for rg in rngs])
        x = modulate(f, encode(spec_probe, u))
        noise = np.stack([rg.standard_normal(n_bin) for rg in rngs])
        y = x + params.sigma * noise
        apps = bit_app_zero(y, params)
        pmfs = bits_to_symbol_pmf(np.stack([apps, 1.0 - apps], axis=-1), f)
        counts += genie_error_matrix(spec_probe, pmfs, u).sum(axis=0)
    return counts


def design_frozen(
    f: GaloisField,
    n_c: int,
    kernel: Kernel,
    k_bin: int,
    design_snr_db: float,
    frames: int,
    rng_seed: int = 0,
    batch: int = 256,
    workers: int = 1,
) -> FrozenProfile:
    """Genie-aided Monte-Carlo selection of the frozen profile.

    Random unconstrained transmissions are decoded with a successive
    cancellation pass whose decisions are corrected to the truth after
    every phase, isolating per-position channel quality.  Positions are
    ranked by symbol-error count (worst first, lower index winning ties)
    and frozen most-significant-bits-first until n_bin - k_bin bits are
    frozen.  If the freeze budget is not a multiple of r, one boundary
    symbol is partially frozen.  The result depends only on
    (rng_seed, frames): per-frame noise comes from counter-derived
    streams and the counts are integers, so any worker/batch split
    reduces identically.
    """
    n_bin = n_c * f.r
    if not 0 <= k_bin <= n_bin:
        raise ValueError(f"k_bin must lie in [0, {n_bin}], got {k_bin}")
    step = max(batch, frames // max(1, 4 * workers))
    tasks = [
        (f, n_c, kernel, design_snr_db, rng_seed, f0, min(f0 + step, frames), batch)
        for f0 in range(0, frames, step)
    ]
    if workers > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(workers) as pool:
            counts = sum(pool.imap_unordered(_design_count_chunk, tasks))
    else:
        counts = sum(map(_design_count_chunk, tasks))

    freeze_bits = n_bin - k_bin
    order = np.lexsort((np.arange(n_c), -counts))
    t = np.zeros(n_c, dtype=np.int64)
    full, resid = divmod(freeze_bits, f.r)
    t[order[:full]] = f.r
    if resid:
        t[order[full]] = resid
    return FrozenProfile(
        q=f.q,
        prim_poly=f.prim_poly,
        alpha=kernel.alpha,
        beta=kernel.beta,
        n_c=n_c,
        t=t,
        design_snr_db=design_snr_db,
        seed=rng_seed,
        frames=frames,
    )


def spec_from_profile(profile: FrozenProfile, crc_len: int = 0) -> CodeSpec:
    f = GaloisField(profile.q, profile.prim_poly)
    return CodeSpec(f, profile.n_c, Kernel(profile.alpha, profile.beta), profile.t, crc_len)


def check_profile(profile: FrozenProfile, spec: CodeSpec) -> None:
    """Refuse a profile whose header does not match the requested code."""
    mismatches = []
    for name, want, got in [
        ("q", spec.field.q, profile.q),
        ("prim_poly", spec.field.prim_poly, profile.prim_poly),
        ("alpha", spec.kernel.alpha, profile.alpha),
        ("beta", spec.kernel.beta, profile.beta),
        ("n_c", spec.n_c, profile.n_c),
    ]:
        if want != got:
            mismatches.append(f"{name}: profile has {got}, requested {want}")
    if mismatches:
        raise ValueError("frozen profile does not match code spec; " + "; ".join(mismatches))
