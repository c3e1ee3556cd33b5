"""Monte-Carlo block-error-rate harness.

Frame f of SNR point s draws its message and noise from an RNG stream
keyed by (seed, s, f), so results are bit-identical for any worker count
or batch size.  Frames are scheduled in fixed-size chunks consumed in
order; a sweep point stops at the first chunk boundary where the error
or frame budget is met.  All per-frame statistics are integers, making
the reduction exact.
"""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from .channel import ChannelParams, bit_app_zero, bits_to_symbol_pmf, modulate
from .code import CodeSpec, encode, extract_payload, insert_payload
from .decoders import (
    CrcConfig,
    NO_CRC,
    bp_decode_batch,
    crc_attach,
    crc_check,
    sc_decode_batch,
    scf_decode_batch,
    scl_decode_batch,
    sco1_decode_batch,
)

DECODERS = ("sc", "scl", "scf", "bp", "sco1")


def default_crc(length: int) -> CrcConfig:
    if length == 0:
        return NO_CRC
    if length == 16:
        return CrcConfig(length=16, poly=0x1021)
    raise ValueError(f"no default CRC generator for length {length}")


@dataclass(frozen=True)
class SimConfig:
    spec: CodeSpec
    decoder: str
    snrs: tuple[float, ...]
    list_size: int = 1
    delta1: float = 0.0
    delta2: float = 0.0
    t_max: int = 10
    i_max: int = 20
    max_frames: int = 1_000_000
    min_errors: int = 100
    seed: int = 0
    workers: int = 1
    chunk: int = 256
    batch: int = 64

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; choose from {DECODERS}")
        if self.max_frames < 1 or self.min_errors < 1 or self.chunk < 1:
            raise ValueError("stop rules and chunk size must be positive")
        if len(self.snrs) == 0:
            raise ValueError("no SNR points configured")

    @property
    def crc(self) -> CrcConfig:
        return default_crc(self.spec.crc_len)


@dataclass
class SimRecord:
    esn0_db: float
    frames: int
    block_errors: int
    bler: float
    i_avg: float | None = None
    t_avg_plus_1: float | None = None
    n_node_avg: float | None = None
    wall_time_s: float = 0.0


@dataclass
class _ChunkStats:
    frames: int = 0
    errors: int = 0
    iter_sum: int = 0
    attempt_sum: int = 0
    node_sum: int = 0

    def add(self, other: "_ChunkStats") -> None:
        self.frames += other.frames
        self.errors += other.errors
        self.iter_sum += other.iter_sum
        self.attempt_sum += other.attempt_sum
        self.node_sum += other.node_sum


def frame_rng(seed: int, snr_idx: int, frame: int) -> np.random.Generator:
    """The per-frame stream contract: message bits first, then noise."""
    return np.random.default_rng([seed, snr_idx, frame])


def _gen_frames(cfg: SimConfig, snr_idx: int, f0: int, f1: int):
    spec = cfg.spec
    n = f1 - f0
    msgs = np.empty((n, spec.k), dtype=np.int64)
    noise = np.empty((n, spec.n_bin))
    for i, fr in enumerate(range(f0, f1)):
        rg = frame_rng(cfg.seed, snr_idx, fr)
        msgs[i] = rg.integers(0, 2, size=spec.k)
        noise[i] = rg.standard_normal(spec.n_bin)
    payload = crc_attach(msgs, cfg.crc)
    u = insert_payload(spec, payload)
    params = ChannelParams(esn0_db=cfg.snrs[snr_idx])
    y = modulate(spec.field, encode(spec, u)) + params.sigma * noise
    p0 = bit_app_zero(y, params)
    pmfs = bits_to_symbol_pmf(np.stack([p0, 1.0 - p0], axis=-1), spec.field)
    return msgs, u, pmfs


def _scl_batch_size(cfg: SimConfig) -> int:
    return max(1, min(cfg.batch, 512 // cfg.list_size))


def _decode_msgs(cfg: SimConfig, pmfs, u_true, stats: _ChunkStats) -> np.ndarray:
    """Run the configured decoder over one generated batch; returns message bits."""
    spec = cfg.spec
    k = spec.k
    if cfg.decoder == "sc":
        u_hat, _ = sc_decode_batch(spec, pmfs)
        return extract_payload(spec, u_hat)[:, :k]
    if cfg.decoder == "scl":
        cands, _, alive, n_node, _ = scl_decode_batch(spec, pmfs, cfg.list_size, cfg.delta1, cfg.delta2)
        stats.node_sum += int(n_node.sum())
        payload = extract_payload(spec, cands)
        ok = alive & crc_check(payload, cfg.crc) if cfg.crc.length else alive
        chosen = np.where(ok.any(axis=1), ok.argmax(axis=1), 0)
        return payload[np.arange(len(payload)), chosen, :k]
    if cfg.decoder == "scf":
        u_hat, _, attempts = scf_decode_batch(spec, pmfs, cfg.t_max, cfg.crc)
        stats.attempt_sum += int(attempts.sum())
        return extract_payload(spec, u_hat)[:, :k]
    if cfg.decoder == "bp":
        u_hat, iters = bp_decode_batch(spec, pmfs, cfg.i_max)
        stats.iter_sum += int(iters.sum())
        return extract_payload(spec, u_hat)[:, :k]
    if cfg.decoder == "sco1":
        u_hat, _ = sco1_decode_batch(spec, pmfs, u_true)
        return extract_payload(spec, u_hat)[:, :k]
    raise AssertionError(cfg.decoder)


def _run_chunk(cfg: SimConfig, snr_idx: int, f0: int, f1: int) -> _ChunkStats:
    stats = _ChunkStats()
    batch = _scl_batch_size(cfg) if cfg.decoder == "scl" else cfg.batch
    for b0 in range(f0, f1, batch):
        b1 = min(b0 + batch, f1)
        msgs, u_true, pmfs = _gen_frames(cfg, snr_idx, b0, b1)
        bits = _decode_msgs(cfg, pmfs, u_true, stats)
        stats.frames += b1 - b0
        stats.errors += int((bits != msgs).any(axis=1).sum())
    return stats


_WORKER_CFG: SimConfig | None = None


def _init_worker(cfg: SimConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _worker_chunk(args) -> _ChunkStats:
    snr_idx, f0, f1 = args
    return _run_chunk(_WORKER_CFG, snr_idx, f0, f1)


def run_simulation(cfg: SimConfig) -> list[SimRecord]:
    """Sweep the configured SNR points; one record per point."""
    records = []
    for snr_idx, snr in enumerate(cfg.snrs):
        t0 = perf_counter()
        total = _ChunkStats()
        bounds = [
            (snr_idx, f0, min(f0 + cfg.chunk, cfg.max_frames))
            for f0 in range(0, cfg.max_frames, cfg.chunk)
        ]
        if cfg.workers > 1:
            ctx = mp.get_context("fork")
            with ctx.Pool(cfg.workers, initializer=_init_worker, initargs=(cfg,)) as pool:
                for stats in pool.imap(_worker_chunk, bounds):
                    total.add(stats)
                    if total.errors >= cfg.min_errors or total.frames >= cfg.max_frames:
                        pool.terminate()
                        break
        else:
            for task in bounds:
                total.add(_run_chunk(cfg, *task))
                if total.errors >= cfg.min_errors or total.frames >= cfg.max_frames:
                    break
        rec = SimRecord(
            esn0_db=snr,
            frames=total.frames,
            block_errors=total.errors,
            bler=total.errors / total.frames,
            wall_time_s=perf_counter() - t0,
        )
        if cfg.decoder == "bp":
            rec.i_avg = total.iter_sum / total.frames
        if cfg.decoder == "scf":
            rec.t_avg_plus_1 = total.attempt_sum / total.frames + 1.0
        if cfg.decoder == "scl":
            rec.n_node_avg = total.node_sum / total.frames
        records.append(rec)
    return records


def _hist_chunk(args) -> np.ndarray:
    from .decoders import genie_error_matrix

    spec, esn0_db, seed, f0, f1, batch = args
    params = ChannelParams(esn0_db=esn0_db)
    crc = default_crc(spec.crc_len)
    hist = np.zeros(spec.n_c + 1, dtype=np.int64)
    for b0 in range(f0, f1, batch):
        b1 = min(b0 + batch, f1)
        n = b1 - b0
        msgs = np.empty((n, spec.k), dtype=np.int64)
        noise = np.empty((n, spec.n_bin))
        for i, fr in enumerate(range(b0, b1)):
            rg = frame_rng(seed, 0, fr)
            msgs[i] = rg.integers(0, 2, size=spec.k)
            noise[i] = rg.standard_normal(spec.n_bin)
        u = insert_payload(spec, crc_attach(msgs, crc))
        y = modulate(spec.field, encode(spec, u)) + params.sigma * noise
        p0 = bit_app_zero(y, params)
        pmfs = bits_to_symbol_pmf(np.stack([p0, 1.0 - p0], axis=-1), spec.field)
        counts = genie_error_matrix(spec, pmfs, u).sum(axis=1)
        hist += np.bincount(counts, minlength=spec.n_c + 1)
    return hist


def error_count_histogram(
    spec: CodeSpec,
    esn0_db: float,
    frames: int,
    seed: int = 0,
    batch: int = 128,
    workers: int = 1,
) -> np.ndarray:
    """Channel-caused symbol-error counts from fully genie-aided SC.

    Returns an array of length n_c + 1 where entry e is the number of
    frames with exactly e errors; used for the oracle-assisted decoding
    histogram.  Per-frame streams make the result worker-independent.
    """
    step = max(batch, frames // max(1, 4 * workers))
    tasks = [
        (spec, esn0_db, seed, f0, min(f0 + step, frames), batch)
        for f0 in range(0, frames, step)
    ]
    if workers > 1:
        ctx = mp.get_context("fork")
        with ctx.Pool(workers) as pool:
            return sum(pool.imap_unordered(_hist_chunk, tasks))
    return sum(map(_hist_chunk, tasks))


# ---------------------------------------------------------------------------
# machine-readable records
# ---------------------------------------------------------------------------

CSV_COLUMNS = (
    "snr_db",
    "frames",
    "errors",
    "bler",
    "i_avg",
    "t_avg_plus_1",
    "n_node_avg",
    "seed",
    "decoder",
    "L",
    "delta1",
    "delta2",
    "t_max",
    "i_max",
)


def records_to_csv(records: list[SimRecord], cfg: SimConfig) -> str:
    """Deterministic CSV serialisation (wall time deliberately excluded)."""

    def fmt(v) -> str:
        return "" if v is None else repr(v) if isinstance(v, float) else str(v)

    lines = [",".join(CSV_COLUMNS)]
    for r in records:
        row = [
            fmt(r.esn0_db),
            fmt(r.frames),
            fmt(r.block_errors),
            fmt(r.bler),
            fmt(r.i_avg),
            fmt(r.t_avg_plus_1),
            fmt(r.n_node_avg),
            fmt(cfg.seed),
            cfg.decoder,
            fmt(cfg.list_size),
            fmt(cfg.delta1),
            fmt(cfg.delta2),
            fmt(cfg.t_max),
            fmt(cfg.i_max),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
