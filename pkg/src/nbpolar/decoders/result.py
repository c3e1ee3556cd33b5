"""Common result container for all decoders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class DecodeResult:
    """Outcome of one decoded frame.

    Fields not produced by a given decoder stay None: list decoding fills
    ``candidates``/``pms``/``n_node``, flip decoding ``attempts``, belief
    propagation ``iterations``, genie-assisted decoding ``error_count``.
    """

    u_hat: np.ndarray | None = None
    candidates: np.ndarray | None = None
    pms: np.ndarray | None = None
    pm_log_scale: float | None = None
    message_bits: np.ndarray | None = None
    crc_passed: bool | None = None
    n_node: int | None = None
    attempts: int | None = None
    iterations: int | None = None
    error_count: int | None = None
    phase_pmfs: np.ndarray | None = None
