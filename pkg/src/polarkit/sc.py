"""Successive-cancellation decoding.

Decoding starts at the first information bit: everything before it is
frozen to zero, so the skipped LLR work can never influence an output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .code import PolarCode, extract_info
from .quant import QuantSpec, hard_decision  # noqa: F401  (hard_decision re-exported)


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of one decoder invocation.

    ``crc_ok`` is True/False when a CRC was checked and None when no CRC
    applies. ``decision_magnitudes`` holds |decision LLR| per information
    bit for decoders that produce them (SC and SC-Flip), else None.
    """

    u_hat: np.ndarray
    info_bits: np.ndarray
    decision_magnitudes: np.ndarray | None = None
    trials_used: int = 1
    crc_ok: bool | None = None


def prepare_channel(channel, code: PolarCode, quant: QuantSpec | None):
    """Validate a channel LLR frame and return (array, lo, hi, pm_cap)
    with the dtype the kernels specialize on."""
    arr = np.asarray(channel)
    if arr.shape != (code.N,):
        raise ValueError(f"channel frame must have length {code.N}, got {arr.shape}")
    if quant is None:
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        return arr, -np.inf, np.inf, np.inf
    arr64 = np.ascontiguousarray(arr, dtype=np.int64)
    if np.any(arr64 != arr):
        raise ValueError("quantized mode expects integer channel LLRs")
    if arr64.min() < quant.chan_min or arr64.max() > quant.chan_max:
        raise ValueError(f"channel LLRs exceed the {quant.q_c}-bit range")
    return arr64, np.int64(quant.llr_min), np.int64(quant.llr_max), np.int64(quant.pm_max)


def _sc_run(code: PolarCode, chan, lo, hi, flip_index: int = -1):
    u = np.empty(code.N, dtype=np.uint8)
    mag = np.empty(code.N, dtype=chan.dtype)
    x = np.empty(code.N, dtype=np.uint8)
    _engine.sc_decode(chan, code.frozen_mask, code.n, code.b, lo, hi, flip_index, u, mag, x)
    return u, mag, x


def decode_sc(code: PolarCode, channel, quant: QuantSpec | None = None) -> DecodeOutcome:
    """Decode one frame with plain SC.

    Parameters
    ----------
    channel : array_like, shape (N,)
        Channel LLRs: integers already quantized to ``quant.q_c`` bits, or
        reals when ``quant`` is None (unbounded mode).

    Returns
    -------
    DecodeOutcome
        For systematic codes ``info_bits`` is read from the re-encoded
        codeword estimate, otherwise from ``u_hat`` directly.
    """
    chan, lo, hi, _ = prepare_channel(channel, code, quant)
    u, mag, x = _sc_run(code, chan, lo, hi)
    info = x[code.info_indices] if code.systematic else extract_info(code, u)
    return DecodeOutcome(
        u_hat=u,
        info_bits=info,
        decision_magnitudes=mag[code.info_indices],
    )
