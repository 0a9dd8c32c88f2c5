"""Saturating two's-complement LLR arithmetic and decoder kernel functions.

All decoders run on top of the three kernels defined here: the min-sum
check-node function ``f_min_sum``, the variable-node function ``g_llr``,
and the saturating path-metric accumulator ``saturating_pm_add``.  A
``QuantSpec`` fixes the bit-widths; passing ``None`` to the decoders
selects the unbounded-precision reference mode instead.

Conventions (used consistently everywhere):
  * sign(0) = +1, so an LLR of exactly 0 decodes to bit 0,
  * a w-bit two's-complement quantity covers [-2**(w-1), 2**(w-1) - 1],
  * path metrics are unsigned accumulators saturating at 2**q_pm - 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class QuantSpec:
    """Fixed-point configuration: channel/internal LLR and path-metric widths.

    Parameters
    ----------
    q_i : int
        Internal LLR bit-width.
    q_c : int
        Channel LLR bit-width. Must satisfy 2 <= q_c <= q_i.
    q_pm : int
        Path-metric bit-width (unsigned). Defaults to q_i + 2, must be >= q_i.
    channel_scale : float
        Multiplier applied to real channel LLRs before rounding.
    """

    q_i: int
    q_c: int
    q_pm: int = -1
    channel_scale: float = 4.0

    def __post_init__(self):
        if self.q_pm == -1:
            object.__setattr__(self, "q_pm", self.q_i + 2)
        # 62-bit ceiling keeps every intermediate exact in the int64 engine
        if not (2 <= self.q_c <= self.q_i <= 62):
            raise ValueError(f"need 2 <= q_c <= q_i <= 62, got {self.q_c}.{self.q_i}")
        if not self.q_i <= self.q_pm <= 62:
            raise ValueError(f"q_pm ({self.q_pm}) must be in [q_i, 62]")

    @property
    def llr_min(self) -> int:
        return -(1 << (self.q_i - 1))

    @property
    def llr_max(self) -> int:
        return (1 << (self.q_i - 1)) - 1

    @property
    def chan_min(self) -> int:
        return -(1 << (self.q_c - 1))

    @property
    def chan_max(self) -> int:
        return (1 << (self.q_c - 1)) - 1

    @property
    def pm_max(self) -> int:
        return (1 << self.q_pm) - 1

    def __str__(self) -> str:
        return f"{self.q_i}.{self.q_c}:{self.q_pm}"


#: Quantization of the run-time-configurable decoder: 6.6 LLRs, 8-bit metrics.
FLEXIBLE_QUANT = QuantSpec(q_i=6, q_c=6, q_pm=8)

#: Quantization of the unrolled high-throughput decoder: 5.4 LLRs.
UNROLLED_QUANT = QuantSpec(q_i=5, q_c=4)


def parse_quant(text: str) -> QuantSpec | None:
    """Parse a ``QI.QC[:QPM]`` string, e.g. ``6.6:8`` or ``5.4``.

    ``float``, ``none`` and the empty string select unbounded mode (None).
    """
    t = text.strip().lower()
    if t in ("", "float", "none", "unbounded"):
        return None
    pm = -1
    if ":" in t:
        t, pm_s = t.split(":", 1)
        pm = int(pm_s)
    try:
        qi_s, qc_s = t.split(".")
        qi, qc = int(qi_s), int(qc_s)
    except ValueError:
        raise ValueError(f"bad quantization spec {text!r}, expected QI.QC[:QPM]") from None
    return QuantSpec(q_i=qi, q_c=qc, q_pm=pm)


def f_min_sum(a: int | float, b: int | float, spec: QuantSpec | None = None) -> int | float:
    """Min-sum check-node update: sign(a)*sign(b)*min(|a|, |b|).

    sign(0) counts as +1. In bounded mode the magnitude saturates at the
    positive maximum, which only matters when both operands sit at the
    two's-complement negative extreme.
    """
    m = min(abs(a), abs(b))
    if spec is not None and m > spec.llr_max:
        m = spec.llr_max
    return -m if (a < 0) != (b < 0) else m


def g_llr(a: int | float, b: int | float, s: int, spec: QuantSpec | None = None) -> int | float:
    """Variable-node update: b + (1-2s)*a, saturated to the operand width."""
    r = b - a if s else b + a
    if spec is not None:
        r = min(max(r, spec.llr_min), spec.llr_max)
    return r


def saturating_pm_add(pm: int | float, penalty: int | float, spec: QuantSpec | None = None) -> int | float:
    """Accumulate a non-negative penalty onto an unsigned path metric.

    Saturates at 2**q_pm - 1 when a spec is given; monotone non-decreasing.
    """
    if penalty < 0:
        raise ValueError("path-metric penalty must be non-negative")
    r = pm + penalty
    if spec is not None and r > spec.pm_max:
        r = spec.pm_max
    return r


def hard_decision(llr: int | float) -> int:
    """Map an LLR to a bit: 0 for llr >= 0, else 1."""
    return 0 if llr >= 0 else 1


def quantize_channel_llr(y: float, spec: QuantSpec) -> int:
    """Quantize one real channel LLR: scale, round half away from zero,
    saturate to the q_c range. The value is then directly usable at the
    internal width since q_c <= q_i."""
    v = y * spec.channel_scale
    r = int(np.floor(abs(v) + 0.5))
    if v < 0:
        r = -r
    return min(max(r, spec.chan_min), spec.chan_max)


def quantize_llr_frame(y: np.ndarray, spec: QuantSpec) -> np.ndarray:
    """Vectorized ``quantize_channel_llr`` over a frame; returns int64."""
    v = np.asarray(y, dtype=np.float64) * spec.channel_scale
    r = np.sign(v) * np.floor(np.abs(v) + 0.5)
    return np.clip(r, spec.chan_min, spec.chan_max).astype(np.int64)


def auto_channel_scale(spec: QuantSpec, sigma: float) -> float:
    """Noise-adaptive LLR multiplier: quantize 2y/sigma, the receive
    samples normalized by the noise standard deviation (what an AGC
    produces), so the noise std always spans two quantizer steps.

    This balances resolution against the headroom the internal width
    needs for accumulation: a fixed multiplier starves low SNRs and
    blanket-saturates high ones. Channel words wider than 6 bits spend
    the extra bits on finer steps. Min-sum decoding is scale-invariant,
    so the choice only moves the saturation and resolution points.
    """
    return sigma * max(1.0, float(1 << spec.q_c) / 64.0)
