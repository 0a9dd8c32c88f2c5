"""Tree-pruned fast-SSC decoding and unrolled-schedule accounting.

The frozen mask is pattern-matched into a tree of constituent decoders
(Rate-0, Rate-1, repetition, single parity check) with branch nodes where
no pattern applies. The same tree drives both the functional decoder and
the fully-unrolled pipeline schedule with its cycle count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .code import PolarCode, polar_transform
from .quant import QuantSpec
from .sc import DecodeOutcome, prepare_channel

#: width caps keeping the dedicated decoders' combinational paths short
MAX_REP_WIDTH = 8
MAX_SPC_WIDTH = 4

_KIND_CODE = {
    "rate0": _engine.NODE_RATE0,
    "rate1": _engine.NODE_RATE1,
    "rep": _engine.NODE_REP,
    "spc": _engine.NODE_SPC,
    "branch": _engine.NODE_BRANCH,
}


@dataclass(frozen=True)
class SscNode:
    """One node of the pruned decode tree covering ``width`` leaves
    starting at ``leaf_offset``."""

    kind: str
    width: int
    leaf_offset: int
    children: tuple["SscNode", ...] = field(default=())

    def __str__(self) -> str:
        if self.kind == "branch":
            return f"Branch({self.children[0]}, {self.children[1]})"
        return f"{self.kind.capitalize()}{self.width}"


def matched_leaf_kind(pattern: np.ndarray, max_rep: int, max_spc: int) -> str | None:
    """Leaf rule for a frozen-mask slice, or None if it must branch.

    Repetition is matched before the single parity check so the width-2
    pattern (frozen, info) decodes identically to plain SC.
    """
    w = len(pattern)
    total = int(np.sum(pattern))
    if total == w:
        return "rate0"
    if total == 0:
        return "rate1"
    if w >= 2 and total == w - 1 and pattern[-1] == 0 and w <= max_rep:
        return "rep"
    if w >= 2 and total == 1 and pattern[0] == 1 and w <= max_spc:
        return "spc"
    return None


def build_tree(
    code: PolarCode, max_rep: int = MAX_REP_WIDTH, max_spc: int = MAX_SPC_WIDTH
) -> SscNode:
    """Maximally prune the code's recursion tree under the width caps."""
    for cap in (max_rep, max_spc):
        if cap < 1 or cap & (cap - 1):
            raise ValueError("node width caps must be powers of two")

    def rec(offset: int, width: int) -> SscNode:
        kind = matched_leaf_kind(code.frozen_mask[offset : offset + width], max_rep, max_spc)
        if kind is not None:
            return SscNode(kind, width, offset)
        half = width // 2
        return SscNode(
            "branch", width, offset, (rec(offset, half), rec(offset + half, half))
        )

    return rec(0, code.N)


def tree_to_kinds(tree: SscNode, N: int) -> np.ndarray:
    """Flatten a tree into the heap-indexed kind array the kernel walks."""
    kinds = np.full(2 * N, _engine.NODE_BRANCH, dtype=np.int8)

    def rec(node: SscNode, depth: int, pos: int):
        kinds[(1 << depth) - 1 + pos] = _KIND_CODE[node.kind]
        for c_i, child in enumerate(node.children):
            rec(child, depth + 1, 2 * pos + c_i)

    rec(tree, 0, 0)
    return kinds


@dataclass(frozen=True)
class FastSscSchedule:
    """Ordered function stages of the unrolled pipeline plus its timing."""

    ops: tuple[tuple[str, int], ...]
    latency_cc: int
    initiation_interval: int

    def __str__(self) -> str:
        names = {"f": "F", "g": "G", "combine": "Combine", "rate0": "Rate0",
                 "rate1": "Rate1", "rep": "Rep", "spc": "SPC"}
        body = ", ".join(f"{names[op]}{w}" for op, w in self.ops)
        return f"[{body}] latency={self.latency_cc}cc ii={self.initiation_interval}"


def build_schedule(tree: SscNode, initiation_interval: int = 1) -> FastSscSchedule:
    """Topologically order the tree's functions into pipeline stages.

    Cost model: one clock cycle per function stage plus one to register
    the channel LLRs; a lone Rate-0 tree never reads the channel, so it
    needs only its own output stage.
    """
    if initiation_interval < 1:
        raise ValueError("initiation interval must be >= 1")
    ops: list[tuple[str, int]] = []

    def rec(node: SscNode):
        if node.kind == "branch":
            ops.append(("f", node.width))
            rec(node.children[0])
            ops.append(("g", node.width))
            rec(node.children[1])
            ops.append(("combine", node.width))
        else:
            ops.append((node.kind, node.width))

    rec(tree)
    reads_channel = not (tree.kind == "rate0")
    latency = len(ops) + (1 if reads_channel else 0)
    return FastSscSchedule(tuple(ops), latency, initiation_interval)


def unrolled_throughput(N: int, f_clk: float, initiation_interval: int) -> float:
    """Coded throughput of the unrolled pipeline: N * f_clk / I, in bps."""
    if initiation_interval < 1:
        raise ValueError("initiation interval must be >= 1")
    if f_clk <= 0:
        raise ValueError("clock frequency must be positive")
    return N * f_clk / initiation_interval


class FastSscDecoder:
    """Reusable decoder bound to one code (tree built once)."""

    def __init__(self, code: PolarCode, max_rep: int = MAX_REP_WIDTH,
                 max_spc: int = MAX_SPC_WIDTH):
        self.code = code
        self.tree = build_tree(code, max_rep, max_spc)
        self._kinds = tree_to_kinds(self.tree, code.N)

    def decode(self, channel, quant: QuantSpec | None = None) -> DecodeOutcome:
        code = self.code
        chan, lo, hi, _ = prepare_channel(channel, code, quant)
        x = np.empty(code.N, dtype=np.uint8)
        _engine.fast_ssc_decode(chan, self._kinds, code.n, lo, hi, x)
        u = polar_transform(x)
        info = x[code.info_indices] if code.systematic else u[code.info_indices]
        return DecodeOutcome(u_hat=u, info_bits=info.copy())


def decode_fast_ssc(code: PolarCode, channel, quant: QuantSpec | None = None) -> DecodeOutcome:
    """One-shot fast-SSC decode (builds the tree; loops should use
    ``FastSscDecoder``)."""
    return FastSscDecoder(code).decode(channel, quant)
