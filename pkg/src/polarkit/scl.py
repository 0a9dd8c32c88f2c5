"""CRC-aided successive-cancellation list decoding.

Paths fork at every information bit and a pruned sort keeps the L best
by path metric. Path LLR and partial-sum state is shared through per
depth pointer tables and only physically copied on first write, which is
observably identical to deep-copying at every fork.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .code import PolarCode, polar_transform
from .crc import CrcSpec, crc_check
from .quant import QuantSpec, hard_decision, saturating_pm_add
from .sc import DecodeOutcome, prepare_channel


def pm_update(pm, decision_llr, bit: int, spec: QuantSpec | None = None):
    """Path-metric step: free when the bit agrees with the decision LLR,
    otherwise pay |LLR| (saturating)."""
    if bit == hard_decision(decision_llr):
        return pm
    return saturating_pm_add(pm, abs(decision_llr), spec)


@dataclass(frozen=True)
class ForkCandidate:
    parent: int
    bit: int
    metric: float | int


def prune_to_L(candidates: list[ForkCandidate], L: int) -> list[ForkCandidate]:
    """Keep the L smallest-metric candidates; ties resolve by parent id,
    then bit 0 before 1. Survivors come back in that canonical order."""
    ranked = sorted(candidates, key=lambda c: (c.metric, c.parent, c.bit))
    return ranked[: min(L, len(candidates))]


class PathSet:
    """Pooled per-depth LLR / partial-sum storage for up to L paths.

    Depth 0 is the read-only channel row. Each path references one slot
    per depth; ``write_llr``/``write_partial_sums`` go through the same
    copy-on-write helper the list-decoder kernel uses, so a clone shares
    storage until one side writes.
    """

    def __init__(self, n: int, L: int, channel=None, dtype=np.float64):
        if L < 1:
            raise ValueError("L must be >= 1")
        self.n = n
        self.N = 1 << n
        self.L = L
        self.nslots = 2 * L + 2
        self.dtype = np.dtype(dtype)

        self.size_l = np.array([self.N >> d for d in range(n + 1)], np.int64)
        self.size_c = np.array([0] + [self.N >> (d - 1) for d in range(1, n + 1)], np.int64)
        self.base_l = np.concatenate([[0], np.cumsum(self.nslots * self.size_l)[:-1]])
        self.base_c = np.concatenate([[0], np.cumsum(self.nslots * self.size_c)[:-1]])
        self.buf_l = np.zeros(int(self.nslots * self.size_l.sum()), dtype=self.dtype)
        self.buf_c = np.zeros(int(self.nslots * self.size_c.sum()), dtype=np.uint8)
        self.ptr_l = np.zeros((L, n + 1), np.int32)
        self.ptr_c = np.zeros((L, n + 1), np.int32)
        self.ref_l = np.zeros((n + 1, self.nslots), np.int32)
        self.ref_c = np.zeros((n + 1, self.nslots), np.int32)

        if channel is not None:
            self.buf_l[: self.N] = np.asarray(channel, dtype=self.dtype)
        self.ref_l[0, 0] = 1 << 30
        for d in range(1, n + 1):
            self.ref_l[d, 0] = 1
            self.ref_c[d, 0] = 1

        self.u = np.zeros((L, self.N), np.uint8)
        self.metrics = np.zeros(L, dtype=self.dtype)
        self.active_count = 1

    def _check(self, path: int, depth: int):
        if not 0 <= path < self.active_count:
            raise IndexError(f"path {path} not active")
        if not 0 <= depth <= self.n:
            raise IndexError(f"depth {depth} out of range")

    def clone_path(self, parent: int) -> int:
        """Clone a path, sharing all per-depth storage; returns the new id."""
        self._check(parent, 0)
        if self.active_count >= self.L:
            raise RuntimeError(f"path capacity {self.L} exhausted")
        child = self.active_count
        self.ptr_l[child] = self.ptr_l[parent]
        self.ptr_c[child] = self.ptr_c[parent]
        for d in range(1, self.n + 1):
            self.ref_l[d, self.ptr_l[child, d]] += 1
            self.ref_c[d, self.ptr_c[child, d]] += 1
        self.u[child] = self.u[parent]
        self.metrics[child] = self.metrics[parent]
        self.active_count += 1
        return child

    def _span_l(self, path, depth):
        off = self.base_l[depth] + self.ptr_l[path, depth] * self.size_l[depth]
        return int(off), int(self.size_l[depth])

    def _span_c(self, path, depth):
        off = self.base_c[depth] + self.ptr_c[path, depth] * self.size_c[depth]
        return int(off), int(self.size_c[depth])

    def read_llr(self, path: int, depth: int) -> np.ndarray:
        self._check(path, depth)
        off, size = self._span_l(path, depth)
        return self.buf_l[off : off + size].copy()

    def write_llr(self, path: int, depth: int, values) -> None:
        self._check(path, depth)
        values = np.asarray(values, dtype=self.dtype)
        if values.shape != (int(self.size_l[depth]),):
            raise ValueError(f"depth {depth} holds {int(self.size_l[depth])} LLRs")
        off = _engine.cow_write(
            self.buf_l, self.ptr_l, self.ref_l, self.base_l, self.size_l,
            self.nslots, path, depth, True,
        )
        self.buf_l[off : off + len(values)] = values

    def read_partial_sums(self, path: int, depth: int) -> np.ndarray:
        self._check(path, depth)
        off, size = self._span_c(path, depth)
        return self.buf_c[off : off + size].copy()

    def write_partial_sums(self, path: int, depth: int, values) -> None:
        self._check(path, depth)
        values = np.asarray(values, dtype=np.uint8)
        if values.shape != (int(self.size_c[depth]),):
            raise ValueError(f"depth {depth} holds {int(self.size_c[depth])} partial sums")
        off = _engine.cow_write(
            self.buf_c, self.ptr_c, self.ref_c, self.base_c, self.size_c,
            self.nslots, path, depth, True,
        )
        self.buf_c[off : off + len(values)] = values


def clone_path_state(paths: PathSet, parent: int) -> int:
    return paths.clone_path(parent)


def _valid_list_size(L: int) -> int:
    if L < 1 or (L & (L - 1)) != 0:
        raise ValueError(f"list size must be a power of two, got {L}")
    if L > 256:
        raise ValueError(f"list size {L} unreasonably large (max 256)")
    return L


def decode_scl(
    code: PolarCode,
    channel,
    quant: QuantSpec | None = None,
    L: int = 4,
    crc: CrcSpec | None = None,
) -> DecodeOutcome:
    """List-decode one frame, keeping up to L candidate paths.

    Selection picks the smallest-metric candidate that passes the CRC;
    if none passes (or no CRC is configured) the smallest metric wins.
    With L=1 and no CRC this is bit-identical to ``decode_sc``.
    """
    L = _valid_list_size(L)
    chan, lo, hi, pm_cap = prepare_channel(channel, code, quant)
    x_paths = np.empty((L, code.N), np.uint8)
    pm = np.empty(L, dtype=chan.dtype)
    active = _engine.scl_decode(
        chan, code.frozen_mask, code.n, code.b, L, lo, hi, pm_cap, x_paths, pm
    )
    # stable sort keeps the canonical order of the final prune on ties
    order = np.argsort(pm[:active], kind="stable")
    u_of = {}  # u-trajectory = polar transform of the codeword estimate

    def info_of(idx: int) -> np.ndarray:
        if code.systematic:
            return x_paths[idx][code.info_indices].copy()
        if idx not in u_of:
            u_of[idx] = polar_transform(x_paths[idx])
        return u_of[idx][code.info_indices].copy()

    chosen = int(order[0])
    crc_ok = None
    if crc is not None:
        crc_ok = False
        for idx in order:
            info = info_of(int(idx))
            if crc_check(info, crc):
                chosen = int(idx)
                crc_ok = True
                break
    info = info_of(chosen)
    u_hat = u_of.get(chosen)
    if u_hat is None:
        u_hat = polar_transform(x_paths[chosen])
    return DecodeOutcome(
        u_hat=u_hat,
        info_bits=info,
        decision_magnitudes=None,
        trials_used=1,
        crc_ok=crc_ok,
    )
