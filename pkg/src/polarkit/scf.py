"""SC-Flip decoding: CRC-gated retries around SC.

The first trial is plain SC while an insertion sorter collects the T-1
least reliable information-bit decisions. Each retry re-runs SC from the
first information bit with exactly one of those decisions inverted, in
increasing order of first-trial reliability, until the CRC passes or the
trial budget is spent.
"""

from __future__ import annotations

import numpy as np

from .code import PolarCode
from .crc import CrcSpec, crc_check
from .quant import QuantSpec
from .sc import DecodeOutcome, _sc_run, prepare_channel

MAX_TRIALS = 32


class FlipList:
    """Fixed-capacity insertion sorter of (magnitude, bit index) pairs.

    Keeps the ``capacity`` smallest magnitudes seen, ascending. Entries
    start as sentinels at the maximum representable magnitude; a new value
    is stored only if it beats the current worst entry, with equal
    magnitudes ranked in arrival order (lower bit index first, since the
    decoder streams decisions in index order).
    """

    __slots__ = ("capacity", "magnitudes", "indices", "_sentinel")

    def __init__(self, capacity: int, max_magnitude):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        self._sentinel = max_magnitude
        self.magnitudes = [max_magnitude] * capacity
        self.indices = [-1] * capacity

    def insert(self, magnitude, index: int) -> None:
        if magnitude < 0:
            raise ValueError("magnitude must be non-negative")
        pos = 0
        while pos < self.capacity and self.magnitudes[pos] <= magnitude:
            pos += 1
        if pos >= self.capacity:
            return
        self.magnitudes.insert(pos, magnitude)
        self.indices.insert(pos, index)
        self.magnitudes.pop()
        self.indices.pop()

    @property
    def entries(self) -> list[tuple[float, int]]:
        return list(zip(self.magnitudes, self.indices))

    def valid_count(self) -> int:
        return sum(1 for i in self.indices if i >= 0)


def flip_list_insert(flips: FlipList, magnitude, index: int) -> FlipList:
    flips.insert(magnitude, index)
    return flips


def build_flip_list(magnitudes, info_indices, capacity: int, max_magnitude) -> FlipList:
    """Populate a FlipList from first-trial decision magnitudes."""
    flips = FlipList(capacity, max_magnitude)
    for mag, idx in zip(magnitudes, info_indices):
        flips.insert(mag, int(idx))
    return flips


def decode_scf(
    code: PolarCode,
    channel,
    quant: QuantSpec | None,
    trials: int,
    crc: CrcSpec,
) -> DecodeOutcome:
    """Decode one frame with SC-Flip using at most ``trials`` attempts.

    The CRC bits must occupy the tail of the information payload (as
    produced by ``crc_append`` before encoding). With ``trials`` = 1 this
    is SC plus a CRC verdict.
    """
    if not 1 <= trials <= MAX_TRIALS:
        raise ValueError(f"trials must be in [1, {MAX_TRIALS}], got {trials}")
    if crc is None:
        raise ValueError("SC-Flip requires a CRC")
    chan, lo, hi, _ = prepare_channel(channel, code, quant)

    def outcome_of(u, mag, x, used):
        info = x[code.info_indices] if code.systematic else u[code.info_indices]
        return info, DecodeOutcome(
            u_hat=u,
            info_bits=info,
            decision_magnitudes=mag[code.info_indices],
            trials_used=used,
            crc_ok=None,
        )

    u, mag, x = _sc_run(code, chan, lo, hi)
    info, first = outcome_of(u, mag, x, 1)
    if crc_check(info, crc):
        return DecodeOutcome(u, info, first.decision_magnitudes, 1, True)

    sentinel = np.inf if quant is None else -int(np.int64(lo))
    flips = build_flip_list(mag[code.info_indices], code.info_indices, trials - 1, sentinel)

    last = first
    used = 1
    for j in range(2, trials + 1):
        if j - 1 > flips.valid_count():
            break
        flip_index = flips.indices[j - 2]
        u, mag_j, x = _sc_run(code, chan, lo, hi, flip_index=flip_index)
        used = j
        info, last = outcome_of(u, mag_j, x, j)
        if crc_check(info, crc):
            return DecodeOutcome(u, info, last.decision_magnitudes, j, True)
    return DecodeOutcome(last.u_hat, last.info_bits, last.decision_magnitudes, used, False)
