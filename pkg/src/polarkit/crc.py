"""Serial CRC computation for the three supported length/polynomial pairs.

Convention: zero initial register, no bit reflection, no final XOR.
The remainder of message(x) * x**len modulo the polynomial is appended
MSB-first after the payload. Encoder and decoder share the convention,
so error-rate results do not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine


@dataclass(frozen=True)
class CrcSpec:
    """CRC length in bits and polynomial mask excluding the leading term."""

    length: int
    poly: int

    def __post_init__(self):
        if not 1 <= self.length <= 64:
            raise ValueError(f"unsupported CRC length {self.length}")
        if self.poly >> self.length:
            raise ValueError("polynomial mask wider than CRC length")


CRC4 = CrcSpec(4, 0b0011)            # x^4 + x + 1
CRC8 = CrcSpec(8, 0b1001_0111)       # x^8 + x^7 + x^4 + x^2 + x + 1
CRC16 = CrcSpec(16, 0x1021)          # x^16 + x^12 + x^5 + 1

BUILTIN = {4: CRC4, 8: CRC8, 16: CRC16}


def crc_spec(length: int | str | None) -> CrcSpec | None:
    """Look up a built-in CRC by length; 'none'/0/None disables it."""
    if length in (None, 0, "none", "0"):
        return None
    length = int(length)
    if length not in BUILTIN:
        raise ValueError(f"no built-in CRC of length {length}; choose from {sorted(BUILTIN)}")
    return BUILTIN[length]


class CrcState:
    """Bit-serial CRC register; feeding bits one at a time matches the
    block computation exactly."""

    __slots__ = ("spec", "reg")

    def __init__(self, spec: CrcSpec):
        self.spec = spec
        self.reg = 0

    def update(self, bit: int) -> None:
        msb = (self.reg >> (self.spec.length - 1)) & 1
        self.reg = (self.reg << 1) & ((1 << self.spec.length) - 1)
        if msb ^ (bit & 1):
            self.reg ^= self.spec.poly

    def remainder(self) -> np.ndarray:
        c = self.spec.length
        return np.array([(self.reg >> (c - 1 - i)) & 1 for i in range(c)], dtype=np.uint8)


def crc_compute(message: np.ndarray, spec: CrcSpec) -> np.ndarray:
    """CRC remainder of a bit vector, index 0 processed first.

    Returns ``spec.length`` bits, most significant first.
    """
    message = np.ascontiguousarray(message, dtype=np.uint8)
    reg = int(_engine.crc_remainder(message, spec.poly, spec.length))
    c = spec.length
    return np.array([(reg >> (c - 1 - i)) & 1 for i in range(c)], dtype=np.uint8)


def crc_append(message: np.ndarray, spec: CrcSpec) -> np.ndarray:
    message = np.asarray(message, dtype=np.uint8)
    return np.concatenate([message, crc_compute(message, spec)])


def crc_check(message_with_crc: np.ndarray, spec: CrcSpec) -> bool:
    """True iff the trailing ``spec.length`` bits match the payload CRC."""
    v = np.asarray(message_with_crc, dtype=np.uint8)
    if len(v) <= spec.length:
        raise ValueError(f"input of length {len(v)} cannot hold a {spec.length}-bit CRC")
    payload, tail = v[: -spec.length], v[-spec.length :]
    return bool(np.array_equal(crc_compute(payload, spec), tail))
