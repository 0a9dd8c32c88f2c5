"""Closed-form cycle counts and throughput of the sequential decoder modes.

These model a semi-parallel hardware schedule with P processing elements
(default 64); they deliberately do not count what the software decoders
execute. All counts are in clock cycles (CC).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np

from .code import PolarCode


def frozen_cluster_count(code_or_mask) -> int:
    """Number of maximal runs of consecutive frozen indices."""
    mask = code_or_mask.frozen_mask if isinstance(code_or_mask, PolarCode) else np.asarray(code_or_mask)
    if len(mask) == 0:
        return 0
    starts = int(mask[0] == 1) + int(np.sum((mask[1:] == 1) & (mask[:-1] == 0)))
    return starts


def latency_sc(N: int, b: int, P: int = 64) -> int | float:
    """SC decode latency: the semi-parallel baseline minus the savings
    from starting at the first information bit ``b``.

        2N + (N/P) log2(N/(4P)) - sum_i floor(b/2^i) ceil(2^i/P)

    The closed form is exact for N >= 4P; smaller blocklengths trigger a
    warning and return the raw (possibly fractional) formula value.
    """
    if N < 2 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    if P < 1 or P & (P - 1):
        raise ValueError(f"P must be a power of two >= 1, got {P}")
    if not 0 <= b < N:
        raise ValueError(f"first information bit {b} outside [0, {N})")
    if N < 4 * P:
        warnings.warn(
            f"latency formula is calibrated for N >= 4P = {4 * P}; "
            f"value for N = {N} is extrapolated",
            stacklevel=2,
        )
    base = 2 * N + (N / P) * math.log2(N / (4 * P))
    correction = sum((b >> i) * math.ceil((1 << i) / P) for i in range(int(math.log2(N)) + 1))
    value = base - correction
    return int(value) if value == int(value) else value


def latency_scl(N: int, b: int, k: int, f_c: int, P: int = 64) -> int | float:
    """SCL latency: SC latency plus one sorting cycle per information bit
    and per frozen-bit cluster. Independent of the list size."""
    if k < 0 or f_c < 0 or k + f_c > N:
        raise ValueError("inconsistent k / cluster count for blocklength")
    return latency_sc(N, b, P) + k + f_c


def latency_scf_worst(N: int, b: int, T: int, P: int = 64) -> int | float:
    """Worst-case SC-Flip latency: T full SC passes."""
    if T < 1:
        raise ValueError("trial count must be >= 1")
    return T * latency_sc(N, b, P)


def coded_throughput(N: int, cycles: float, f_clk: float) -> float:
    """Coded throughput N * f_clk / cycles in bps."""
    if cycles < 1:
        raise ValueError("cycle count must be >= 1")
    if f_clk <= 0:
        raise ValueError("clock frequency must be positive")
    return N * f_clk / cycles


@dataclass(frozen=True)
class LatencyReport:
    """One latency/throughput figure with the parameters that produced it."""

    algorithm: str
    N: int
    b: int
    k: int
    f_c: int
    cycles: float
    f_clk_hz: float
    coded_throughput_bps: float

    def to_dict(self) -> dict:
        return asdict(self)


def report(code: PolarCode, algorithm: str, f_clk: float, T: int = 8, P: int = 64) -> LatencyReport:
    """Build a LatencyReport for a code under one of the sequential modes."""
    f_c = frozen_cluster_count(code)
    alg = algorithm.lower()
    if alg == "sc":
        cyc = latency_sc(code.N, code.b, P)
    elif alg == "scl":
        cyc = latency_scl(code.N, code.b, code.k, f_c, P)
    elif alg == "scf-worst":
        cyc = latency_scf_worst(code.N, code.b, T, P)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return LatencyReport(
        algorithm=alg,
        N=code.N,
        b=code.b,
        k=code.k,
        f_c=f_c,
        cycles=cyc,
        f_clk_hz=f_clk,
        coded_throughput_bps=coded_throughput(code.N, cyc, f_clk),
    )
