"""Polar code definition, construction, and encoding.

A code is fully described by its blocklength ``N = 2**n`` and an N-bit
frozen mask (1 = frozen, 0 = information). Masks can be constructed from
a design SNR or loaded from a file, so externally designed frozen sets
can be injected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _as_bits(v, length: int | None = None) -> np.ndarray:
    bits = np.asarray(v, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("bit vector must be one-dimensional")
    if np.any(bits > 1):
        raise ValueError("bit vector elements must be 0 or 1")
    if length is not None and len(bits) != length:
        raise ValueError(f"expected length {length}, got {len(bits)}")
    return bits


@dataclass(frozen=True)
class PolarCode:
    """An (N, k) polar code given by its frozen mask.

    Attributes
    ----------
    frozen_mask : ndarray of uint8, shape (N,)
        1 marks a frozen position, 0 an information position.
    systematic : bool
        Whether payloads are carried in codeword positions (systematic
        encoding) rather than in the u-domain.
    """

    frozen_mask: np.ndarray
    systematic: bool = False
    n: int = field(init=False)
    N: int = field(init=False)
    k: int = field(init=False)
    b: int = field(init=False)
    info_indices: np.ndarray = field(init=False)

    def __post_init__(self):
        mask = _as_bits(self.frozen_mask)
        N = len(mask)
        if N < 2 or N & (N - 1):
            raise ValueError(f"blocklength must be a power of two >= 2, got {N}")
        info = np.flatnonzero(mask == 0)
        if len(info) == 0:
            raise ValueError("code must have at least one information bit")
        mask = mask.copy()
        mask.setflags(write=False)
        object.__setattr__(self, "frozen_mask", mask)
        object.__setattr__(self, "n", int(np.log2(N)))
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "k", int(len(info)))
        object.__setattr__(self, "b", int(info[0]))
        info.setflags(write=False)
        object.__setattr__(self, "info_indices", info)

    @property
    def rate(self) -> float:
        return self.k / self.N

    def __str__(self) -> str:
        tag = ", systematic" if self.systematic else ""
        return f"PolarCode({self.N}, {self.k}{tag})"


def bhattacharyya_profile(N: int, erasure_prob: float) -> np.ndarray:
    """Log-domain Bhattacharyya parameters of the N synthetic channels of
    a BEC with the given erasure probability.

    The recursion tracks both ln(Z) and ln(1-Z), so channels stay fully
    ordered on both the polarized-good and polarized-bad side, where a
    single-sided representation would collapse to 0 or 1. Returns an
    (N, 2) array of [ln(Z), ln(1-Z)] rows; larger Z means less reliable.
    """
    if N < 2 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    if not 0 < erasure_prob < 1:
        raise ValueError(f"erasure probability must be in (0, 1), got {erasure_prob}")
    lz = np.array([np.log(erasure_prob)])
    ld = np.array([np.log1p(-erasure_prob)])
    n = int(np.log2(N))
    with np.errstate(divide="ignore"):  # fully polarized channels hit log(0)
        for _ in range(n):
            # minus: z' = 2z - z^2, i.e. 1-z' = (1-z)^2
            ld_minus = 2.0 * ld
            lz_minus = np.log1p(-np.exp(ld_minus))
            # plus: z' = z^2, i.e. 1-z' = (1-z)(1+z); clamp rounding noise
            lz_plus = 2.0 * lz
            ld_plus = np.minimum(ld + np.log1p(np.exp(lz)), 0.0)
            # interleave: the newly split bit is the least significant,
            # matching the natural (non-bit-reversed) decode order
            lz = np.empty(2 * len(lz))
            ld = np.empty_like(lz)
            lz[0::2], lz[1::2] = lz_minus, lz_plus
            ld[0::2], ld[1::2] = ld_minus, ld_plus
    return np.stack([lz, ld], axis=1)


#: exponent applied to the BPSK-AWGN Bhattacharyya bound when mapping it
#: onto the surrogate erasure channel; compensates the BEC recursion's
#: pessimism so the frozen sets track density-evolution orderings
BHATTACHARYYA_CAL = 1.25


def design_erasure_prob(rate: float, design_snr_db: float) -> float:
    """Erasure parameter of the surrogate BEC for a design point.

    The BPSK-AWGN channel at rate R and Eb/N0 g has Bhattacharyya bound
    exp(-R*g); the calibrated power of it is used as the BEC erasure
    probability."""
    return float(np.exp(-BHATTACHARYYA_CAL * rate * 10.0 ** (design_snr_db / 10.0)))


def construct_frozen_set(N: int, k: int, design_snr_db: float = 0.0) -> np.ndarray:
    """Build a frozen mask freezing the N-k least reliable positions.

    Reliability ordering comes from the Bhattacharyya recursion on a
    surrogate erasure channel matched to the design SNR at rate k/N;
    exact ties freeze the lower index first, making the construction
    fully deterministic.

    Returns
    -------
    ndarray of uint8, shape (N,), with exactly N-k ones.
    """
    if N < 2 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    if not 1 <= k <= N:
        raise ValueError(f"k must be in [1, {N}], got {k}")
    prof = bhattacharyya_profile(N, design_erasure_prob(k / N, design_snr_db))
    # least reliable first: smallest ln(1-Z), then largest ln(Z); stable
    # sort leaves exact ties ordered by lower index
    order = np.lexsort((-prof[:, 0], prof[:, 1]))
    mask = np.zeros(N, dtype=np.uint8)
    mask[order[: N - k]] = 1
    return mask


def encode(code: PolarCode, u: np.ndarray) -> np.ndarray:
    """Polar transform x = u * F**(x)n over GF(2) via the butterfly graph.

    Raises if any frozen position of ``u`` is nonzero.
    """
    u = _as_bits(u, code.N)
    if np.any(u[code.frozen_mask == 1]):
        raise ValueError("nonzero value at a frozen index")
    return polar_transform(u)


def polar_transform(v: np.ndarray) -> np.ndarray:
    """Apply F**(x)n to any N-bit vector (its own inverse over GF(2))."""
    x = _as_bits(v).copy()
    N = len(x)
    h = 1
    while h < N:
        pairs = x.reshape(-1, 2 * h)
        pairs[:, :h] ^= pairs[:, h:]
        h *= 2
    return x


def insert_info(code: PolarCode, payload: np.ndarray) -> np.ndarray:
    """Scatter k payload bits into the information positions of a u-vector."""
    payload = _as_bits(payload, code.k)
    u = np.zeros(code.N, dtype=np.uint8)
    u[code.info_indices] = payload
    return u


def extract_info(code: PolarCode, v: np.ndarray) -> np.ndarray:
    """Read the k bits at information positions, in ascending index order."""
    v = _as_bits(v, code.N)
    return v[code.info_indices].copy()


def encode_systematic(code: PolarCode, payload: np.ndarray) -> np.ndarray:
    """Systematic encoding: codeword x with x[info positions] = payload.

    Uses the encode / zero-frozen / encode two-pass method; the result is
    a valid codeword of the same code.
    """
    payload = _as_bits(payload, code.k)
    t = polar_transform(insert_info(code, payload))
    t[code.frozen_mask == 1] = 0
    return polar_transform(t)


def encode_payload(code: PolarCode, payload: np.ndarray) -> np.ndarray:
    """Encode a k-bit payload to a codeword, honoring ``code.systematic``."""
    if code.systematic:
        return encode_systematic(code, payload)
    return encode(code, insert_info(code, payload))


# ---------------------------------------------------------------------------
# Frozen-set file format: line 1 "N k", line 2 the mask as N '0'/'1' chars
# or as hex with an 0x prefix (most-significant character = indices 0..3).
# ---------------------------------------------------------------------------

def save_frozen_set(path: str | Path, mask: np.ndarray, k: int | None = None) -> None:
    mask = _as_bits(mask)
    N = len(mask)
    if k is None:
        k = int(np.sum(mask == 0))
    with open(path, "w") as f:
        f.write(f"{N} {k}\n")
        f.write("".join("1" if b else "0" for b in mask) + "\n")


def load_frozen_set(path: str | Path) -> np.ndarray:
    """Read a frozen mask file; returns the uint8 mask."""
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: first line must be 'N k'")
        N, k = int(header[0]), int(header[1])
        body = f.readline().strip()
    if body.lower().startswith("0x"):
        digits = body[2:]
        if len(digits) * 4 < N:
            raise ValueError(f"{path}: hex mask too short for N={N}")
        bits = []
        for c in digits:
            v = int(c, 16)
            bits.extend(((v >> 3) & 1, (v >> 2) & 1, (v >> 1) & 1, v & 1))
        mask = np.array(bits[:N], dtype=np.uint8)
    else:
        if len(body) != N:
            raise ValueError(f"{path}: mask has {len(body)} characters, expected {N}")
        mask = np.array([int(c) for c in body], dtype=np.uint8)
    if int(np.sum(mask)) != N - k:
        raise ValueError(f"{path}: mask has {int(np.sum(mask))} ones, header implies {N - k}")
    return mask


def load_code(path: str | Path, systematic: bool = False) -> PolarCode:
    return PolarCode(load_frozen_set(path), systematic=systematic)
