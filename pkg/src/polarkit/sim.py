"""BPSK / AWGN Monte Carlo engine for frame- and bit-error-rate curves.

Every frame derives its own counter-based random stream from
(master seed, Eb/N0 point index, frame index), so results are identical
regardless of worker count or scheduling. Stopping is checked on fixed
batch boundaries for the same reason.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .code import PolarCode, encode_payload
from .crc import CrcSpec, crc_append
from .fast_ssc import FastSscDecoder
from .quant import QuantSpec, auto_channel_scale, quantize_llr_frame
from .sc import decode_sc
from .scf import decode_scf
from .scl import decode_scl

MODES = ("sc", "scf", "scl", "fast-ssc")


def ebn0_to_sigma(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK at a given Eb/N0."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def frame_seed(master_seed: int, point_index: int, frame_index: int) -> int:
    """Deterministic per-frame key; low bit left free for sub-streams."""
    return (master_seed << 64) | (point_index << 40) | (frame_index << 1)


def awgn_llr_frame(codeword, sigma: float, seed: int) -> np.ndarray:
    """Transmit a codeword over BPSK/AWGN and return the real LLR frame
    2*y / sigma**2, with noise drawn from a counter-based generator."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(codeword, dtype=np.float64)
    rng = np.random.Generator(np.random.Philox(key=seed))
    y = (1.0 - 2.0 * x) + sigma * rng.standard_normal(len(x))
    return 2.0 * y / (sigma * sigma)


@dataclass(frozen=True)
class SimConfig:
    """One simulation setup; reusable across Eb/N0 points."""

    code: PolarCode
    mode: str = "sc"
    quant: QuantSpec | None = None
    L: int = 4
    trials: int = 8
    crc: CrcSpec | None = None
    ebn0_points_db: tuple[float, ...] = (4.0,)
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    master_seed: int = 0x5EED
    workers: int = 1
    batch_frames: int = 512
    eb_counts_crc: bool = True
    noiseless: bool = False
    channel_scale: float | None = None  # None: adapt to the noise level

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "scf" and self.crc is None:
            raise ValueError("SC-Flip simulation requires a CRC")
        if self.mode in ("sc", "fast-ssc") and self.crc is not None:
            raise ValueError(f"mode {self.mode!r} does not use a CRC")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if len(self.ebn0_points_db) == 0:
            raise ValueError("need at least one Eb/N0 point")
        if self.crc is not None and self.crc.length >= self.code.k:
            raise ValueError("CRC does not fit into the information payload")
        object.__setattr__(self, "ebn0_points_db", tuple(self.ebn0_points_db))

    @property
    def payload_bits(self) -> int:
        return self.code.k - (self.crc.length if self.crc else 0)

    @property
    def eb_rate(self) -> float:
        k_eff = self.code.k if self.eb_counts_crc else self.payload_bits
        return k_eff / self.code.N


@dataclass(frozen=True)
class CurvePoint:
    ebn0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    avg_trials: float
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "ebn0_db": self.ebn0_db,
            "frames": self.frames,
            "frame_errors": self.frame_errors,
            "bit_errors": self.bit_errors,
            "fer": self.fer,
            "ber": self.ber,
            "avg_trials": self.avg_trials,
            "wall_time": self.wall_time,
        }


def _make_decoder(config: SimConfig):
    code, quant = config.code, config.quant
    if config.mode == "sc":
        return lambda llr: decode_sc(code, llr, quant)
    if config.mode == "scf":
        return lambda llr: decode_scf(code, llr, quant, config.trials, config.crc)
    if config.mode == "scl":
        return lambda llr: decode_scl(code, llr, quant, config.L, config.crc)
    dec = FastSscDecoder(code)
    return lambda llr: dec.decode(llr, quant)


def _quantizer_for(config: SimConfig, sigma: float) -> QuantSpec | None:
    """Fixed-point spec for one operating point: the configured scale,
    or one adapted to sigma so the channel range is neither starved nor
    blanket-saturated."""
    if config.quant is None:
        return None
    scale = config.channel_scale
    if scale is None:
        scale = auto_channel_scale(config.quant, sigma)
    return replace(config.quant, channel_scale=scale)


def _simulate_frame(config: SimConfig, decoder, quant, sigma: float, point_index: int, frame_index: int):
    code = config.code
    kp = config.payload_bits
    base = frame_seed(config.master_seed, point_index, frame_index)
    data_rng = np.random.Generator(np.random.Philox(key=base))
    payload = data_rng.integers(0, 2, size=kp, dtype=np.uint8)
    message = crc_append(payload, config.crc) if config.crc else payload
    x = encode_payload(code, message)
    llr = awgn_llr_frame(x, sigma, base | 1)
    if quant is not None:
        llr = quantize_llr_frame(llr, quant)
    out = decoder(llr)
    errs = int(np.count_nonzero(out.info_bits[:kp] != payload))
    return (1 if errs else 0), errs, out.trials_used


def run_point(config: SimConfig, ebn0_db: float, point_index: int | None = None) -> CurvePoint:
    """Simulate one Eb/N0 point until ``min_frame_errors`` frame errors
    have been seen at a batch boundary, or ``max_frames`` frames."""
    if point_index is None:
        pts = list(config.ebn0_points_db)
        point_index = pts.index(ebn0_db) if ebn0_db in pts else 0
    sigma = 1e-6 if config.noiseless else ebn0_to_sigma(ebn0_db, config.eb_rate)
    quant = _quantizer_for(config, sigma)
    decoder = _make_decoder(config)

    t0 = time.perf_counter()
    frames = frame_errors = bit_errors = 0
    trials_sum = 0
    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        while frames < config.max_frames and frame_errors < config.min_frame_errors:
            batch = min(config.batch_frames, config.max_frames - frames)
            idx = range(frames, frames + batch)
            if pool is not None:
                results = list(
                    pool.map(
                        lambda fi: _simulate_frame(config, decoder, quant, sigma, point_index, fi),
                        idx,
                    )
                )
            else:
                results = [
                    _simulate_frame(config, decoder, quant, sigma, point_index, fi) for fi in idx
                ]
            for fe, be, tr in results:
                frame_errors += fe
                bit_errors += be
                trials_sum += tr
            frames += batch
    finally:
        if pool is not None:
            pool.shutdown()

    return CurvePoint(
        ebn0_db=ebn0_db,
        frames=frames,
        frame_errors=frame_errors,
        bit_errors=bit_errors,
        fer=frame_errors / frames,
        ber=bit_errors / (frames * config.payload_bits),
        avg_trials=trials_sum / frames,
        wall_time=time.perf_counter() - t0,
    )


def run_sweep(config: SimConfig, progress=None) -> list[CurvePoint]:
    points = []
    for i, ebn0 in enumerate(config.ebn0_points_db):
        pt = run_point(config, ebn0, point_index=i)
        points.append(pt)
        if progress is not None:
            progress(pt)
    return points


CSV_HEADER = "ebn0_db,frames,frame_errors,bit_errors,fer,ber,avg_trials"


def points_to_csv(points: list[CurvePoint]) -> str:
    lines = [CSV_HEADER]
    for p in points:
        lines.append(
            f"{p.ebn0_db!r},{p.frames},{p.frame_errors},{p.bit_errors},"
            f"{p.fer!r},{p.ber!r},{p.avg_trials!r}"
        )
    return "\n".join(lines) + "\n"


def points_to_json(points: list[CurvePoint]) -> str:
    return json.dumps([p.to_dict() for p in points], indent=2) + "\n"


def config_at(config: SimConfig, **changes) -> SimConfig:
    """Convenience wrapper around dataclasses.replace."""
    return replace(config, **changes)
