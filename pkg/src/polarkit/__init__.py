"""Polar-code toolkit: encoding, SC / SC-Flip / CRC-aided SCL / fast-SSC
decoding, fixed-point modeling, cycle-count estimates, and an AWGN
Monte Carlo harness."""

from .code import (
    PolarCode,
    construct_frozen_set,
    encode,
    encode_payload,
    encode_systematic,
    extract_info,
    insert_info,
    load_code,
    load_frozen_set,
    polar_transform,
    save_frozen_set,
)
from .crc import CRC4, CRC8, CRC16, CrcSpec, crc_append, crc_check, crc_compute, crc_spec
from .fast_ssc import (
    FastSscDecoder,
    FastSscSchedule,
    SscNode,
    build_schedule,
    build_tree,
    decode_fast_ssc,
    unrolled_throughput,
)
from .latency import (
    LatencyReport,
    coded_throughput,
    frozen_cluster_count,
    latency_sc,
    latency_scf_worst,
    latency_scl,
)
from .quant import (
    FLEXIBLE_QUANT,
    UNROLLED_QUANT,
    QuantSpec,
    f_min_sum,
    g_llr,
    hard_decision,
    parse_quant,
    quantize_channel_llr,
    quantize_llr_frame,
    saturating_pm_add,
)
from .sc import DecodeOutcome, decode_sc
from .scf import FlipList, decode_scf, flip_list_insert
from .scl import ForkCandidate, PathSet, clone_path_state, decode_scl, pm_update, prune_to_L
from .sim import CurvePoint, SimConfig, awgn_llr_frame, ebn0_to_sigma, frame_seed, run_point, run_sweep

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
