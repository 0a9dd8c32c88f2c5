"""Command-line front end.

Thin adapters only: parse flags, call the library, format JSON (single
results) or CSV (sweeps). Exit codes: 0 success, 2 usage or configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import latency as lat
from .code import (
    PolarCode,
    construct_frozen_set,
    encode_payload,
    insert_info,
    load_code,
    save_frozen_set,
)
from .crc import crc_append, crc_spec
from .fast_ssc import FastSscDecoder, build_schedule, build_tree, unrolled_throughput
from .quant import parse_quant
from .sc import decode_sc
from .scf import decode_scf
from .scl import decode_scl
from .sim import SimConfig, points_to_csv, points_to_json, run_sweep


def bits_to_hex(bits) -> str:
    bits = "".join(str(int(b)) for b in bits)
    if not bits:
        return ""
    pad = (-len(bits)) % 4
    return format(int(bits + "0" * pad, 2), f"0{(len(bits) + pad) // 4}x")


def hex_to_bits(text: str, nbits: int) -> np.ndarray:
    digits = text[2:] if text.lower().startswith("0x") else text
    raw = bin(int(digits, 16))[2:].zfill(4 * len(digits))
    if len(raw) < nbits:
        raise ValueError(f"hex payload holds {len(raw)} bits, need {nbits}")
    return np.array([int(c) for c in raw[:nbits]], dtype=np.uint8)


def parse_bits(text: str, nbits: int) -> np.ndarray:
    t = text.strip()
    if set(t) <= {"0", "1"} and len(t) == nbits:
        return np.array([int(c) for c in t], dtype=np.uint8)
    return hex_to_bits(t, nbits)


def _load_code_args(args) -> PolarCode:
    systematic = bool(getattr(args, "systematic", False))
    if getattr(args, "code", None):
        return load_code(args.code, systematic=systematic)
    if args.N is None or args.k is None:
        raise ValueError("give either --code FILE or -N and -k (with --snr)")
    mask = construct_frozen_set(args.N, args.k, args.snr)
    return PolarCode(mask, systematic=systematic)


def _read_llrs(args, code: PolarCode, quant):
    text = sys.stdin.read() if args.llrs in (None, "-") else open(args.llrs).read()
    tokens = text.split()
    if len(tokens) != code.N:
        raise ValueError(f"expected {code.N} LLR values, got {len(tokens)}")
    if quant is None:
        return np.array([float(t) for t in tokens])
    return np.array([int(t) for t in tokens], dtype=np.int64)


def cmd_construct(args) -> int:
    mask = construct_frozen_set(args.N, args.k, args.snr)
    if args.out:
        save_frozen_set(args.out, mask, args.k)
    else:
        sys.stdout.write(f"{args.N} {args.k}\n" + "".join(str(b) for b in mask) + "\n")
    return 0


def cmd_encode(args) -> int:
    code = _load_code_args(args)
    crc = crc_spec(args.crc)
    kp = code.k - (crc.length if crc else 0)
    payload = parse_bits(args.payload, kp)
    message = crc_append(payload, crc) if crc else payload
    x = encode_payload(code, message)
    u = insert_info(code, message) if not code.systematic else None
    out = {"x_hex": bits_to_hex(x), "payload_hex": bits_to_hex(payload)}
    if u is not None:
        out["u_hex"] = bits_to_hex(u)
    print(json.dumps(out))
    return 0


def cmd_decode(args) -> int:
    code = _load_code_args(args)
    quant = parse_quant(args.quant)
    crc = crc_spec(args.crc)
    if args.mode in ("sc", "fast-ssc") and crc is not None:
        raise ValueError(f"--crc conflicts with --mode {args.mode}")
    llrs = _read_llrs(args, code, quant)
    if args.mode == "sc":
        out = decode_sc(code, llrs, quant)
    elif args.mode == "scf":
        out = decode_scf(code, llrs, quant, args.trials, crc)
    elif args.mode == "scl":
        out = decode_scl(code, llrs, quant, args.list, crc)
    else:
        out = FastSscDecoder(code).decode(llrs, quant)
    kp = code.k - (crc.length if crc else 0)
    print(
        json.dumps(
            {
                "payload_hex": bits_to_hex(out.info_bits[:kp]),
                "trials_used": out.trials_used,
                "crc_ok": out.crc_ok,
            }
        )
    )
    return 0


def cmd_simulate(args) -> int:
    code = _load_code_args(args)
    config = SimConfig(
        code=code,
        mode=args.mode,
        quant=parse_quant(args.quant),
        L=args.list,
        trials=args.trials,
        crc=crc_spec(args.crc),
        ebn0_points_db=tuple(float(t) for t in args.ebn0.split(",")),
        min_frame_errors=args.errors,
        max_frames=args.max_frames,
        master_seed=args.seed,
        workers=args.workers,
        eb_counts_crc=not args.payload_eb,
    )

    def progress(pt):
        print(
            f"# ebn0={pt.ebn0_db} frames={pt.frames} errors={pt.frame_errors} "
            f"fer={pt.fer:.3e} ({pt.wall_time:.1f}s)",
            file=sys.stderr,
        )

    points = run_sweep(config, progress=progress)
    text = points_to_json(points) if args.json else points_to_csv(points)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_latency(args) -> int:
    code = _load_code_args(args)
    if args.unrolled:
        schedule = build_schedule(build_tree(code), args.ii)
        tput = unrolled_throughput(code.N, args.f_clk, args.ii)
        print(
            json.dumps(
                {
                    "ops": [f"{op}{w}" for op, w in schedule.ops],
                    "latency_cc": schedule.latency_cc,
                    "initiation_interval": schedule.initiation_interval,
                    "f_clk_hz": args.f_clk,
                    "coded_throughput_bps": tput,
                }
            )
        )
        return 0
    rep = lat.report(code, args.algorithm, args.f_clk, T=args.trials, P=args.pe)
    print(json.dumps(rep.to_dict()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polarkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_code_args(sp, need_snr=True):
        sp.add_argument("--code", help="frozen-set file")
        sp.add_argument("-N", type=int, help="blocklength (construct on the fly)")
        sp.add_argument("-k", type=int, help="information bits incl. CRC")
        if need_snr:
            sp.add_argument("--snr", type=float, default=0.0, help="design SNR in dB")
        sp.add_argument("--systematic", action="store_true")

    sp = sub.add_parser("construct", help="build a frozen-set file")
    sp.add_argument("-N", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("--snr", type=float, default=0.0)
    sp.add_argument("-o", "--out", help="output path (default: stdout)")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("encode", help="encode a payload")
    add_code_args(sp)
    sp.add_argument("--crc", default="none", help="none, 4, 8 or 16")
    sp.add_argument("payload", help="payload as bits or hex")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="decode one LLR frame")
    add_code_args(sp)
    sp.add_argument("--mode", choices=["sc", "scf", "scl", "fast-ssc"], default="sc")
    sp.add_argument("--quant", default="float", help="QI.QC[:QPM] or 'float'")
    sp.add_argument("--list", type=int, default=4, help="list size (scl)")
    sp.add_argument("--trials", type=int, default=8, help="max trials (scf)")
    sp.add_argument("--crc", default="none")
    sp.add_argument("llrs", nargs="?", help="LLR file, '-' or omitted for stdin")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("simulate", help="run an AWGN FER/BER sweep")
    add_code_args(sp)
    sp.add_argument("--mode", choices=["sc", "scf", "scl", "fast-ssc"], default="sc")
    sp.add_argument("--quant", default="float")
    sp.add_argument("--list", type=int, default=4)
    sp.add_argument("--trials", type=int, default=8)
    sp.add_argument("--crc", default="none")
    sp.add_argument("--ebn0", required=True, help="comma-separated Eb/N0 points in dB")
    sp.add_argument("--errors", type=int, default=100, help="frame errors per point")
    sp.add_argument("--max-frames", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0x5EED)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--payload-eb", action="store_true",
                    help="count only payload bits (not CRC) in Eb")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("latency", help="cycle-count and throughput report")
    add_code_args(sp)
    sp.add_argument("--algorithm", choices=["sc", "scl", "scf-worst"], default="sc")
    sp.add_argument("--f-clk", type=float, default=100e6, help="clock in Hz")
    sp.add_argument("--trials", type=int, default=8)
    sp.add_argument("-P", "--pe", type=int, default=64, help="processing elements")
    sp.add_argument("--unrolled", action="store_true",
                    help="report the unrolled pipeline schedule instead")
    sp.add_argument("--ii", type=int, default=1, help="initiation interval (unrolled)")
    sp.set_defaults(func=cmd_latency)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
