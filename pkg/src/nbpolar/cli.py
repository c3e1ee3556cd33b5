"""Command-line interface.

Subcommands:
  design-kernel  rank kernel ratios alpha/beta by Monte-Carlo polarisation
  design-frozen  build a frozen profile by genie-aided Monte-Carlo
  simulate       sweep SNR points and report BLER plus complexity averages
  decode         decode one frame of channel observations from a file
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .channel import ChannelParams, bit_app_zero, bits_to_symbol_pmf
from .code import (
    CodeSpec,
    FrozenProfile,
    Kernel,
    check_profile,
    design_frozen,
    extract_payload,
    kernel_select,
    spec_from_profile,
)
from .decoders import bp_decode, crc_check, crc_select, sc_decode, scf_decode, scl_decode
from .galois import PRIMITIVE_POLYS, GaloisField
from .sim import DECODERS, SimConfig, default_crc, records_to_csv, run_simulation


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, help="field order 2^r")
    p.add_argument("--poly", type=int, help="primitive polynomial as a decimal integer")
    p.add_argument("--alpha", type=int, help="kernel entry alpha")
    p.add_argument("--beta", type=int, default=1, help="kernel entry beta (default 1)")
    p.add_argument("--n-c", type=int, help="code length in symbols")


def _field(args) -> GaloisField:
    if args.q is None:
        raise SystemExit("--q is required")
    return GaloisField(args.q, args.poly)


def _spec_from_args(args, need_profile=True) -> CodeSpec:
    crc_len = getattr(args, "crc_len", 0)
    if args.profile:
        profile = FrozenProfile.load(args.profile)
        spec = spec_from_profile(profile, crc_len)
        if args.q is not None or args.alpha is not None or args.n_c is not None:
            want = CodeSpec(
                GaloisField(args.q or profile.q, args.poly),
                args.n_c or profile.n_c,
                Kernel(args.alpha if args.alpha is not None else profile.alpha, args.beta),
                t=np.zeros(args.n_c or profile.n_c, dtype=np.int64),
            )
            check_profile(profile, want)
        return spec
    if args.t is not None:
        f = _field(args)
        t = np.array([int(x) for x in args.t.split(",")], dtype=np.int64)
        return CodeSpec(f, args.n_c or len(t), Kernel(args.alpha, args.beta), t, crc_len)
    raise SystemExit("either --profile or an inline --t profile is required")


def _cmd_design_kernel(args) -> int:
    f = _field(args)
    out_lines = ["q,prim_poly,snr_db,ratio,estimate,std_error"]
    for snr in args.snr:
        ranking = kernel_select(f, snr, args.trials, args.seed)
        print(f"GF({f.q}), poly {f.prim_poly}, Es/N0 = {snr} dB, {args.trials} trials per ratio")
        print(f"{'rank':>4} {'ratio':>6} {'E[1-P2(u2)]':>14} {'std err':>10}")
        for rank, est in enumerate(ranking, 1):
            print(f"{rank:>4} {est.ratio:>6} {est.estimate:>14.6g} {est.std_error:>10.2g}")
            out_lines.append(
                f"{f.q},{f.prim_poly},{snr!r},{est.ratio},{est.estimate!r},{est.std_error!r}"
            )
        print()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(out_lines) + "\n")
    return 0


def _cmd_design_frozen(args) -> int:
    f = _field(args)
    profile = design_frozen(
        f,
        args.n_c,
        Kernel(args.alpha, args.beta),
        args.k_bin,
        args.design_snr,
        args.frames,
        args.seed,
    )
    profile.save(args.out)
    frozen_syms = int((profile.t == f.r).sum())
    partial = int(((profile.t > 0) & (profile.t < f.r)).sum())
    print(
        f"wrote {args.out}: GF({f.q}) n_c={args.n_c} k_bin={args.k_bin}, "
        f"{frozen_syms} symbols fully frozen, {partial} partially"
    )
    return 0


def _parse_snrs(args) -> tuple[float, ...]:
    snrs: list[float] = list(args.snr or [])
    if args.snr_start is not None:
        if args.snr_stop is None:
            raise SystemExit("--snr-stop required with --snr-start")
        step = args.snr_step
        if step <= 0:
            raise SystemExit("--snr-step must be positive")
        s = args.snr_start
        while s <= args.snr_stop + 1e-9:
            snrs.append(round(s, 10))
            s += step
    if not snrs:
        raise SystemExit("no SNR points given (--snr or --snr-start/stop/step)")
    return tuple(snrs)


def _cmd_simulate(args) -> int:
    if args.decoder is None:
        raise SystemExit("--decoder is required (flag or config file)")
    spec = _spec_from_args(args)
    cfg = SimConfig(
        spec=spec,
        decoder=args.decoder,
        snrs=_parse_snrs(args),
        list_size=args.list_size,
        delta1=args.delta1,
        delta2=args.delta2,
        t_max=args.t_max,
        i_max=args.i_max,
        max_frames=args.max_frames,
        min_errors=args.min_errors,
        seed=args.seed,
        workers=args.workers,
        chunk=args.chunk,
        batch=args.batch,
    )
    records = run_simulation(cfg)
    print(f"{spec} decoder={args.decoder}")
    header = f"{'Es/N0':>6} {'frames':>9} {'errors':>7} {'BLER':>12} {'I_avg':>8} {'T_avg+1':>8} {'N_node':>9} {'secs':>8}"
    print(header)
    for r in records:
        print(
            f"{r.esn0_db:>6.2f} {r.frames:>9} {r.block_errors:>7} {r.bler:>12.4e} "
            f"{'' if r.i_avg is None else f'{r.i_avg:.3f}':>8} "
            f"{'' if r.t_avg_plus_1 is None else f'{r.t_avg_plus_1:.4f}':>8} "
            f"{'' if r.n_node_avg is None else f'{r.n_node_avg:.1f}':>9} "
            f"{r.wall_time_s:>8.1f}"
        )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(records_to_csv(records, cfg))
    return 0


def _cmd_decode(args) -> int:
    spec = _spec_from_args(args)
    y = np.loadtxt(args.input).ravel()
    if y.size != spec.n_bin:
        raise SystemExit(f"expected {spec.n_bin} channel observations, got {y.size}")
    params = ChannelParams(esn0_db=args.esn0)
    p0 = bit_app_zero(y, params)
    pmfs = bits_to_symbol_pmf(np.stack([p0, 1.0 - p0], axis=-1), spec.field)
    crc = default_crc(spec.crc_len)
    if args.decoder == "sc":
        res = sc_decode(spec, pmfs)
    elif args.decoder == "scl":
        res = scl_decode(spec, pmfs, args.list_size, args.delta1, args.delta2)
        crc_select(spec, res, crc)
        print(f"n_node = {res.n_node}")
    elif args.decoder == "scf":
        res = scf_decode(spec, pmfs, args.t_max, crc)
        print(f"attempts = {res.attempts}")
    elif args.decoder == "bp":
        res = bp_decode(spec, pmfs, args.i_max)
        print(f"iterations = {res.iterations}")
    else:
        raise SystemExit(f"decoder {args.decoder!r} not usable here (choose sc/scl/scf/bp)")
    payload = extract_payload(spec, res.u_hat)
    msg = payload[: spec.k]
    if spec.crc_len and res.crc_passed is None:
        res.crc_passed = bool(crc_check(payload, crc))
    print("u_hat:", " ".join(map(str, res.u_hat.tolist())))
    print("message bits:", "".join(map(str, msg.tolist())))
    if spec.crc_len:
        print("crc:", "pass" if res.crc_passed else "FAIL")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nbpolar", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-kernel", help="rank kernel ratios by polarisation strength")
    _add_code_args(p)
    p.add_argument("--snr", type=float, action="append", required=True, help="Es/N0 in dB (repeatable)")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the ranking as CSV")
    p.set_defaults(func=_cmd_design_kernel)

    p = sub.add_parser("design-frozen", help="Monte-Carlo frozen-profile design")
    _add_code_args(p)
    p.add_argument("--k-bin", type=int, required=True, help="payload bits incl. CRC")
    p.add_argument("--design-snr", type=float, required=True)
    p.add_argument("--frames", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="profile file to write")
    p.set_defaults(func=_cmd_design_frozen)

    p = sub.add_parser("simulate", help="Monte-Carlo BLER sweep")
    _add_code_args(p)
    p.add_argument("--profile", help="frozen profile file")
    p.add_argument("--t", help="inline frozen profile, comma-separated t_i")
    p.add_argument("--crc-len", type=int, default=0)
    p.add_argument("--decoder", choices=DECODERS)
    p.add_argument("--list-size", "-L", type=int, default=1)
    p.add_argument("--delta1", type=float, default=0.0)
    p.add_argument("--delta2", type=float, default=0.0)
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--i-max", type=int, default=20)
    p.add_argument("--snr", type=float, action="append")
    p.add_argument("--snr-start", type=float)
    p.add_argument("--snr-stop", type=float)
    p.add_argument("--snr-step", type=float, default=0.25)
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk", type=int, default=256)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--config", help="JSON file with defaults for any flag")
    p.add_argument("--out", help="write machine-readable CSV records")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("decode", help="decode one frame from a file of observations")
    _add_code_args(p)
    p.add_argument("--profile", help="frozen profile file")
    p.add_argument("--t", help="inline frozen profile, comma-separated t_i")
    p.add_argument("--crc-len", type=int, default=0)
    p.add_argument("--decoder", default="sc")
    p.add_argument("--list-size", "-L", type=int, default=8)
    p.add_argument("--delta1", type=float, default=0.0)
    p.add_argument("--delta2", type=float, default=0.0)
    p.add_argument("--t-max", type=int, default=10)
    p.add_argument("--i-max", type=int, default=20)
    p.add_argument("--esn0", type=float, required=True)
    p.add_argument("--input", required=True, help="text file with n_c*r real observations")
    p.set_defaults(func=_cmd_decode)
    return ap


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
            if not isinstance(overrides, dict):
                raise ValueError("config must be a JSON object")
        except (OSError, ValueError) as exc:
            ap.error(f"bad config file: {exc}")
        # config supplies values for flags not given explicitly
        given = {a.split("=", 1)[0] for a in argv if a.startswith("--")}
        for key, val in overrides.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                ap.error(f"config key {key!r} is not a recognised option")
            if "--" + key.replace("_", "-") not in given:
                setattr(args, attr, val)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
