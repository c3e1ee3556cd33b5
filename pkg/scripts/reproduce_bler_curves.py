#!/usr/bin/env python3
"""BLER / complexity sweeps for the GF(256), n_c = 128 code of the figures.

Designs (or loads) the frozen profile, then runs the requested decoder
sweeps and appends CSV records.  Examples:

    python scripts/reproduce_bler_curves.py --curve sc --snr-start 0.5 --snr-stop 2.75
    python scripts/reproduce_bler_curves.py --curve scl-pruned -L 16 --crc 16
    python scripts/reproduce_bler_curves.py --curve bp --i-max 100
"""

import argparse
import os

from nbpolar import GaloisField, Kernel, design_frozen
from nbpolar.code import FrozenProfile, spec_from_profile
from nbpolar.sim import SimConfig, records_to_csv, run_simulation

CURVES = {
    "sc": dict(decoder="sc"),
    "scl": dict(decoder="scl"),
    "scl-pruned": dict(decoder="scl", delta1=1e-6, delta2=1e-5),
    "scf": dict(decoder="scf"),
    "sco1": dict(decoder="sco1"),
    "bp": dict(decoder="bp"),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--curve", choices=sorted(CURVES), required=True)
    ap.add_argument("--crc", type=int, default=0, help="CRC length in bits (16 for the SCF/SCL+CRC figures)")
    ap.add_argument("-L", "--list-size", type=int, default=8)
    ap.add_argument("--t-max", type=int, default=10)
    ap.add_argument("--i-max", type=int, default=20)
    ap.add_argument("--snr-start", type=float, default=1.0)
    ap.add_argument("--snr-stop", type=float, default=2.5)
    ap.add_argument("--snr-step", type=float, default=0.25)
    ap.add_argument("--max-frames", type=int, default=200_000)
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--design-frames", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=2)
    ap.add_argument("--profile", default=None, help="reuse an existing frozen profile")
    ap.add_argument("--out", default="bler_records.csv")
    args = ap.parse_args()

    k_bin = 512 + args.crc
    if args.profile and os.path.exists(args.profile):
        profile = FrozenProfile.load(args.profile)
    else:
        print(f"designing frozen profile (k_bin={k_bin}, {args.design_frames} frames at 2.5 dB)...")
        profile = design_frozen(
            GaloisField(256), 128, Kernel(29, 1), k_bin,
            design_snr_db=2.5, frames=args.design_frames, rng_seed=20250810,
            workers=args.workers,
        )
        if args.profile:
            profile.save(args.profile)
    spec = spec_from_profile(profile, crc_len=args.crc)

    snrs = []
    s = args.snr_start
    while s <= args.snr_stop + 1e-9:
        snrs.append(round(s, 10))
        s += args.snr_step
    cfg = SimConfig(
        spec=spec,
        snrs=tuple(snrs),
        list_size=args.list_size,
        t_max=args.t_max,
        i_max=args.i_max,
        max_frames=args.max_frames,
        min_errors=args.min_errors,
        seed=args.seed,
        workers=args.workers,
        **CURVES[args.curve],
    )
    records = run_simulation(cfg)
    for r in records:
        extra = ""
        if r.i_avg is not None:
            extra = f"  I_avg={r.i_avg:.3f}"
        if r.t_avg_plus_1 is not None:
            extra = f"  T_avg+1={r.t_avg_plus_1:.4f}"
        if r.n_node_avg is not None:
            extra = f"  N_node={r.n_node_avg:.1f}"
        print(f"{r.esn0_db:5.2f} dB  BLER={r.bler:.4e} ({r.block_errors}/{r.frames}){extra}")
    new = not os.path.exists(args.out)
    csv = records_to_csv(records, cfg)
    with open(args.out, "a") as fh:
        fh.write(csv if new else "\n".join(csv.splitlines()[1:]) + "\n")
    print(f"appended {len(records)} records to {args.out}")


if __name__ == "__main__":
    main()
