"""Emit plot-ready CSV of the compressor ratio K(A|n)/n for a few sources.

    python3 scripts/ratio_curves.py [--horizon N] [--step S] > curves.csv
"""
from __future__ import annotations

import argparse
import csv
import sys

from effdim.complexity import compressor_prefix_K
from effdim.constructions import SegmentSchedule, build_theorem4
from effdim.core import Constant, Periodic, Pseudorandom, prefix
from effdim.reductions import apply_wtt, bit_repeat_machine

SOURCES = {
    "zero": lambda h: prefix(Constant(0), h),
    "periodic-0110": lambda h: prefix(Periodic("0110"), h),
    "pseudorandom-7": lambda h: prefix(Pseudorandom(7), h),
    "segments-power1": lambda h: prefix(build_theorem4(Pseudorandom(7), SegmentSchedule.power(1)), h),
    "segments-triangular": lambda h: prefix(build_theorem4(Pseudorandom(7), SegmentSchedule.triangular()), h),
    "bit-repeat-image": lambda h: apply_wtt(bit_repeat_machine(), Pseudorandom(3), h).bits,
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--horizon", type=int, default=1 << 16)
    ap.add_argument("--step", type=int, default=64)
    args = ap.parse_args()
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["source", "n", "K", "ratio"])
    for name, make in SOURCES.items():
        ks = compressor_prefix_K(make(args.horizon))
        for n in range(args.step, args.horizon + 1, args.step):
            out.writerow([name, n, ks[n], f"{ks[n] / n:.6f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
