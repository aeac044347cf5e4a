"""Recompute every frozen value in effdim.thresholds and print them as JSON.

    python3 scripts/derive_thresholds.py [--check]

With --check, exits nonzero if any observed value differs from the frozen
one or any observation falls on the wrong side of its threshold.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from effdim import thresholds as T
from effdim.complexity import CompressorEstimator, IdentityCeilingEstimator, compressor_K
from effdim.constructions import (SegmentSchedule, build_generic_like, build_theorem4, endpoint_family_upto,
                                  Requirement)
from effdim.core import Constant, GuideSet, Pseudorandom, prefix, prefix_code_set
from effdim.dimensions import Window, dim_is_hat, dim_p_hat, dim_si_hat, profile
from effdim.families import Enumerated, IndexFamily, cofinite_tails, progressions
from effdim.machine import EnumerationBudget, ToyPrefixMachine, build_table, machine_constant
from effdim.reductions import (apply_wtt, bit_repeat_machine, identity_machine, square_sample_machine,
                               theorem12_experiment, transduce)


def grid(m: int) -> Enumerated:
    return Enumerated(lambda k: m << k, f"{m}*2^k")


def generic_bank():
    c = (grid(1), grid(3))
    i = (grid(5), grid(7))
    bank = [Requirement(c[0], "compressible"), Requirement(i[0], "incompressible"),
            Requirement(c[1], "compressible"), Requirement(i[1], "incompressible")]
    return bank, IndexFamily(c, "compressible"), IndexFamily(i, "incompressible")


def observe() -> dict[str, object]:
    est = CompressorEstimator()
    obs: dict[str, object] = {}

    w13 = Window(1 << 13)
    zero = profile(Constant(0), est, cofinite_tails(w13.m_grid), w13)
    obs["zero_profile_max"] = max(zero.dim_H, zero.dim_p, zero.dim_si, zero.dim_is)
    obs["prng7_dim_p"] = dim_p_hat(Pseudorandom(7), est, w13)

    sched = SegmentSchedule.power(1)
    b = build_theorem4(Pseudorandom(T.THEOREM4_SEED), sched)
    w16 = Window(T.THEOREM4_HORIZON)
    r_fam = endpoint_family_upto(sched, "odd", w16.n_min, w16.n_max)
    z_fam = endpoint_family_upto(sched, "even", w16.n_min, w16.n_max)
    obs["theorem4_si_R"] = dim_si_hat(b, est, r_fam, w16)
    obs["theorem4_is_Z"] = dim_is_hat(b, est, z_fam, w16)
    tri = build_theorem4(Pseudorandom(T.THEOREM4_SEED), SegmentSchedule.triangular())
    obs["theorem4_triangular_dim_p"] = dim_p_hat(tri, est, w16)

    bank, cfam, ifam = generic_bank()
    a = build_generic_like(bank)
    wg = Window(T.GENERIC_HORIZON)
    obs["generic_si_compressible"] = dim_si_hat(a, est, cfam, wg)
    obs["generic_is_incompressible"] = dim_is_hat(a, est, ifam, wg)

    tr = transduce(Constant(0), Pseudorandom(7), T.TRANSDUCER_STAGES, est)
    q = len(tr.output) // 4
    obs["transducer_switches"] = len(tr.switches)
    obs["transducer_final_quarter"] = Fraction(compressor_K(tr.output[len(tr.output) - q:]), q)
    ceil = transduce(Pseudorandom(1), Pseudorandom(2), T.TRANSDUCER_STAGES, IdentityCeilingEstimator())
    obs["ceiling_switches"] = len(ceil.switches)

    x = Pseudorandom(T.BIT_REPEAT_SEED)
    img = apply_wtt(bit_repeat_machine(), x, T.BIT_REPEAT_N).bits
    obs["bit_repeat_image_ratio"] = Fraction(compressor_K(img), T.BIT_REPEAT_N)
    obs["bit_repeat_oracle_ratio"] = Fraction(compressor_K(prefix(x, T.BIT_REPEAT_N)), T.BIT_REPEAT_N)

    t12 = theorem12_experiment(GuideSet.naturals(), identity_machine(), progressions([(0, 1)]), est,
                               T.THEOREM12_HORIZON)
    obs["theorem12_identity_x_si"] = t12.x_profile.dim_si
    sq = theorem12_experiment(prefix_code_set(Pseudorandom(1)), square_sample_machine(),
                              progressions([(0, 1), (1, 2), (0, 3)]), est, T.THEOREM12_HORIZON)
    obs["theorem12_square_image_si"] = sq.image_profile.dim_si
    empty = theorem12_experiment(GuideSet.empty(), identity_machine(), progressions([(0, 1)]), est, 1 << 13)
    obs["theorem12_empty_max"] = max(empty.x_profile.dim_si, empty.image_profile.dim_si)

    b8 = EnumerationBudget(l_max=8)
    table = build_table(ToyPrefixMachine(), b8)
    obs["exactk8_programs"] = table.programs
    obs["exactk8_words"] = len(table.entries)
    obs["exactk8_kraft"] = table.kraft
    obs["machine_constant"] = machine_constant(ToyPrefixMachine(), b8)
    return obs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    obs = observe()
    print(json.dumps({k: str(v) for k, v in obs.items()}, indent=2))
    if not args.check:
        return 0
    bad = [k for k, v in obs.items() if k in T.FROZEN and T.FROZEN[k] != v]
    for k in bad:
        print(f"frozen value moved: {k}: {T.FROZEN[k]} -> {obs[k]}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
