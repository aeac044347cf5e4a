"""Acceptance thresholds and frozen observations, versioned together.

Thresholds are the pass/fail lines used by the acceptance suite.  Frozen
values are exact outputs of the current estimator and constructions; every
one is regenerated by ``python3 scripts/derive_thresholds.py`` and checked
with ``--check``.  Changing the compressor, the PRNG or a construction
moves frozen values, so bump ``VERSION`` and re-derive.
"""
from fractions import Fraction

VERSION = 1

# run parameters shared by the acceptance suite and the derivation script
THEOREM4_SEED = 7
THEOREM4_HORIZON = 1 << 16  # s_4 for s_k = 2^(k^2)
GENERIC_HORIZON = 1 << 17  # all four bank entries met once
TRANSDUCER_STAGES = 1 << 12
BIT_REPEAT_SEED = 3
BIT_REPEAT_N = 1 << 12
THEOREM12_HORIZON = 1 << 16  # ell_3

# pass/fail lines
ZERO_MAX = Fraction(1, 10)
PRNG_DIM_P_MIN = Fraction(8, 10)
THEOREM4_SI_MIN = Fraction(6, 10)
THEOREM4_IS_MAX = Fraction(15, 100)
THEOREM4_DIM_P_MIN = Fraction(8, 10)
GENERIC_SI_MAX = Fraction(2, 10)
GENERIC_IS_MIN = Fraction(6, 10)
TRANSDUCER_TAIL_MIN = Fraction(75, 100)
BIT_REPEAT_IMAGE_MAX = Fraction(2, 10)
BIT_REPEAT_ORACLE_MIN = Fraction(8, 10)
THEOREM12_X_SI_MIN = Fraction(6, 10)
THEOREM12_IMAGE_SI_MAX = Fraction(25, 100)

# frozen observations; generated by scripts/derive_thresholds.py
FROZEN = {
    "zero_profile_max": Fraction(43, 2048),
    "prng7_dim_p": Fraction(2083, 2048),
    "theorem4_si_R": Fraction(543, 512),
    "theorem4_is_Z": Fraction(73, 8192),
    "theorem4_triangular_dim_p": Fraction(64933, 65536),
    "generic_si_compressible": Fraction(717, 8192),
    "generic_is_incompressible": Fraction(94565, 114688),
    "transducer_switches": 1,
    "transducer_final_quarter": Fraction(32, 31),
    "ceiling_switches": 0,
    "bit_repeat_image_ratio": Fraction(87, 1024),
    "bit_repeat_oracle_ratio": Fraction(4133, 4096),
    "theorem12_identity_x_si": Fraction(65581, 65536),
    "theorem12_square_image_si": Fraction(53, 65532),
    "theorem12_empty_max": Fraction(23, 4095),
    "exactk8_programs": 153643,
    "exactk8_words": 511,
    "exactk8_kraft": Fraction(225189, 524288),
    "machine_constant": 3,
}
