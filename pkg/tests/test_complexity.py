import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from effdim.complexity import (ORDERS, CompressorEstimator, IdentityCeilingEstimator, IdentityEstimator,
                               IncrementalCoder, ToyMachineEstimator, compressor_K, compressor_prefix_K,
                               estimator_from_name, first_stage_below, ratio, staged_K)
from effdim.core import BitWord, Constant, Periodic, Pseudorandom, prefix
from effdim.machine import EnumerationBudget

bitstrings = st.text(alphabet="01", max_size=300)


def kt_oracle(bits: str) -> int:
    """Floating-point Krichevsky-Trofimov code length, written independently."""
    n = len(bits)
    best = n
    for order in ORDERS:
        counts = {}
        total = 0.0
        for i, ch in enumerate(bits):
            ctx = bits[max(0, i - order):i]
            c0, c1 = counts.get(ctx, (0, 0))
            b = ch == "1"
            total += math.log2((c0 + c1 + 1) / ((c1 if b else c0) + 0.5))
            counts[ctx] = (c0 + (not b), c1 + b)
        best = min(best, math.ceil(total - 1e-9))
    header = 8 + 4 + 2 * ((n + 1).bit_length() - 1) + 1
    return header + best


@settings(max_examples=60, deadline=None)
@given(bitstrings)
def test_compressor_matches_float_oracle(s):
    assert abs(compressor_K(BitWord(s)) - kt_oracle(s)) <= 1


@pytest.mark.parametrize("src", [Constant(0), Periodic("0110"), Pseudorandom(5)])
def test_compressor_matches_oracle_on_long_words(src):
    w = prefix(src, 2000)
    assert abs(compressor_K(w) - kt_oracle(w.bits)) <= 1


@settings(max_examples=40, deadline=None)
@given(bitstrings)
def test_prefix_profile_is_consistent(s):
    prof = compressor_prefix_K(BitWord(s))
    assert len(prof) == len(s) + 1
    assert all(prof[n] == compressor_K(BitWord(s[:n])) for n in range(0, len(s) + 1, 37))


@given(bitstrings)
def test_incremental_coder_matches(s):
    coder = IncrementalCoder()
    vals = [coder.value] + [coder.push(int(c)) for c in s]
    assert tuple(vals) == compressor_prefix_K(BitWord(s))


@given(bitstrings)
def test_compressor_below_ceiling(s):
    est = CompressorEstimator()
    assert est.estimate(BitWord(s)) <= 2 * len(s) + 32


def test_compressor_frozen_values():
    assert compressor_K(prefix(Constant(0), 4096)) == 45
    assert compressor_K(prefix(Pseudorandom(7), 4096)) == 4133
    assert compressor_K(prefix(Periodic("01"), 4096)) == 51


def test_compressor_rejects_small_constant():
    with pytest.raises(ValueError):
        CompressorEstimator(c=10)


def test_identity_estimators():
    w = BitWord("0101")
    assert IdentityEstimator().estimate(w) == 4
    assert IdentityCeilingEstimator().estimate(w) == 40
    assert ratio(Constant(0), 100, IdentityEstimator()) == 1
    with pytest.raises(ValueError):
        ratio(Constant(0), 0, IdentityEstimator())


def test_estimator_lookup():
    assert isinstance(estimator_from_name("compressor"), CompressorEstimator)
    with pytest.raises(ValueError):
        estimator_from_name("gzip")


@pytest.mark.parametrize("est", [CompressorEstimator(), IdentityCeilingEstimator(),
                                 ToyMachineEstimator(budget=EnumerationBudget(l_max=8))])
def test_staged_estimates_nonincreasing(est):
    rng = random.Random(0)
    for _ in range(100):
        n = rng.randrange(0, 9)
        w = BitWord("".join(rng.choice("01") for _ in range(n)))
        vals = [staged_K(w, s, est) for s in range(0, 40)]
        assert vals[0] == est.ceiling(w)
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] == est.estimate(w) or 40 < est.settle_stage(w)


def test_first_stage_below():
    est = CompressorEstimator()
    w = prefix(Constant(0), 200)
    s = first_stage_below(w, 200, est, 1000)
    assert s == 200
    assert staged_K(w, s, est) < 200 <= staged_K(w, s - 1, est)
    assert first_stage_below(w, 10, est, 1000) is None


def test_toy_estimator_falls_back_on_long_words():
    est = ToyMachineEstimator(budget=EnumerationBudget(l_max=8))
    assert est.estimate(BitWord("0" * 20)) == 43
    assert est.estimate(BitWord("0" * 8)) == 13
