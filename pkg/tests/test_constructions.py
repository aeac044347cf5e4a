from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from effdim.complexity import CompressorEstimator, compressor_K
from effdim.constructions import (ODD, TWO_MOD_THREE, BelowFirstBoundary, HorizonTooDeep, Requirement,
                                  SegmentSchedule, UnsatisfiableBank, build_double_segment, build_generic_like,
                                  build_theorem12_X, build_theorem4, double_zero_scan, ell_lambda, ell_schedule,
                                  endpoint_sets, k_of_n, tripled)
from effdim.core import Constant, GuideSet, Pseudorandom, prefix
from effdim.dimensions import Window, dim_is_hat, dim_si_hat
from effdim.families import Enumerated, Explicit, IndexFamily, Interval, Progression, tail, tails_of

P1 = SegmentSchedule.power(1)
R = Pseudorandom(7)


def naive_ell_lambda(f, steps):
    """Straight transcription of the recurrence with a fresh running max each time."""
    ell, lam = [1], [1]
    for _ in range(steps):
        lam.append(lam[-1] + ell[-1])
        g = max(f(i) for i in range(lam[-1] + 1))
        n = 0
        while 2 ** (n * n) <= g:
            n += 1
        ell.append(2 ** (n * n))
    return ell, lam


def test_schedules():
    assert P1.upto(600) == [1, 2, 16, 512]
    assert SegmentSchedule.power(2).upto(1 << 20) == [1, 4, 256, 262144]
    assert SegmentSchedule.triangular().upto(1 << 16) == [2, 4, 16, 128, 2048, 65536]
    SegmentSchedule.triangular().check_growth(8)
    P1.check_growth(5)
    with pytest.raises(ValueError):
        SegmentSchedule.explicit([1, 2, 3, 4]).check_growth(3)
    with pytest.raises(HorizonTooDeep):
        SegmentSchedule.explicit([1, 2]).boundary(2)
    with pytest.raises(HorizonTooDeep):
        P1.boundary(300)


def test_k_of_n():
    assert k_of_n(P1, 100) == 2
    assert k_of_n(P1, 100, ODD) == 1
    assert [k_of_n(P1, s) for s in (1, 2, 16, 512)] == [0, 1, 2, 3]
    assert k_of_n(P1, 511) == 2
    with pytest.raises(BelowFirstBoundary):
        k_of_n(P1, 0)
    with pytest.raises(BelowFirstBoundary):
        k_of_n(P1, 10, TWO_MOD_THREE)


def test_theorem4_segments():
    b = build_theorem4(R, P1)
    assert prefix(b, 16).bits[2:] == "0" * 14
    for n in (16, 17, 100, 200, 300, 400, 450, 500, 510, 511):
        assert b.bit_at(n) == R.bit_at(n - 16)
    assert b.bit_at(1) == R.bit_at(0)


def test_theorem4_exhaustive_to_8192():
    b = build_theorem4(R, P1)
    bits = prefix(b, 1 << 13).bits
    for k, (lo, hi) in enumerate([(1, 2), (2, 16), (16, 512), (512, 8192)]):
        expect = R.segment(0, hi - lo) if k % 2 == 0 else "0" * (hi - lo)
        assert bits[lo:hi] == expect
    assert bits[0] == "0"


def test_theorem4_endpoint_ratios():
    b = build_theorem4(R, P1)
    assert Fraction(compressor_K(prefix(b, 512)), 512) >= Fraction(6, 10)
    assert Fraction(compressor_K(prefix(b, 65536)), 65536) <= Fraction(15, 100)


def test_endpoint_sets():
    assert endpoint_sets(P1, "odd").elements(1 << 25) == [2, 512, 1 << 25]
    assert endpoint_sets(P1, "even", 1).elements(1 << 17) == [16, 65536]
    assert tail(endpoint_sets(P1, "odd"), 1).elements(1 << 25) == endpoint_sets(P1, "odd", 1).elements(1 << 25)
    with pytest.raises(ValueError):
        endpoint_sets(P1, "other")


def test_double_segment_trivial_guides():
    assert prefix(build_double_segment(R, GuideSet.empty(), P1), 4096).bits == "0" * 4096
    full = build_double_segment(R, GuideSet.naturals(), P1)
    assert all(full.bit_at(n) == R.bit_at(n - 2) for n in range(2, 512))
    assert prefix(full, 2).bits == "00"


def test_double_segment_type_map_evens():
    b = build_double_segment(R, GuideSet.evens(), P1)
    # k in X iff k // 2 is even
    expect = {k: ("base" if (k // 2) % 2 == 0 else "zero") for k in range(1, 16)}
    assert b.segment_types(range(1, 16)) == expect
    assert [expect[k] for k in (1, 3, 5, 7)] == ["base", "zero", "base", "zero"]
    inv = build_double_segment(R, GuideSet.evens(), P1, mode="is-random")
    assert all(inv.segment_types([k])[k] != expect[k] for k in range(1, 16))
    with pytest.raises(ValueError):
        build_double_segment(R, GuideSet.evens(), P1, mode="bogus")


def test_double_zero_scan():
    tri = SegmentSchedule.triangular()
    b = build_double_segment(R, GuideSet.evens(), tri)
    fam = [Interval(0), Progression(1, 3), Progression(0, 1000), Enumerated(lambda k: 3 ** k)]
    for m in fam:
        status, n = double_zero_scan(b, m, 1 << 20)
        assert status == "witness"
        k = k_of_n(tri, n, ODD)
        assert not b.select(k) and n >= tri.boundary(k + 1)
        # the witness prefix really is compressible
        assert compressor_K(prefix(b, n)) / n < 0.3
    assert double_zero_scan(b, Explicit((5, 100)), 1 << 20) == ("exhausted", None)


def test_ell_lambda_identity():
    ell, lam = ell_lambda(lambda n: n, 3, monotone=True)
    assert ell == [1, 16, 512, 65536] and lam == [1, 2, 18, 530]
    assert ell_lambda(lambda n: n, 5, monotone=True)[0][4:] == [1 << 25, 1 << 36]


@pytest.mark.parametrize("f", [lambda n: n, lambda n: n * n, lambda n: 3 * n + 7, lambda n: (n * 37) % 101])
def test_ell_lambda_matches_naive(f):
    assert ell_lambda(f, 3) == naive_ell_lambda(f, 3)


@pytest.mark.parametrize("f", [lambda n: n, lambda n: n * n, lambda n: n ** 3])
def test_ell_lambda_inequalities(f):
    ell, lam = ell_lambda(f, 5, monotone=True)
    for k in range(1, len(ell)):
        g = f(lam[k])
        assert ell[k] > g >= lam[k] >= ell[k - 1]
    ratios = [Fraction(ell[k - 1], ell[k]) for k in range(1, len(ell))]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_ell_lambda_horizon_too_deep():
    with pytest.raises(HorizonTooDeep):
        ell_lambda(lambda n: 2 ** n, 4, monotone=True)
    with pytest.raises(HorizonTooDeep):
        ell_lambda(lambda n: n, 8, scan_cap=100)


def test_theorem12_x():
    x = build_theorem12_X(R, GuideSet.naturals(), lambda n: n, monotone=True)
    assert prefix(x, 512).bits == "0" * 512
    for n in (512, 513, 1000, 4096, 30000, 65535, 65536, 70000, 100000, 2 ** 20):
        assert x.bit_at(n) == R.bit_at(n - 512)
    assert prefix(build_theorem12_X(R, GuideSet.empty(), lambda n: n, True), 4096).bits == "0" * 4096


def test_theorem12_type_map():
    s0 = GuideSet.finite([0, 3])
    x = build_theorem12_X(R, s0, lambda n: n, monotone=True)
    # S(k) = S0(k // 3); the admissible k are 2, 5, 8, 11
    assert x.segment_types([2, 5, 8, 11]) == {2: "base", 5: "zero", 8: "zero", 11: "base"}
    assert tripled(s0).members(12) == [0, 1, 2, 9, 10, 11]


def test_ell_schedule_lazy():
    sched = ell_schedule(lambda n: n)
    assert [sched.boundary(k) for k in range(4)] == [1, 16, 512, 65536]


def grid(m):
    return Enumerated(lambda k: m << k, f"{m}*2^k")


def test_generic_single_compressible_is_zero():
    a = build_generic_like([Requirement(Interval(0), "compressible")])
    assert prefix(a, 5000).bits == "0" * 5000


def test_generic_meeting_log_growth_two():
    even, odd = Enumerated(lambda k: 4 ** k, "2^even"), Enumerated(lambda k: 2 * 4 ** k, "2^odd")
    a = build_generic_like([Requirement(even, "incompressible"), Requirement(odd, "compressible")],
                           growth_compressible=2, growth_incompressible=2)
    log = a.meeting_log(1 << 13)
    assert [sum(1 for i, _ in log if i == j) for j in (0, 1)] == [3, 3]
    assert [L for _, L in log] == [256, 512, 1024, 2048, 4096, 8192]


def test_generic_blocks_follow_polarity():
    a = build_generic_like([Requirement(grid(1), "compressible"), Requirement(grid(5), "incompressible")],
                           Constant(0), Pseudorandom(4))
    a.segment(0, 1 << 15)
    for start, end, pol in a.blocks:
        src = Constant(0) if pol == "compressible" else Pseudorandom(4)
        assert a.segment(start, end) == src.segment(start, end)
        assert all(a.bit_at(n) == src.bit_at(n) for n in (start, end - 1))


def test_generic_grid_separation():
    # compressible powers of two at odd exponents, incompressible at even ones
    odd, even = Enumerated(lambda k: 2 * 4 ** k, "2^odd"), Enumerated(lambda k: 4 ** k, "2^even")
    a = build_generic_like([Requirement(even, "incompressible"), Requirement(odd, "compressible")])
    w = Window(1 << 17)
    est = CompressorEstimator()
    assert dim_si_hat(a, est, tails_of(odd, 8), w) <= Fraction(2, 10)
    assert dim_is_hat(a, est, tails_of(even, 8), w) >= Fraction(6, 10)


def test_generic_unsatisfiable_bank():
    with pytest.raises(UnsatisfiableBank):
        build_generic_like([Requirement(Progression(0, 2), "compressible"),
                            Requirement(Progression(0, 2), "incompressible")])
    with pytest.raises(ValueError):
        Requirement(Interval(0), "maybe")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000), st.integers(0, 3000))
def test_segment_source_segment_matches_bits(m, length):
    for src in (build_theorem4(R, P1), build_double_segment(R, GuideSet.evens(), P1),
                build_theorem12_X(R, GuideSet.naturals(), lambda n: n, True)):
        assert src.segment(m, m + length) == "".join(str(src.bit_at(i)) for i in range(m, m + length))


def test_rebuild_is_identical():
    a = prefix(build_theorem4(Pseudorandom(3), SegmentSchedule.power(1)), 4096)
    b = prefix(build_theorem4(Pseudorandom(3), SegmentSchedule.power(1)), 4096)
    assert a == b
