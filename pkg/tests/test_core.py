import hashlib

import pytest
from hypothesis import given, strategies as st

from effdim.core import (BitWord, Constant, Derived, FileSource, GuideSet, InvalidRange, Periodic, Pseudorandom,
                         QueryMonitor, UseViolation, decode_word, encode_word, indicator, join2, join3, join_sets,
                         prefix, prefix_code_set, slice_, source_from_spec, split2)

words = st.text(alphabet="01", max_size=40).map(BitWord)

# first 64 bits of Pseudorandom(7), taken from sha256(b"effdim-prng:7:0")
GOLDEN_SEED7 = "1110010111111011011011001100110111111001011111110100011010111011"


def test_bitword_rejects_junk():
    with pytest.raises(ValueError):
        BitWord("0120")


def test_bitword_indexing():
    w = BitWord("0110")
    assert w[1] == 1 and w[0] == 0
    assert w[1:3] == BitWord("11")
    assert list(w) == [0, 1, 1, 0]
    assert (w + BitWord("1")).bits == "01101"
    assert BitWord("01").is_prefix_of(w)


def test_prng_golden_bits():
    assert prefix(Pseudorandom(7), 64).bits == GOLDEN_SEED7


def test_prng_matches_hash_oracle():
    # independent recomputation, byte by byte
    def oracle(seed, n):
        block, off = divmod(n, 256)
        d = hashlib.sha256(f"effdim-prng:{seed}:{block}".encode()).digest()
        return (d[off // 8] >> (7 - off % 8)) & 1

    src = Pseudorandom(11)
    for n in (0, 1, 255, 256, 257, 1000, 4095):
        assert src.bit_at(n) == oracle(11, n)


@given(st.integers(0, 3000), st.integers(0, 600), st.integers(0, 5))
def test_segment_agrees_with_bit_at(m, length, seed):
    src = Pseudorandom(seed)
    seg = src.segment(m, m + length)
    assert seg == "".join(str(src.bit_at(i)) for i in range(m, m + length))


@given(st.integers(0, 500), st.integers(0, 200))
def test_join2_segment_matches_bits(m, length):
    j = join2(Pseudorandom(1), Periodic("011"))
    assert j.segment(m, m + length) == "".join(str(j.bit_at(i)) for i in range(m, m + length))


def test_join2_split2_roundtrip():
    a0, a1 = Pseudorandom(2), Periodic("10")
    e, o = split2(join2(a0, a1))
    assert prefix(e, 100) == prefix(a0, 100) and prefix(o, 100) == prefix(a1, 100)
    e, o = split2(Periodic("0111"))
    assert prefix(e, 8).bits == "01010101" and prefix(o, 8).bits == "11111111"


def test_periodic_and_constant():
    assert prefix(Periodic("011"), 7).bits == "0110110"
    assert Periodic("011").segment(2, 6) == "1011"
    assert prefix(Constant(1), 3).bits == "111"
    with pytest.raises(ValueError):
        Periodic("")


def test_prefix_and_slice_ranges():
    with pytest.raises(InvalidRange):
        prefix(Constant(0), -1)
    with pytest.raises(InvalidRange):
        slice_(Constant(0), 5, 3)
    assert slice_(Periodic("01"), 3, 6).bits == "101"


def test_file_source_pads(tmp_path):
    p = tmp_path / "x.bits"
    p.write_text("101\n1")
    src = FileSource(str(p))
    assert prefix(src, 6).bits == "101100"


@given(words)
def test_word_codes_roundtrip(w):
    assert decode_word(encode_word(w)) == w


def test_word_codes_are_a_bijection_on_small_words():
    codes = [encode_word(BitWord(format(i, f"0{n}b")) if n else BitWord(""))
             for n in range(6) for i in range(2 ** n)]
    assert sorted(codes) == list(range(1, 64))


def test_prefix_code_set():
    a = Periodic("01")
    s = prefix_code_set(a)
    assert encode_word(BitWord("")) in s
    assert encode_word(BitWord("010")) in s
    assert encode_word(BitWord("011")) not in s
    assert 0 not in s


def test_join_sets_membership():
    evens, odds = GuideSet.evens(), GuideSet.evens().complement()
    j = join_sets(evens, odds)
    assert [indicator(j, n) for n in range(8)] == [1, 0, 0, 1, 1, 0, 0, 1]
    t = join3(GuideSet.naturals(), GuideSet.empty(), GuideSet.finite([0]))
    assert [indicator(t, n) for n in range(6)] == [1, 0, 1, 1, 0, 0]


def test_query_monitor_enforces_limit():
    m = QueryMonitor(Pseudorandom(0), limit=10)
    m.bit_at(9)
    assert m.high_water == 9 and m.count == 1
    with pytest.raises(UseViolation):
        m.bit_at(10)
    with pytest.raises(UseViolation):
        m.segment(5, 11)


def test_derived_declares_bound():
    a = Pseudorandom(4)
    d = Derived(lambda n: a.bit_at(2 * n), lambda n: 2 * n + 1, (a,))
    assert d.query_bound(3) == 7
    assert d.bit_at(3) == a.bit_at(6)


def test_source_from_spec():
    assert source_from_spec("kind=constant bit=1") == Constant(1)
    assert source_from_spec({"kind": "pseudorandom", "seed": "3"}) == Pseudorandom(3)
    with pytest.raises(ValueError):
        source_from_spec("kind=constant colour=red")
    with pytest.raises(ValueError):
        source_from_spec("kind=nope")
