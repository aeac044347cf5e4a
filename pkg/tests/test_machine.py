from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from effdim.core import BitWord
from effdim.machine import (ComplexityTable, EnumerationBudget, LengthExceeded, TableMismatch, ToyPrefixMachine,
                            build_table, enumerate_halting, exact_K, gamma, gamma_len, is_prefix_free, kraft_sum,
                            literal_program, machine_constant)

M = ToyPrefixMachine()
SMALL = EnumerationBudget(l_max=6, max_program_length=14)


def test_gamma_code():
    assert [gamma(n) for n in (1, 2, 3, 4)] == ["1", "010", "011", "00100"]
    assert all(len(gamma(n)) == gamma_len(n) for n in range(1, 300))
    with pytest.raises(ValueError):
        gamma(0)


def test_interpreter_basics():
    assert M.run("0" "1" "0" "0" "111") == ("halt", "10", 9, 7)
    assert M.run(literal_program(BitWord("0110"))).output == "0110"
    # RUN: 10, gamma(3)=011, bit 1
    assert M.run("10" "011" "1" "111").output == "111"
    # COPY with overlap: emit 01 then copy 4 bits from distance 2
    assert M.run("00" "01" "110" "010" "00100" "111").output == "010101"
    assert M.run("0").status == "need-more"
    assert M.run("1111").status == "trailing"
    assert M.run("110" "1" "1" "111").status == "fault"


def brute_force(budget):
    """Run every bit string up to the cap through the interpreter."""
    found = []
    for length in range(budget.max_program_length + 1):
        for bits in product("01", repeat=length):
            p = "".join(bits)
            r = M.run(p, budget.step_budget)
            if r.in_domain and len(r.output) <= budget.l_max:
                found.append((p, r.output))
    return found


def test_enumeration_matches_bit_level_interpreter():
    assert enumerate_halting(M, SMALL) == brute_force(SMALL)


def test_enumeration_order_is_dovetail():
    progs = [p for p, _ in enumerate_halting(M, SMALL)]
    assert progs == sorted(progs, key=lambda p: (len(p), p))


def test_domain_prefix_free_and_kraft():
    progs = [p for p, _ in enumerate_halting(M, EnumerationBudget(l_max=8))]
    assert is_prefix_free(progs)
    assert kraft_sum(progs) <= 1


def test_is_prefix_free_detects_clash():
    assert not is_prefix_free(["01", "011"])
    assert is_prefix_free(["0", "10", "11"])


def test_table_counts_frozen():
    t = build_table(M, EnumerationBudget(l_max=8))
    assert (t.programs, len(t.entries)) == (153643, 511)
    assert t.kraft == Fraction(225189, 524288)


def test_machine_constant_is_three():
    assert machine_constant(M, EnumerationBudget(l_max=8)) == 3
    # literal programs realise 2n + 3 exactly
    assert len(literal_program(BitWord("0101"))) == 11


def test_exact_values():
    b = EnumerationBudget(l_max=8)
    assert exact_K(BitWord(""), M, b).value == 3
    assert exact_K(BitWord("0"), M, b).value == 5
    # 0^8 = RUN gamma(8) 0 HALT: 2 + 7 + 1 + 3
    assert exact_K(BitWord("0" * 8), M, b).value == 13


def test_exact_k_length_cap():
    with pytest.raises(LengthExceeded):
        exact_K(BitWord("0" * 9), M, EnumerationBudget(l_max=8))


def test_exact_k_inexact_fallback():
    tiny = EnumerationBudget(l_max=8, max_program_length=6)
    r = exact_K(BitWord("0101"), M, tiny)
    assert not r.exact and r.value == 11


def test_table_roundtrip_and_merge():
    t = build_table(M, SMALL)
    again = ComplexityTable.loads(t.dumps())
    assert again.entries == t.entries and again.machine_id == t.machine_id
    other = ComplexityTable("deadbeef")
    with pytest.raises(TableMismatch):
        t.merge(other)
    merged = t.merge(ComplexityTable(t.machine_id, {"0101": (1, 9)}))
    assert merged.entries["0101"] == (1, 9)


def test_table_header():
    text = build_table(M, SMALL).dumps()
    assert text.startswith(f"# effdim-complexity-table v1 machine={M.identity}")


@settings(max_examples=50, deadline=None)
@given(st.text(alphabet="01", max_size=8))
def test_exact_k_within_literal_bound(s):
    assert exact_K(BitWord(s), M, EnumerationBudget(l_max=8)).value <= 2 * len(s) + 3


def test_identity_depends_on_name():
    assert ToyPrefixMachine("a").identity != ToyPrefixMachine("b").identity
