"""A small self-delimiting machine for exact prefix-free complexity.

Programs are bit strings read left to right.  The instruction set is a
prefix code::

    0 b              LIT   emit bit b
    10 γ(n) b        RUN   emit bit b, n times
    110 γ(d) γ(n)    COPY  copy n bits starting d positions back (overlap ok)
    111              HALT

where γ is the Elias gamma code.  A program is in the domain of the machine
iff the interpreter halts having read exactly all of its bits, so the domain
is prefix-free by construction.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

from .core import BitWord, decode_word, encode_word

HALT = "111"

# (mnemonic, opcode bits, operand layout)
INSTRUCTIONS = (
    ("LIT", "0", "bit"),
    ("RUN", "10", "gamma,bit"),
    ("COPY", "110", "gamma,gamma"),
    ("HALT", "111", ""),
)


def gamma(n: int) -> str:
    if n < 1:
        raise ValueError("gamma code needs n >= 1")
    b = bin(n)[2:]
    return "0" * (len(b) - 1) + b


def gamma_len(n: int) -> int:
    return 2 * (n.bit_length() - 1) + 1


class LengthExceeded(ValueError):
    pass


class TableMismatch(ValueError):
    pass


class RunResult(NamedTuple):
    status: str  # halt | need-more | trailing | fault | budget | overflow
    output: str
    steps: int
    read: int

    @property
    def in_domain(self) -> bool:
        return self.status == "halt"


class _NeedMore(Exception):
    pass


@dataclass(frozen=True)
class ToyPrefixMachine:
    name: str = "lrch-v1"

    @property
    def identity(self) -> str:
        desc = repr((self.name, INSTRUCTIONS))
        return hashlib.sha256(desc.encode()).hexdigest()[:16]

    def run(self, program: str, step_budget: int = 10**6, max_output: int | None = None) -> RunResult:
        """Interpret ``program``; ``steps`` counts bits read plus bits written."""
        pos = 0
        out: list[str] = []
        steps = 0

        def read() -> str:
            nonlocal pos, steps
            if pos >= len(program):
                raise _NeedMore
            pos += 1
            steps += 1
            return program[pos - 1]

        def read_gamma() -> int:
            zeros = 0
            while read() == "0":
                zeros += 1
            v = 1
            for _ in range(zeros):
                v = 2 * v + (read() == "1")
            return v

        try:
            while True:
                if steps > step_budget:
                    return RunResult("budget", "".join(out), steps, pos)
                if read() == "0":
                    out.append(read())
                    steps += 1
                elif read() == "0":
                    n = read_gamma()
                    b = read()
                    out.append(b * n)
                    steps += n
                elif read() == "0":
                    d = read_gamma()
                    n = read_gamma()
                    cur = "".join(out)
                    if d > len(cur):
                        return RunResult("fault", cur, steps, pos)
                    buf = list(cur)
                    for _ in range(n):
                        buf.append(buf[-d])
                    out = ["".join(buf)]
                    steps += n
                else:
                    text = "".join(out)
                    status = "halt" if pos == len(program) else "trailing"
                    return RunResult(status, text, steps, pos)
                if max_output is not None and sum(map(len, out)) > max_output:
                    return RunResult("overflow", "".join(out), steps, pos)
        except _NeedMore:
            return RunResult("need-more", "".join(out), steps, pos)


@dataclass(frozen=True)
class EnumerationBudget:
    l_max: int = 16
    max_program_length: int = 24
    step_budget: int = 10**6
    steps_per_stage: int = 10**4


def _copy(out: str, d: int, n: int) -> str:
    buf = list(out)
    for _ in range(n):
        buf.append(buf[-d])
    return "".join(buf)


def enumerate_halting(machine: ToyPrefixMachine, budget: EnumerationBudget) -> list[tuple[str, str]]:
    """All halting programs up to the length cap whose output fits ``l_max``.

    Works at instruction granularity (a depth-first search over instruction
    sequences); the bit-level interpreter serves as the cross-check.
    Returns ``(program, output)`` pairs in dovetail order: by length, then
    lexicographically.
    """
    cap, lmax = budget.max_program_length, budget.l_max
    found: list[tuple[str, str]] = []
    stack = [("", "")]
    while stack:
        prog, out = stack.pop()
        room = cap - len(prog)
        if room >= 3:
            found.append((prog + HALT, out))
        spare = lmax - len(out)
        if spare <= 0 or room < 2:
            continue
        for b in "01":
            stack.append((prog + "0" + b, out + b))
        n = 1
        while n <= spare and 2 + gamma_len(n) + 1 <= room:
            code = "10" + gamma(n)
            for b in "01":
                stack.append((prog + code + b, out + b * n))
            n += 1
        d = 1
        while d <= len(out) and 3 + gamma_len(d) + 1 <= room:
            head = prog + "110" + gamma(d)
            n = 1
            while n <= spare and 3 + gamma_len(d) + gamma_len(n) <= room:
                stack.append((head + gamma(n), _copy(out, d, n)))
                n += 1
            d += 1
    found.sort(key=lambda po: (len(po[0]), po[0]))
    if any(len(o) > lmax for _, o in found):
        raise AssertionError("enumeration produced an oversized output")
    return found


@dataclass
class ComplexityTable:
    """Best known program length per word, with the stage it was found."""

    machine_id: str
    entries: dict[str, tuple[int, int]] = field(default_factory=dict)
    kraft: Fraction = Fraction(0)
    programs: int = 0
    exhaustive_upto: int = 0  # every program of at most this length was run

    VERSION = 1

    def lookup(self, word: BitWord) -> tuple[int, int] | None:
        return self.entries.get(word.bits)

    def offer(self, word: str, value: int, stage: int) -> None:
        old = self.entries.get(word)
        if old is None or (value, stage) < old:
            self.entries[word] = (value, stage)

    def merge(self, other: "ComplexityTable") -> "ComplexityTable":
        if other.machine_id != self.machine_id:
            raise TableMismatch(f"machine {other.machine_id} != {self.machine_id}")
        out = ComplexityTable(self.machine_id, dict(self.entries))
        for w, (v, s) in other.entries.items():
            out.offer(w, v, s)
        out.exhaustive_upto = max(self.exhaustive_upto, other.exhaustive_upto)
        return out

    def dumps(self) -> str:
        lines = [f"# effdim-complexity-table v{self.VERSION} machine={self.machine_id} exhaustive={self.exhaustive_upto}"]
        for w in sorted(self.entries, key=lambda w: encode_word(BitWord(w))):
            v, s = self.entries[w]
            lines.append(f"{encode_word(BitWord(w)):x} {v} {s}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "ComplexityTable":
        lines = text.splitlines()
        head = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
        if not lines[0].startswith("# effdim-complexity-table v1"):
            raise ValueError("not a complexity table")
        table = cls(head["machine"], exhaustive_upto=int(head.get("exhaustive", 0)))
        for line in lines[1:]:
            code, v, s = line.split()
            table.entries[decode_word(int(code, 16)).bits] = (int(v), int(s))
        return table

    @classmethod
    def load(cls, path) -> "ComplexityTable":
        return cls.loads(Path(path).read_text())


@lru_cache(maxsize=8)
def build_table(machine: ToyPrefixMachine, budget: EnumerationBudget = EnumerationBudget()) -> ComplexityTable:
    """Dovetail every program up to the length cap and tabulate.

    The stage of a program is the number of ``steps_per_stage`` slices the
    dovetailer has used when that program halts.
    """
    table = ComplexityTable(machine.identity, exhaustive_upto=budget.max_program_length)
    cumulative = 0
    kraft = 0
    for prog, out in enumerate_halting(machine, budget):
        steps = len(prog) + len(out)
        if steps > budget.step_budget:
            continue
        cumulative += steps
        stage = -(-cumulative // budget.steps_per_stage)
        table.offer(out, len(prog), stage)
        kraft += 1 << (budget.max_program_length - len(prog))
        table.programs += 1
    table.kraft = Fraction(kraft, 1 << budget.max_program_length)
    return table


class ExactK(NamedTuple):
    value: int
    exact: bool
    stage: int | None = None


def literal_program(sigma: BitWord) -> str:
    return "".join("0" + b for b in sigma.bits) + HALT


def exact_K(sigma: BitWord, machine: ToyPrefixMachine = ToyPrefixMachine(),
            budget: EnumerationBudget = EnumerationBudget()) -> ExactK:
    """Shortest program for ``sigma`` on ``machine``.

    ``exact`` is False when no program within the length cap prints
    ``sigma``; the value is then the literal-program upper bound.
    """
    if len(sigma) > budget.l_max:
        raise LengthExceeded(f"|sigma|={len(sigma)} > L_max={budget.l_max}")
    hit = build_table(machine, budget).lookup(sigma)
    if hit is not None:
        return ExactK(hit[0], True, hit[1])
    return ExactK(len(literal_program(sigma)), False)


def kraft_sum(programs) -> Fraction:
    return sum((Fraction(1, 2 ** len(p)) for p in programs), Fraction(0))


def is_prefix_free(programs) -> bool:
    ordered = sorted(programs)
    return not any(b.startswith(a) for a, b in zip(ordered, ordered[1:]))


def machine_constant(machine: ToyPrefixMachine = ToyPrefixMachine(),
                     budget: EnumerationBudget = EnumerationBudget(), upto: int | None = None) -> int:
    """Measured c with exact_K(σ) <= 2|σ| + c over every word up to ``upto`` bits."""
    upto = budget.l_max if upto is None else upto
    worst = -math.inf
    for n in range(upto + 1):
        for code in range(1 << n, 1 << (n + 1)):
            sigma = decode_word(code)
            worst = max(worst, exact_K(sigma, machine, budget).value - 2 * n)
    return int(worst)
