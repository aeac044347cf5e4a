"""Computable stand-ins for prefix-free complexity and its stage approximation.

The compressor proxy is an adaptive context-model code: for each of several
context orders it sums the ideal Krichevsky-Trofimov code length of the
word, and the cheapest order (or a raw "stored" mode) wins.  All arithmetic
is integer fixed point, so code lengths are identical on every platform.
Because the models are causal, the code length of every prefix falls out of
a single pass over the word.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .core import BitSource, BitWord, prefix
from .machine import EnumerationBudget, ToyPrefixMachine, build_table, exact_K, gamma_len

FRAC_BITS = 24
_WORK = 60
HEADER_BITS = 8
ORDERS = (1, 2, 3, 4, 6, 8, 12, 16)
SELECT_BITS = 4  # ORDERS plus stored mode: 9 choices
ADDITIVE_SLACK = 128

_log_table: list[int] = [0, 0]


def _fixed_log2(m: int) -> int:
    """floor-ish of log2(m) * 2**FRAC_BITS by repeated squaring, integers only."""
    e = m.bit_length() - 1
    y = (m << _WORK) >> e
    two = 2 << _WORK
    frac = 0
    for _ in range(FRAC_BITS):
        y = (y * y) >> _WORK
        frac <<= 1
        if y >= two:
            y >>= 1
            frac |= 1
    return (e << FRAC_BITS) | frac


def _logs_upto(m: int) -> list[int]:
    table = _log_table
    for k in range(len(table), m + 1):
        table.append(_fixed_log2(k))
    return table


class IncrementalCoder:
    """Feeds bits one at a time; ``push`` returns the code length so far.

    ``IncrementalCoder().push`` over a word yields exactly
    ``compressor_prefix_K`` of that word.
    """

    def __init__(self):
        self.n = 0
        self._hist = 0
        self._totals = [0] * len(ORDERS)
        self._counts: list[dict[int, list[int]]] = [{} for _ in ORDERS]

    @property
    def value(self) -> int:
        unit = 1 << FRAC_BITS
        best = self.n  # stored mode
        for t in self._totals:
            c = -(-t // unit)
            if c < best:
                best = c
        return HEADER_BITS + SELECT_BITS + gamma_len(self.n + 1) + best

    def push(self, b: int) -> int:
        n, hist = self.n, self._hist
        logs = _log_table if len(_log_table) > 2 * n + 2 else _logs_upto(4 * n + 64)
        totals = self._totals
        for j, order in enumerate(ORDERS):
            if n >= order:
                key = (hist & ((1 << order) - 1)) | (1 << order)
            else:
                key = hist | (1 << n)
            counts = self._counts[j]
            c = counts.get(key)
            if c is None:
                c = counts[key] = [0, 0]
            totals[j] += logs[2 * (c[0] + c[1]) + 2] - logs[2 * c[b] + 1]
            c[b] += 1
        self._hist = ((hist << 1) | b) & 0xFFFF
        self.n = n + 1
        return self.value


@lru_cache(maxsize=256)
def _prefix_code_lengths(bits: str) -> tuple[int, ...]:
    coder = IncrementalCoder()
    out = [coder.value]
    push = coder.push
    for ch in bits:
        out.append(push(1 if ch == "1" else 0))
    return tuple(out)


def compressor_K(sigma: BitWord) -> int:
    """Compressed size in bits of ``sigma``, header and length code included."""
    return _prefix_code_lengths(sigma.bits)[-1]


def compressor_prefix_K(sigma: BitWord) -> tuple[int, ...]:
    """``compressor_K`` of every prefix of ``sigma`` (index = prefix length)."""
    return _prefix_code_lengths(sigma.bits)


class ComplexityEstimator:
    """Interface for complexity proxies.

    ``staged_estimate(σ, s)`` is nonincreasing in ``s``, starts at the
    ceiling ``2|σ| + c`` at stage 0 and equals ``estimate(σ)`` from
    ``settle_stage(σ)`` on.
    """

    name = "abstract"
    c = 0

    def estimate(self, sigma: BitWord) -> int:
        raise NotImplementedError

    def prefix_estimates(self, sigma: BitWord) -> list[int]:
        return [self.estimate(sigma[:n]) for n in range(len(sigma) + 1)]

    def incremental(self):
        """An object whose ``push(bit)`` returns the estimate of the word so far."""
        return _Recompute(self)

    def ceiling(self, sigma: BitWord) -> int:
        return 2 * len(sigma) + self.c

    def settle_stage(self, sigma: BitWord) -> int:
        return max(len(sigma), 1)

    def staged_estimate(self, sigma: BitWord, s: int) -> int:
        if s >= self.settle_stage(sigma):
            return self.estimate(sigma)
        return self.ceiling(sigma)

    def describe(self) -> dict:
        return {"name": self.name, "c": self.c}


class _Recompute:
    def __init__(self, est: ComplexityEstimator):
        self.est = est
        self.bits: list[str] = []

    @property
    def value(self) -> int:
        return self.est.estimate(BitWord("".join(self.bits)))

    def push(self, b: int) -> int:
        self.bits.append("1" if b else "0")
        return self.value


@dataclass(frozen=True)
class IdentityEstimator(ComplexityEstimator):
    """K̂(σ) = |σ|: every ratio is exactly 1."""

    c: int = 0
    name = "identity"

    def estimate(self, sigma):
        return len(sigma)

    def prefix_estimates(self, sigma):
        return list(range(len(sigma) + 1))


@dataclass(frozen=True)
class IdentityCeilingEstimator(ComplexityEstimator):
    """Never improves on the trivial ceiling; the switching trigger cannot fire."""

    c: int = 32
    name = "identity-ceiling"

    def estimate(self, sigma):
        return self.ceiling(sigma)

    def prefix_estimates(self, sigma):
        return [2 * n + self.c for n in range(len(sigma) + 1)]

    def settle_stage(self, sigma):
        return 0


@dataclass(frozen=True)
class CompressorEstimator(ComplexityEstimator):
    c: int = 32
    name = "compressor"

    def __post_init__(self):
        # stored mode alone costs n + gamma(n+1) + 12 <= 2n + 32
        if self.c < 32:
            raise ValueError("ceiling constant must dominate the stored-mode cost")

    def estimate(self, sigma):
        return compressor_K(sigma)

    def prefix_estimates(self, sigma):
        return list(compressor_prefix_K(sigma))

    def incremental(self):
        return IncrementalCoder()


@dataclass(frozen=True)
class ToyMachineEstimator(ComplexityEstimator):
    """Exact complexity on the toy machine, staged by the dovetail schedule."""

    machine: ToyPrefixMachine = ToyPrefixMachine()
    budget: EnumerationBudget = EnumerationBudget()
    c: int = 3
    name = "toy-machine"

    def estimate(self, sigma):
        if len(sigma) > self.budget.l_max:
            return self.ceiling(sigma)
        return min(exact_K(sigma, self.machine, self.budget).value, self.ceiling(sigma))

    def settle_stage(self, sigma):
        if len(sigma) > self.budget.l_max:
            return 0
        hit = build_table(self.machine, self.budget).lookup(sigma)
        return 0 if hit is None else hit[1]


ESTIMATORS = {
    "identity": IdentityEstimator,
    "identity-ceiling": IdentityCeilingEstimator,
    "compressor": CompressorEstimator,
    "toy-machine": ToyMachineEstimator,
}


def estimator_from_name(name: str) -> ComplexityEstimator:
    try:
        return ESTIMATORS[name]()
    except KeyError:
        raise ValueError(f"unknown estimator {name!r}; choose from {sorted(ESTIMATORS)}") from None


def staged_K(sigma: BitWord, s: int, est: ComplexityEstimator) -> int:
    return est.staged_estimate(sigma, s)


def first_stage_below(sigma: BitWord, bound: int, est: ComplexityEstimator, max_stage: int) -> int | None:
    """Least stage at which ``staged_K`` drops below ``bound``, if any by ``max_stage``."""
    lo, hi = 0, max_stage
    if staged_K(sigma, hi, est) >= bound:
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if staged_K(sigma, mid, est) < bound:
            hi = mid
        else:
            lo = mid + 1
    return lo


def ratio(a: BitSource, n: int, est: ComplexityEstimator) -> Fraction:
    if n < 1:
        raise ValueError("ratio needs n >= 1")
    return Fraction(est.estimate(prefix(a, n)), n)


def log_slack(n: int) -> float:
    return 2 * math.log2(max(n, 2)) + 16
