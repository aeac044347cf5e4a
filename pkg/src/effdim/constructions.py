"""Segment constructions: schedules, segment-built sources, guide sets.

A segment source copies a base sequence into the blocks ``[s_k, s_{k'})``
selected by a guide and writes zeros elsewhere::

    B(n) = base(n - s_{k_n}) * select(k_n)

where ``k_n`` is the largest admissible ``k`` (optionally restricted to a
residue class) with ``s_k <= n``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .core import BitSource, Constant, GuideSet, Pseudorandom, join_sets
from .families import IndexSet

MAX_BOUNDARY_BITS = 1 << 16


class HorizonTooDeep(ArithmeticError):
    pass


class BelowFirstBoundary(ValueError):
    pass


class UnsatisfiableBank(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SegmentSchedule:
    """Strictly increasing boundaries ``s_0 < s_1 < ...``, computed lazily."""

    term: Callable[[int], int]
    label: str
    params: tuple = ()
    _cache: list = field(default_factory=list, repr=False)

    @classmethod
    def power(cls, c: int = 1) -> "SegmentSchedule":
        """``s_k = 2^(c k^2)``."""
        return cls(lambda k: 1 << (c * k * k), "power", (("c", c),))

    @classmethod
    def triangular(cls) -> "SegmentSchedule":
        """``s_k = 2^(k(k+1)/2 + 1)``: ratio 2^(k+1), so more segments fit at desk scale."""
        return cls(lambda k: 1 << (k * (k + 1) // 2 + 1), "triangular")

    @classmethod
    def explicit(cls, values: Sequence[int], label: str = "explicit") -> "SegmentSchedule":
        values = tuple(values)

        def term(k):
            if k >= len(values):
                raise HorizonTooDeep(f"explicit schedule has only {len(values)} boundaries")
            return values[k]

        return cls(term, label, (("values", values),))

    def describe(self) -> dict:
        return {"schedule": self.label, **dict(self.params)}

    def boundary(self, k: int) -> int:
        cache = self._cache
        while len(cache) <= k:
            x = self.term(len(cache))
            if x.bit_length() > MAX_BOUNDARY_BITS:
                raise HorizonTooDeep(f"boundary {len(cache)} needs {x.bit_length()} bits")
            if cache and x <= cache[-1]:
                raise ValueError(f"schedule {self.label} not increasing at k={len(cache)}")
            cache.append(x)
        return cache[k]

    def upto(self, n: int) -> list[int]:
        """All boundaries ``<= n`` (computing one past them)."""
        k = 0
        while self.boundary(k) <= n:
            k += 1
        return self._cache[:k]

    def check_growth(self, depth: int) -> None:
        for k in range(1, depth):
            if not self.boundary(k + 1) > 3 * self.boundary(k):
                raise ValueError(f"s_{k + 1} <= 3 s_{k} in schedule {self.label}")


def k_of_n(sched: SegmentSchedule, n: int, residue: tuple[int, int] | None = None) -> int:
    """Largest ``k`` with ``s_k <= n``, optionally with ``k ≡ r (mod q)`` for ``residue=(q, r)``."""
    bounds = sched.upto(n)
    k = len(bounds) - 1
    if residue is not None:
        q, r = residue
        k -= (k - r) % q
    if k < 0:
        raise BelowFirstBoundary(f"n={n} precedes the first admissible boundary")
    return k


ODD = (2, 1)
TWO_MOD_THREE = (3, 2)


@dataclass(frozen=True, eq=False)
class SegmentSource(BitSource):
    base: BitSource
    sched: SegmentSchedule
    select: Callable[[int], bool]
    residue: tuple[int, int] | None = None
    label: str = "segments"
    kind = "segments"

    def _k(self, n: int) -> int | None:
        try:
            return k_of_n(self.sched, n, self.residue)
        except BelowFirstBoundary:
            return None

    def bit_at(self, n):
        k = self._k(n)
        if k is None or not self.select(k):
            return 0
        return self.base.bit_at(n - self.sched.boundary(k))

    def segment(self, m, n):
        parts = []
        pos = m
        while pos < n:
            k = self._k(pos)
            if k is None:
                first = self.sched.boundary(self.residue[1] if self.residue else 0)
                end = min(n, first)
                parts.append("0" * (end - pos))
            else:
                step = self.residue[0] if self.residue else 1
                end = min(n, self.sched.boundary(k + step))
                if self.select(k):
                    s = self.sched.boundary(k)
                    parts.append(self.base.segment(pos - s, end - s))
                else:
                    parts.append("0" * (end - pos))
            pos = end
        return "".join(parts)

    def query_bound(self, n):
        return n + 1

    def segment_types(self, ks: Sequence[int]) -> dict[int, str]:
        return {k: ("base" if self.select(k) else "zero") for k in ks}

    def describe(self):
        return {"kind": self.label, "base": self.base.spec(), **self.sched.describe()}


def build_theorem4(r: BitSource, sched: SegmentSchedule | None = None) -> SegmentSource:
    """Random segments ``[s_k, s_{k+1})`` for even ``k``, zeros for odd ``k``."""
    sched = sched or SegmentSchedule.power(1)
    return SegmentSource(r, sched, lambda k: k % 2 == 0, None, "theorem4")


def doubled(x0: GuideSet) -> GuideSet:
    """``X0 ⊕ X0`` as a set: ``k ∈ X`` iff ``k // 2 ∈ X0``."""
    return join_sets(x0, x0)


def build_double_segment(source: BitSource, x0: GuideSet, sched: SegmentSchedule | None = None,
                         mode: str = "si-zero") -> SegmentSource:
    """Odd-indexed segments placed by ``X = X0 ⊕ X0`` (or its complement)."""
    sched = sched or SegmentSchedule.power(1)
    x = doubled(x0)
    if mode == "si-zero":
        select = x.membership
    elif mode == "is-random":
        select = x.complement().membership
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SegmentSource(source, sched, select, ODD, f"double-segment-{mode}")


def double_zero_scan(src: SegmentSource, member: IndexSet, horizon: int) -> tuple[str, int | None]:
    """Find ``n`` in ``member`` past the first inner boundary of a zero segment.

    With admissible ``k = k_n`` unselected and ``n >= s_{k+1}``, the prefix
    ``B↾n`` is zero after ``s_k``, so its complexity ratio is at most about
    ``2 s_k / s_{k+1}``.  Returns ``("witness", n)``, or ``("exhausted", None)``
    if the member (or the schedule) runs out below ``horizon``.
    """
    step = src.residue[0] if src.residue else 1
    x = member.next_after(-1, horizon)
    try:
        while x is not None:
            k = src._k(x)
            if k is None:
                x = member.next_after(x, horizon)
                continue
            if not src.select(k):
                inner = src.sched.boundary(k + 1)
                if x >= inner:
                    return "witness", x
                x = member.next_after(inner - 1, horizon)
            else:
                x = member.next_after(src.sched.boundary(k + step) - 1, horizon)
    except HorizonTooDeep:
        pass
    return "exhausted", None


def ell_lambda(f: Callable[[int], int], k_steps: int, monotone: bool = False,
               max_bits: int = MAX_BOUNDARY_BITS, scan_cap: int = 10**7) -> tuple[list[int], list[int]]:
    """The boundary sequences for a use bound ``f``.

    ``g(n) = max f(i), i <= n``; ``ell_0 = lam_0 = 1``,
    ``lam_k = lam_{k-1} + ell_{k-1}`` and ``ell_k`` is the least ``2^(n^2)``
    exceeding ``g(lam_k)``.  With ``monotone=True`` the caller promises ``f``
    is nondecreasing and ``g = f``; otherwise the running maximum is scanned
    and ``scan_cap`` bounds how far.
    """
    ells, lams = [1], [1]
    g_best, g_pos = f(0), 0
    e = 0
    for _ in range(k_steps):
        lam = lams[-1] + ells[-1]
        if monotone:
            g = f(lam)
        else:
            if lam > scan_cap:
                raise HorizonTooDeep(f"g({lam}) needs a scan beyond {scan_cap}")
            while g_pos < lam:
                g_pos += 1
                g_best = max(g_best, f(g_pos))
            g = g_best
        while (1 << (e * e)) <= g:
            e += 1
            if e * e > max_bits:
                raise HorizonTooDeep(f"ell needs 2^{e * e}")
        lams.append(lam)
        ells.append(1 << (e * e))
    return ells, lams


def ell_schedule(f: Callable[[int], int], monotone: bool = False, label: str = "ell") -> SegmentSchedule:
    """Lazily extended schedule ``k -> ell_k``."""
    memo: dict[str, list[int]] = {"ells": [1]}

    def term(k):
        if k >= len(memo["ells"]):
            memo["ells"] = ell_lambda(f, k, monotone)[0]
        return memo["ells"][k]

    return SegmentSchedule(term, label)


def tripled(s0: GuideSet) -> GuideSet:
    return join_sets(s0, s0, s0)


def build_theorem12_X(r: BitSource, s0: GuideSet, f: Callable[[int], int],
                      monotone: bool = False) -> SegmentSource:
    """``X(n) = R(n - ell_{k_n}) * 1_S(k_n)``, ``S = S0⊕S0⊕S0``, ``k_n ≡ 2 (mod 3)``."""
    s = tripled(s0)
    return SegmentSource(r, ell_schedule(f, monotone), s.membership, TWO_MOD_THREE, "theorem12")


@dataclass(frozen=True, eq=False)
class BoundarySet(IndexSet):
    """``{s_k : k >= start, keep(k)}`` as an index set."""

    sched: SegmentSchedule
    keep: Callable[[int], bool]
    start: int = 0
    name: str = "boundaries"

    @property
    def label(self):
        return self.name

    def next_after(self, n, horizon):
        k = self.start
        while True:
            try:
                s = self.sched.boundary(k)
            except HorizonTooDeep:
                return None
            if s > horizon:
                return None
            if s > n and self.keep(k):
                return s
            k += 1


def endpoint_sets(sched: SegmentSchedule, parity: str, m: int = 0) -> BoundarySet:
    """``R_m = {s_{2k+1}}_{k>=m}`` (parity "odd") or ``Z_m = {s_{2k}}_{k>=m}`` ("even")."""
    if parity == "odd":
        return BoundarySet(sched, lambda k: k % 2 == 1, 2 * m + 1, f"R_{m}")
    if parity == "even":
        return BoundarySet(sched, lambda k: k % 2 == 0, 2 * m, f"Z_{m}")
    raise ValueError(f"parity must be odd or even, not {parity!r}")


def endpoint_family_upto(sched: SegmentSchedule, parity: str, lo: int, horizon: int):
    """The tails of the endpoint set that still meet ``[lo, horizon]``."""
    from .families import IndexFamily

    members = []
    m = 0
    while True:
        e = endpoint_sets(sched, parity, m)
        if e.next_after(lo - 1, horizon) is None:
            break
        members.append(e)
        m += 1
    if not members:
        raise ValueError(f"no {parity} endpoint lies in [{lo}, {horizon}]")
    return IndexFamily(tuple(members), f"{'R' if parity == 'odd' else 'Z'}-tails")


@dataclass(frozen=True, eq=False)
class Requirement:
    index_set: IndexSet
    polarity: str  # "compressible" | "incompressible"

    def __post_init__(self):
        if self.polarity not in ("compressible", "incompressible"):
            raise ValueError(f"bad polarity {self.polarity!r}")


@dataclass(eq=False)
class GenericLikeSource(BitSource):
    """Finite-extension builder meeting a bank of requirements round-robin.

    Each step takes the next requirement, picks the least length in its
    index set at least ``growth`` times the current length, and fills up to
    it with the low source (compressible) or the high source
    (incompressible).  Blocks are built lazily, so the source is total.
    Once no requirement can be met below ``search_horizon`` the low source
    fills the rest.
    """

    bank: tuple[Requirement, ...]
    low: BitSource = Constant(0)
    high: BitSource = Pseudorandom(0)
    start_length: int = 64
    growth_compressible: float = 6.0
    growth_incompressible: float = 3.0
    search_horizon: int = 1 << 24
    kind = "generic-like"
    blocks: list = field(default_factory=list)  # (start, end, polarity)
    meetings: list = field(default_factory=list)  # (requirement index, length)
    _turn: int = 0
    _done: bool = False

    def __post_init__(self):
        if not self.bank:
            raise ValueError("empty requirement bank")
        for i, a in enumerate(self.bank):
            for b in self.bank[i + 1:]:
                if a.polarity != b.polarity and _same_set(a.index_set, b.index_set):
                    raise UnsatisfiableBank(
                        f"{a.index_set.label} demanded both compressible and incompressible")
        self.blocks.append((0, self.start_length, "compressible"))

    def _extend(self) -> None:
        length = self.blocks[-1][1]
        for _ in range(len(self.bank)):
            i = self._turn
            self._turn = (i + 1) % len(self.bank)
            req = self.bank[i]
            g = self.growth_compressible if req.polarity == "compressible" else self.growth_incompressible
            target = req.index_set.next_after(max(math.ceil(g * length), length + 1) - 1, self.search_horizon)
            if target is None:
                continue
            self.blocks.append((length, target, req.polarity))
            self.meetings.append((i, target))
            return
        self._done = True

    def _cover(self, n: int) -> None:
        while not self._done and self.blocks[-1][1] <= n:
            self._extend()

    def bit_at(self, n):
        self._cover(n)
        if self.blocks[-1][1] <= n:
            return self.low.bit_at(n)
        i = bisect.bisect_right(self.blocks, (n, math.inf, "")) - 1
        start, end, pol = self.blocks[i]
        return (self.low if pol == "compressible" else self.high).bit_at(n)

    def segment(self, m, n):
        if n <= m:
            return ""
        self._cover(n - 1)
        parts = []
        for start, end, pol in self.blocks:
            lo, hi = max(start, m), min(end, n)
            if lo < hi:
                parts.append((self.low if pol == "compressible" else self.high).segment(lo, hi))
        covered = self.blocks[-1][1]
        if covered < n:
            parts.append(self.low.segment(max(m, covered), n))
        return "".join(parts)

    def meeting_log(self, upto: int) -> list[tuple[int, int]]:
        self._cover(upto)
        return [(i, L) for i, L in self.meetings if L <= upto]

    def describe(self):
        return {"kind": self.kind, "bank": [(r.index_set.label, r.polarity) for r in self.bank],
                "low": self.low.spec(), "high": self.high.spec()}


def _same_set(a: IndexSet, b: IndexSet, probe: int = 1 << 12) -> bool:
    return a is b or a.elements(probe) == b.elements(probe)


def build_generic_like(bank: Sequence[Requirement], block_source_low: BitSource = Constant(0),
                       block_source_high: BitSource = Pseudorandom(0), **kw) -> GenericLikeSource:
    return GenericLikeSource(tuple(bank), block_source_low, block_source_high, **kw)

