"""Index sets and finite families of them.

An :class:`IndexSet` enumerates an infinite set of naturals in increasing
order, but only ever up to a caller-supplied horizon.  Running out of
elements before the horizon is reported explicitly (``None`` from
``next_after``, :class:`HorizonExhausted` from the strict accessors) rather
than silently truncated.
"""
from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .core import GuideSet


class HorizonExhausted(LookupError):
    pass


class PreimageBoundExceeded(ValueError):
    pass


class IndexSet:
    label = "index-set"

    def next_after(self, n: int, horizon: int) -> int | None:
        """Least element > ``n`` and <= ``horizon``, or None if there is none."""
        raise NotImplementedError

    def elements(self, horizon: int, lo: int = 0) -> list[int]:
        out = []
        x = self.next_after(lo - 1, horizon)
        while x is not None:
            out.append(x)
            x = self.next_after(x, horizon)
        assert_increasing(out)
        return out

    def first(self, count: int, horizon: int) -> list[int]:
        out: list[int] = []
        x = -1
        while len(out) < count:
            x = self.next_after(x, horizon)
            if x is None:
                raise HorizonExhausted(f"{self.label}: only {len(out)} elements <= {horizon}")
            out.append(x)
        return out

    def contains(self, x: int) -> bool:
        return x >= 0 and self.next_after(x - 1, x) == x

    def __repr__(self):
        return f"<IndexSet {self.label}>"


def assert_increasing(xs: Sequence[int]) -> None:
    for a, b in zip(xs, xs[1:]):
        if not a < b:
            raise AssertionError(f"enumeration not strictly increasing: {a} then {b}")


@dataclass(frozen=True, repr=False)
class Interval(IndexSet):
    """The cofinite tail [start, ∞)."""

    start: int = 0

    @property
    def label(self):
        return f"[{self.start},inf)"

    def next_after(self, n, horizon):
        x = max(n + 1, self.start)
        return x if x <= horizon else None

    def elements(self, horizon, lo=0):
        return list(range(max(lo, self.start), horizon + 1))


def naturals() -> Interval:
    return Interval(0)


@dataclass(frozen=True, repr=False)
class Progression(IndexSet):
    start: int
    step: int

    def __post_init__(self):
        if self.step < 1 or self.start < 0:
            raise ValueError("progression needs start >= 0, step >= 1")

    @property
    def label(self):
        return f"ap({self.start},{self.step})"

    def next_after(self, n, horizon):
        if n < self.start:
            x = self.start
        else:
            x = self.start + ((n - self.start) // self.step + 1) * self.step
        return x if x <= horizon else None


@dataclass(frozen=True, repr=False)
class Explicit(IndexSet):
    """A finite, strictly increasing list; exhausted past its last element."""

    values: tuple[int, ...]
    name: str = "explicit"

    def __post_init__(self):
        assert_increasing(self.values)

    @property
    def label(self):
        return self.name

    def next_after(self, n, horizon):
        i = bisect.bisect_right(self.values, n)
        if i < len(self.values) and self.values[i] <= horizon:
            return self.values[i]
        return None


@dataclass(frozen=True, repr=False, eq=False)
class Enumerated(IndexSet):
    """Elements ``term(0) < term(1) < ...`` from a strictly increasing map."""

    term: Callable[[int], int]
    name: str = "sequence"
    _cache: list = field(default_factory=list, compare=False)

    @property
    def label(self):
        return self.name

    def _grow_past(self, n: int, horizon: int) -> None:
        cache = self._cache
        while not cache or cache[-1] <= n:
            x = self.term(len(cache))
            if cache and x <= cache[-1]:
                raise AssertionError(f"{self.name}: term {len(cache)} not increasing")
            cache.append(x)
            if x > horizon:
                break

    def next_after(self, n, horizon):
        self._grow_past(n, horizon)
        i = bisect.bisect_right(self._cache, n)
        if i < len(self._cache) and self._cache[i] <= horizon:
            return self._cache[i]
        return None


@dataclass(frozen=True, repr=False, eq=False)
class Predicate(IndexSet):
    """``{n : pred(n)}``, found by linear search up to the horizon."""

    pred: Callable[[int], bool]
    name: str = "predicate"

    @property
    def label(self):
        return self.name

    def next_after(self, n, horizon):
        for x in range(max(n + 1, 0), horizon + 1):
            if self.pred(x):
                return x
        return None

    def contains(self, x):
        return x >= 0 and bool(self.pred(x))


def from_guide(s: GuideSet) -> Predicate:
    return Predicate(s.membership, s.description)


@dataclass(frozen=True, repr=False, eq=False)
class Tail(IndexSet):
    base: IndexSet
    m: int

    @property
    def label(self):
        return f"tail({self.base.label},{self.m})"

    def _cut(self, horizon: int) -> int | None:
        # the m-th element of base (0-based), i.e. the first kept one
        x = -1
        for _ in range(self.m):
            x = self.base.next_after(x, horizon)
            if x is None:
                return None
        return x

    def next_after(self, n, horizon):
        cut = self._cut(horizon)
        if cut is None:
            return None
        return self.base.next_after(max(n, cut), horizon)


def tail(n_set: IndexSet, m: int, horizon: int | None = None) -> Tail:
    """Drop the first ``m`` elements; with a horizon, insist they exist."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if horizon is not None:
        n_set.first(m, horizon)
    return Tail(n_set, m)


@dataclass(frozen=True, repr=False, eq=False)
class Preimage(IndexSet):
    f: Callable[[int], int]
    base: IndexSet
    max_preimage: int = 64
    name: str = "preimage"

    @property
    def label(self):
        return f"{self.name}({self.base.label})"

    def next_after(self, n, horizon):
        for x in range(max(n + 1, 0), horizon + 1):
            if self.base.contains(self.f(x)):
                return x
        return None

    def check_finite_to_one(self, horizon: int) -> None:
        counts = Counter(self.f(x) for x in range(horizon + 1))
        value, many = counts.most_common(1)[0]
        if many > self.max_preimage:
            raise PreimageBoundExceeded(f"{many} arguments map to {value}")


def finite_to_one_preimage(f: Callable[[int], int], n_set: IndexSet, horizon: int,
                           max_preimage: int = 64) -> Preimage:
    """``{n : f(n) ∈ N}``; the preimage bound is checked over ``[0, horizon]``."""
    p = Preimage(f, n_set, max_preimage)
    p.check_finite_to_one(horizon)
    return p


def thin_enumeration(stream: Iterable[int], horizon: int | None = None,
                     max_items: int | None = None, name: str = "thinned") -> Explicit:
    """Greedy strictly increasing subsequence of ``stream``, in arrival order.

    Values above ``horizon`` are skipped; at most ``max_items`` stream
    values are consumed, so infinite streams are safe when it is given.
    """
    out: list[int] = []
    for i, x in enumerate(stream):
        if max_items is not None and i >= max_items:
            break
        if horizon is not None and x > horizon:
            continue
        if not out or x > out[-1]:
            out.append(x)
    if not out:
        raise HorizonExhausted(f"{name}: stream produced nothing up to the horizon")
    return Explicit(tuple(out), name)


@dataclass(frozen=True)
class IndexFamily:
    members: tuple[IndexSet, ...]
    label: str = "family"

    def __post_init__(self):
        if not self.members:
            raise ValueError("a family needs at least one member")

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def union(self, other: "IndexFamily", label: str | None = None) -> "IndexFamily":
        seen = list(self.members)
        seen += [m for m in other.members if m not in seen]
        return IndexFamily(tuple(seen), label or f"{self.label}+{other.label}")


def cofinite_tails(starts: Iterable[int]) -> IndexFamily:
    starts = sorted(set(starts))
    return IndexFamily(tuple(Interval(m) for m in starts), "tails")


def progressions(pairs: Iterable[tuple[int, int]]) -> IndexFamily:
    return IndexFamily(tuple(Progression(a, d) for a, d in pairs), "progressions")


def tails_of(base: IndexSet, count: int, label: str | None = None) -> IndexFamily:
    return IndexFamily(tuple(Tail(base, m) for m in range(count)), label or f"tails({base.label})")


@dataclass(frozen=True)
class ScanResult:
    member: str
    status: str  # witness | inconclusive | exhausted
    witness: int | None
    checked: int


def immunity_scan(s: GuideSet, fam: IndexFamily, depth: int, horizon: int) -> list[ScanResult]:
    """Look for a finite witness that a member is *not* contained in ``s``.

    Inspects the first ``depth`` elements of each member.  A witness refutes
    ``N ⊆ S``; "inconclusive" means all inspected elements were in ``S``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    report = []
    for member in fam:
        x, seen, status, witness = -1, 0, "inconclusive", None
        while seen < depth:
            x = member.next_after(x, horizon)
            if x is None:
                status = "exhausted"
                break
            seen += 1
            if not s.membership(x):
                status, witness = "witness", x
                break
        report.append(ScanResult(member.label, status, witness, seen))
    return report


def read_index_file(path) -> Explicit:
    values = tuple(int(line) for line in Path(path).read_text().split())
    return Explicit(values, f"file:{Path(path).name}")


def write_index_file(path, values: Sequence[int]) -> None:
    assert_increasing(values)
    Path(path).write_text("".join(f"{v}\n" for v in values))
