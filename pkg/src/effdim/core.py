"""Bit words, infinite bit sources, joins and guide sets.

Every construction in the package is assembled from these pieces.  Sources
are immutable and deterministic: ``bit_at(n)`` always returns the same bit
for the same ``n``, so they can be shared freely between workers.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable


class InvalidRange(ValueError):
    pass


@dataclass(frozen=True)
class BitWord:
    """A finite binary string, stored as an ASCII ``'0'``/``'1'`` string."""

    bits: str = ""

    def __post_init__(self):
        if self.bits.strip("01"):
            raise ValueError(f"not a bit string: {self.bits[:32]!r}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        return cls("".join("1" if b else "0" for b in bits))

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return BitWord(self.bits[key])
        return 1 if self.bits[key] == "1" else 0

    def __iter__(self):
        return (1 if c == "1" else 0 for c in self.bits)

    def __add__(self, other: "BitWord") -> "BitWord":
        return BitWord(self.bits + other.bits)

    def __str__(self) -> str:
        return self.bits

    def is_prefix_of(self, other: "BitWord") -> bool:
        return other.bits.startswith(self.bits)


EMPTY = BitWord("")


class BitSource:
    """An infinite binary sequence with random access.

    Subclasses implement :meth:`bit_at`; :meth:`segment` may be overridden
    where bulk evaluation is cheaper than bit-by-bit.
    """

    kind = "abstract"

    def bit_at(self, n: int) -> int:
        raise NotImplementedError

    def segment(self, m: int, n: int) -> str:
        return "".join("1" if self.bit_at(i) else "0" for i in range(m, n))

    def query_bound(self, n: int) -> int:
        """Exclusive bound on parent indices read while computing bit ``n``."""
        return 0

    def describe(self) -> dict:
        return {"kind": self.kind}

    def spec(self) -> str:
        return " ".join(f"{k}={v}" for k, v in self.describe().items())


@dataclass(frozen=True)
class Constant(BitSource):
    bit: int = 0
    kind = "constant"

    def bit_at(self, n):
        return self.bit

    def segment(self, m, n):
        return str(self.bit) * (n - m)

    def describe(self):
        return {"kind": self.kind, "bit": self.bit}


@dataclass(frozen=True)
class Periodic(BitSource):
    pattern: str = "01"
    kind = "periodic"

    def __post_init__(self):
        if not self.pattern or self.pattern.strip("01"):
            raise ValueError(f"bad periodic pattern {self.pattern!r}")

    def bit_at(self, n):
        return 1 if self.pattern[n % len(self.pattern)] == "1" else 0

    def segment(self, m, n):
        p = len(self.pattern)
        reps = (n - m) // p + 2
        start = m % p
        return (self.pattern * reps)[start:start + n - m]

    def describe(self):
        return {"kind": self.kind, "pattern": self.pattern}


_BLOCK = 256


@lru_cache(maxsize=4096)
def _prng_block(seed: int, index: int) -> str:
    # counter-mode SHA-256: bit-exact on every platform
    digest = hashlib.sha256(f"effdim-prng:{seed}:{index}".encode()).digest()
    return format(int.from_bytes(digest, "big"), f"0{_BLOCK}b")


@dataclass(frozen=True)
class Pseudorandom(BitSource):
    """Seeded stand-in for a random real, with O(1) random access."""

    seed: int = 0
    kind = "pseudorandom"

    def bit_at(self, n):
        return 1 if _prng_block(self.seed, n // _BLOCK)[n % _BLOCK] == "1" else 0

    def segment(self, m, n):
        if n <= m:
            return ""
        first, last = m // _BLOCK, (n - 1) // _BLOCK
        chunk = "".join(_prng_block(self.seed, j) for j in range(first, last + 1))
        off = first * _BLOCK
        return chunk[m - off:n - off]

    def describe(self):
        return {"kind": self.kind, "seed": self.seed}


@dataclass(frozen=True)
class FileSource(BitSource):
    """ASCII bit file; positions past the end of the file read as 0."""

    path: str
    kind = "file"

    @property
    def _bits(self) -> str:
        return _read_bit_file(self.path)

    def bit_at(self, n):
        bits = self._bits
        return 1 if n < len(bits) and bits[n] == "1" else 0

    def segment(self, m, n):
        bits = self._bits
        part = bits[m:n]
        return part + "0" * (n - m - len(part))

    def describe(self):
        return {"kind": self.kind, "path": self.path}


@lru_cache(maxsize=32)
def _read_bit_file(path: str) -> str:
    text = "".join(Path(path).read_text().split())
    return BitWord(text).bits


@dataclass(frozen=True, eq=False)
class Derived(BitSource):
    """Bit source computed from parent sources by an arbitrary rule.

    ``bound(n)`` must be an exclusive upper bound on every parent index the
    rule reads when computing bit ``n``.
    """

    rule: Callable[[int], int]
    bound: Callable[[int], int]
    parents: tuple = ()
    label: str = "derived"
    kind = "derived"

    def bit_at(self, n):
        return 1 if self.rule(n) else 0

    def query_bound(self, n):
        return self.bound(n)

    def describe(self):
        return {"kind": self.kind, "label": self.label}


@dataclass(frozen=True)
class Join2(BitSource):
    a0: BitSource
    a1: BitSource
    kind = "join2"

    def bit_at(self, n):
        return (self.a1 if n & 1 else self.a0).bit_at(n >> 1)

    def segment(self, m, n):
        if n <= m:
            return ""
        lo, hi = m // 2, (n + 1) // 2 + 1
        s0, s1 = self.a0.segment(lo, hi), self.a1.segment(lo, hi)
        inter = "".join(a + b for a, b in zip(s0, s1))
        return inter[m - 2 * lo:n - 2 * lo]

    def query_bound(self, n):
        return n // 2 + 1

    def describe(self):
        return {"kind": self.kind, "a0": self.a0.spec(), "a1": self.a1.spec()}


def prefix(a: BitSource, n: int) -> BitWord:
    """The first ``n`` bits of ``a``."""
    if n < 0:
        raise InvalidRange(f"negative prefix length {n}")
    return BitWord(a.segment(0, n))


def slice_(a: BitSource, m: int, n: int) -> BitWord:
    """The bits ``a(m) ... a(n-1)``."""
    if m < 0 or m > n:
        raise InvalidRange(f"invalid slice [{m}, {n})")
    return BitWord(a.segment(m, n))


def join2(a0: BitSource, a1: BitSource) -> Join2:
    return Join2(a0, a1)


def split2(a: BitSource) -> tuple[BitSource, BitSource]:
    """Inverse of :func:`join2`: the even and odd halves of ``a``."""
    if isinstance(a, Join2):
        return a.a0, a.a1
    even = Derived(lambda n: a.bit_at(2 * n), lambda n: 2 * n + 1, (a,), "even-half")
    odd = Derived(lambda n: a.bit_at(2 * n + 1), lambda n: 2 * n + 2, (a,), "odd-half")
    return even, odd


@dataclass(frozen=True, eq=False)
class GuideSet:
    """A set of naturals given by a total membership test."""

    membership: Callable[[int], bool]
    description: str = "guide"

    def __contains__(self, n: int) -> bool:
        return bool(self.membership(n))

    def members(self, upto: int) -> list[int]:
        return [n for n in range(upto) if self.membership(n)]

    @classmethod
    def empty(cls):
        return cls(lambda n: False, "empty")

    @classmethod
    def naturals(cls):
        return cls(lambda n: True, "naturals")

    @classmethod
    def evens(cls):
        return cls(lambda n: n % 2 == 0, "evens")

    @classmethod
    def finite(cls, elements: Iterable[int]):
        elems = frozenset(elements)
        return cls(elems.__contains__, f"finite{sorted(elems)}")

    @classmethod
    def from_source(cls, a: BitSource):
        return cls(lambda n: a.bit_at(n) == 1, f"bits({a.spec()})")

    def complement(self) -> "GuideSet":
        return GuideSet(lambda n: not self.membership(n), f"not({self.description})")


def indicator(x: GuideSet, n: int) -> int:
    return 1 if x.membership(n) else 0


def join_sets(*parts: GuideSet) -> GuideSet:
    """Recursive join of guide sets: ``3k+j`` is in the join of three sets iff ``k`` is in the ``j``-th."""
    r = len(parts)
    if r == 0:
        raise ValueError("join of zero sets")
    desc = "join(" + ",".join(p.description for p in parts) + ")"
    return GuideSet(lambda n: parts[n % r].membership(n // r), desc)


def join3(a0: GuideSet, a1: GuideSet, a2: GuideSet) -> GuideSet:
    return join_sets(a0, a1, a2)


def encode_word(sigma: BitWord) -> int:
    """Read ``1`` followed by ``sigma`` as a binary numeral."""
    return int("1" + sigma.bits, 2)


def decode_word(code: int) -> BitWord:
    if code < 1:
        raise ValueError("codes start at 1")
    return BitWord(bin(code)[3:])


def prefix_code_set(a: BitSource) -> GuideSet:
    """The codes of all finite prefixes of ``a``.

    Membership is decidable relative to ``a``: decode and compare.
    """

    def member(n: int) -> bool:
        if n < 1:
            return False
        sigma = decode_word(n)
        return a.segment(0, len(sigma)) == sigma.bits

    return GuideSet(member, f"prefix-codes({a.spec()})")


@dataclass(eq=False)
class QueryMonitor(BitSource):
    """Wraps a source and records which indices were read.

    If ``limit`` is set, reading an index ``>= limit`` raises
    :class:`UseViolation`.
    """

    inner: BitSource
    limit: int | None = None
    high_water: int = -1
    count: int = 0
    kind = "monitor"

    def bit_at(self, n):
        if self.limit is not None and n >= self.limit:
            raise UseViolation(f"query {n} outside use bound {self.limit}")
        self.count += 1
        if n > self.high_water:
            self.high_water = n
        return self.inner.bit_at(n)

    def segment(self, m, n):
        if n > m:
            if self.limit is not None and n - 1 >= self.limit:
                raise UseViolation(f"query {n - 1} outside use bound {self.limit}")
            self.count += n - m
            self.high_water = max(self.high_water, n - 1)
        return self.inner.segment(m, n)


class UseViolation(RuntimeError):
    pass


def source_from_spec(spec: str | dict) -> BitSource:
    """Build a basic source from ``kind=... key=...`` text."""
    fields = parse_kv(spec) if isinstance(spec, str) else dict(spec)
    kind = fields.pop("kind", None)
    try:
        if kind == "constant":
            return Constant(int(fields.pop("bit", 0)))
        if kind == "periodic":
            return Periodic(fields.pop("pattern", "01"))
        if kind == "pseudorandom":
            return Pseudorandom(int(fields.pop("seed", 0)))
        if kind == "file":
            return FileSource(fields.pop("path"))
    finally:
        if kind in ("constant", "periodic", "pseudorandom", "file") and fields:
            raise ValueError(f"unknown keys for {kind}: {sorted(fields)}")
    raise ValueError(f"unknown source kind {kind!r}")


def parse_kv(text: str) -> dict:
    out = {}
    for tok in text.split():
        if "=" not in tok:
            raise ValueError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out
