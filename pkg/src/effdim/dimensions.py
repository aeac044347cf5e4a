"""Finite-horizon versions of the six dimension functionals.

All values are exact rationals over a window ``[n_min, n_max]``.  The
ideal functionals take sup/inf over infinitely many tails or sets; here
``sup_m inf_{n >= m}`` becomes a max over ``m_grid`` of a min over the window
tail, and family functionals range over a finite family only.  So the
sup-inf values are lower bounds of the ideal ones and inf-sup values are
upper bounds, relative to the chosen estimator.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

from .complexity import ComplexityEstimator
from .core import BitSource, prefix
from .families import HorizonExhausted, IndexFamily, IndexSet, Interval


@dataclass(frozen=True)
class Window:
    n_max: int
    n_min: int = 64
    m_grid: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 1 <= self.n_min < self.n_max:
            raise ValueError(f"need 1 <= n_min < n_max, got {self.n_min}, {self.n_max}")
        if self.m_grid is None:
            grid, m = [], 1
            while m <= self.n_max // 4:
                grid.append(m)
                m *= 2
            object.__setattr__(self, "m_grid", tuple(grid) or (0,))
        if not all(0 <= m < self.n_max for m in self.m_grid):
            raise ValueError("m_grid must lie in [0, n_max)")


@lru_cache(maxsize=32)
def _estimates(a: BitSource, est: ComplexityEstimator, n_max: int) -> tuple[int, ...]:
    return tuple(est.prefix_estimates(prefix(a, n_max)))


class RatioTable:
    """``K̂(A↾n)/n`` for every ``n <= n_max``, with suffix extrema."""

    def __init__(self, a: BitSource, est: ComplexityEstimator, n_max: int):
        self.k = _estimates(a, est, n_max)
        self.n_max = n_max
        self._sfx = None

    def at(self, n: int) -> Fraction:
        return Fraction(self.k[n], n)

    def _suffix(self):
        if self._sfx is None:
            size = self.n_max + 1
            lo_v, lo_n = [None] * (size + 1), [None] * (size + 1)
            hi_v, hi_n = [None] * (size + 1), [None] * (size + 1)
            for n in range(self.n_max, 0, -1):
                r = self.at(n)
                if lo_v[n + 1] is None or r <= lo_v[n + 1]:
                    lo_v[n], lo_n[n] = r, n
                else:
                    lo_v[n], lo_n[n] = lo_v[n + 1], lo_n[n + 1]
                if hi_v[n + 1] is None or r >= hi_v[n + 1]:
                    hi_v[n], hi_n[n] = r, n
                else:
                    hi_v[n], hi_n[n] = hi_v[n + 1], hi_n[n + 1]
            self._sfx = (lo_v, lo_n, hi_v, hi_n)
        return self._sfx

    def tail_min(self, lo: int) -> tuple[Fraction, int]:
        lo_v, lo_n, _, _ = self._suffix()
        return lo_v[lo], lo_n[lo]

    def tail_max(self, lo: int) -> tuple[Fraction, int]:
        _, _, hi_v, hi_n = self._suffix()
        return hi_v[lo], hi_n[lo]

    def over(self, member: IndexSet, w: Window) -> tuple[Fraction, int, Fraction, int]:
        """(min, argmin, max, argmax) of the ratio over ``member ∩ [n_min, n_max]``."""
        if isinstance(member, Interval):
            lo = max(member.start, w.n_min)
            if lo > w.n_max:
                raise HorizonExhausted(f"{member.label} misses [{w.n_min}, {w.n_max}]")
            return (*self.tail_min(lo), *self.tail_max(lo))
        elems = member.elements(w.n_max, lo=w.n_min)
        if not elems:
            raise HorizonExhausted(f"{member.label} misses [{w.n_min}, {w.n_max}]")
        vals = [(self.at(n), n) for n in elems]
        lo_r, lo_n = min(vals, key=lambda t: t[0])
        hi_r, hi_n = max(vals, key=lambda t: t[0])
        return lo_r, lo_n, hi_r, hi_n


def _table(a, est, w, table):
    if table is not None and table.n_max >= w.n_max:
        return table
    return RatioTable(a, est, w.n_max)


@dataclass(frozen=True)
class Witness:
    """Which set (or tail start) and which prefix length realize a value."""

    value: Fraction
    member: str
    n: int


def dim_H_hat(a: BitSource, est: ComplexityEstimator, w: Window, table: RatioTable | None = None) -> Fraction:
    return _H(a, est, w, table).value


def dim_p_hat(a: BitSource, est: ComplexityEstimator, w: Window, table: RatioTable | None = None) -> Fraction:
    return _P(a, est, w, table).value


def _H(a, est, w, table=None) -> Witness:
    t = _table(a, est, w, table)
    best = None
    for m in w.m_grid:
        v, n = t.tail_min(max(m, w.n_min))
        if best is None or v > best.value:
            best = Witness(v, f"[{m},inf)", n)
    return best


def _P(a, est, w, table=None) -> Witness:
    t = _table(a, est, w, table)
    best = None
    for m in w.m_grid:
        v, n = t.tail_max(max(m, w.n_min))
        if best is None or v < best.value:
            best = Witness(v, f"[{m},inf)", n)
    return best


def _member_values(a, est, fam, w, table):
    t = _table(a, est, w, table)
    return [(member, t.over(member, w)) for member in fam]


def _SI(a, est, fam, w, table=None) -> tuple[Witness, list[Witness]]:
    per = [Witness(lo, m.label, lo_n) for m, (lo, lo_n, _, _) in _member_values(a, est, fam, w, table)]
    return max(per, key=lambda x: x.value), per


def _IS(a, est, fam, w, table=None) -> tuple[Witness, list[Witness]]:
    per = [Witness(hi, m.label, hi_n) for m, (_, _, hi, hi_n) in _member_values(a, est, fam, w, table)]
    return min(per, key=lambda x: x.value), per


def dim_si_hat(a: BitSource, est: ComplexityEstimator, fam: IndexFamily, w: Window,
               table: RatioTable | None = None) -> Fraction:
    """Max over members of the min ratio along the member."""
    return _SI(a, est, fam, w, table)[0].value


def dim_is_hat(a: BitSource, est: ComplexityEstimator, fam: IndexFamily, w: Window,
               table: RatioTable | None = None) -> Fraction:
    """Min over members of the max ratio along the member."""
    return _IS(a, est, fam, w, table)[0].value


PROFILE_SCHEMA_VERSION = 1
CSV_COLUMNS = ("source", "estimator", "family", "n_min", "n_max", "dim_H", "dim_is", "dim_si", "dim_p",
               "dim_H_exact", "dim_is_exact", "dim_si_exact", "dim_p_exact")


@dataclass
class DimensionProfile:
    dim_H: Fraction
    dim_p: Fraction
    dim_si: Fraction
    dim_is: Fraction
    estimator: str
    window: Window
    family: str
    source: str = ""
    witnesses: dict = field(default_factory=dict)

    def chain_ok(self) -> bool:
        """The min/max lattice ordering; exact, no tolerance."""
        return (self.dim_H <= self.dim_is <= self.dim_p) and (self.dim_H <= self.dim_si <= self.dim_p)

    def csv_row(self) -> list[str]:
        vals = (self.dim_H, self.dim_is, self.dim_si, self.dim_p)
        return [self.source, self.estimator, self.family, str(self.window.n_min), str(self.window.n_max),
                *(repr(float(v)) for v in vals), *(str(v) for v in vals)]

    def to_json(self) -> dict:
        def wit(x: Witness):
            return {"value": str(x.value), "member": x.member, "n": x.n}

        return {
            "schema_version": PROFILE_SCHEMA_VERSION,
            "source": self.source,
            "estimator": self.estimator,
            "family": self.family,
            "window": {"n_min": self.window.n_min, "n_max": self.window.n_max,
                       "m_grid": list(self.window.m_grid)},
            "values": {k: {"exact": str(v), "float": float(v)} for k, v in
                       (("dim_H", self.dim_H), ("dim_is", self.dim_is), ("dim_si", self.dim_si),
                        ("dim_p", self.dim_p))},
            "witnesses": {k: (wit(v) if isinstance(v, Witness) else [wit(x) for x in v])
                          for k, v in self.witnesses.items()},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def profile(a: BitSource, est: ComplexityEstimator, fam: IndexFamily, w: Window,
            source_label: str | None = None) -> DimensionProfile:
    table = RatioTable(a, est, w.n_max)
    h, p = _H(a, est, w, table), _P(a, est, w, table)
    si, si_members = _SI(a, est, fam, w, table)
    is_, is_members = _IS(a, est, fam, w, table)
    return DimensionProfile(
        dim_H=h.value, dim_p=p.value, dim_si=si.value, dim_is=is_.value,
        estimator=est.name, window=w, family=fam.label,
        source=source_label if source_label is not None else a.spec(),
        witnesses={"dim_H": h, "dim_p": p, "dim_si": si, "dim_is": is_,
                   "si_members": si_members, "is_members": is_members},
    )


def covers_top(fam: IndexFamily, w: Window) -> bool:
    """Every member meets the last tail window ``[max(m_grid), n_max]``.

    Under this condition (and with the tails of ``m_grid`` in the family)
    the chain ``H <= is, si <= p`` is a lattice identity.
    """
    lo = max(max(w.m_grid), w.n_min)
    return all(m.next_after(lo - 1, w.n_max) is not None for m in fam)
