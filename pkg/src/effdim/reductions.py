"""Oracle computations with enforced query bounds.

Two harnesses live here:

* :func:`transduce`, a two-track switching transducer.  It emits bits from
  one of two input sequences and jumps to the other track whenever the
  current track's randomness deficiency (as seen through a staged
  complexity estimator) grows.  All reads go through a query monitor on
  the interleaved input ``A0 ⊕ A1``.
* :func:`apply_wtt`, which runs a bounded-use oracle machine bit by bit,
  faulting on any read past the declared use bound.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

from .complexity import ComplexityEstimator
from .constructions import BoundarySet, build_theorem12_X, ell_schedule, tripled
from .core import BitSource, BitWord, GuideSet, Pseudorandom, QueryMonitor, UseViolation, join2
from .dimensions import DimensionProfile, Window, profile
from .families import IndexFamily, ScanResult, cofinite_tails, immunity_scan

__all__ = [
    "SwitchEvent", "TransducerResult", "transduce", "WttMachine", "WttResult", "apply_wtt",
    "identity_machine", "bit_repeat_machine", "square_sample_machine", "WordSource",
    "Theorem12Result", "theorem12_experiment", "UseViolation",
]


@dataclass(frozen=True)
class SwitchEvent:
    stage: int
    from_track: int
    to_track: int
    n: int  # prefix length whose deficiency triggered the switch
    deficiency: int  # the switched-away track's deficiency after the update


@dataclass
class TransducerResult:
    output: BitWord
    switches: list[SwitchEvent]
    final_track: int
    deficiencies: tuple[int, int]
    high_water: int
    queries: int
    use_log: list[tuple[int, int]]  # (bits emitted, query high-water mark at that time)
    stages: int

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "stages": self.stages,
            "output_length": len(self.output),
            "final_track": self.final_track,
            "deficiencies": list(self.deficiencies),
            "switches": [vars(e) for e in self.switches],
            "query_high_water": self.high_water,
            "queries": self.queries,
        }


class _Track:
    """Cached bits and settled deficiencies of one input track."""

    def __init__(self, monitor: QueryMonitor, index: int, est: ComplexityEstimator):
        self.monitor, self.index, self.est = monitor, index, est
        self.bits: list[str] = []
        self.coder = est.incremental()
        self.values: list[int] = []  # values[n-1] = estimate of the n-bit prefix
        self.scanned = 0
        self.pending: list[tuple[int, int]] = []  # (settle stage, n)
        self.best = -math.inf
        self.best_n = 0
        self.deficiency = 0

    def _read(self, n: int) -> None:
        while len(self.bits) < n:
            j = len(self.bits)
            b = self.monitor.bit_at(2 * j + self.index)
            self.bits.append("1" if b else "0")
            self.values.append(self.coder.push(b))

    def _consider(self, n: int, stage: int) -> None:
        sigma = BitWord("".join(self.bits[:n]))
        if stage < self.est.settle_stage(sigma):
            heapq.heappush(self.pending, (self.est.settle_stage(sigma), n))
            return
        d = n - self.values[n - 1]
        if d > self.best:
            self.best, self.best_n = d, n

    def scan(self, bound: int, stage: int) -> None:
        """Bring the running maximum deficiency up to date for ``n <= bound``."""
        self._read(bound)
        while self.pending and self.pending[0][0] <= stage:
            _, n = heapq.heappop(self.pending)
            self._consider(n, stage)
        for n in range(self.scanned + 1, bound + 1):
            self._consider(n, stage)
        self.scanned = max(self.scanned, bound)


def transduce(a0: BitSource, a1: BitSource, stages: int, est: ComplexityEstimator) -> TransducerResult:
    """Run the switching transducer for ``stages`` stages.

    At stage ``s+1`` the current track ``i`` is scanned over prefix lengths
    ``n <= min(s+1, p+1)``, with ``p`` the number of bits emitted so far.  If
    some ``n`` has ``staged_K(A_i↾n, s+1) < n - c_i``, then ``c_i`` is raised
    to the largest deficiency seen and the transducer switches tracks,
    spending the stage.  Otherwise it emits bit ``p`` of the current track.
    Capping the scan at ``p+1`` keeps every read of ``A0 ⊕ A1`` below
    ``2p + 2``.
    """
    if stages < 0:
        raise ValueError("stages must be >= 0")
    monitor = QueryMonitor(join2(a0, a1))
    tracks = (_Track(monitor, 0, est), _Track(monitor, 1, est))
    out: list[str] = []
    switches: list[SwitchEvent] = []
    use_log: list[tuple[int, int]] = []
    cur = 0
    for s in range(stages):
        p = len(out)
        monitor.limit = 2 * p + 2
        t = tracks[cur]
        t.scan(min(s + 1, p + 1), s + 1)
        if t.best > t.deficiency:
            t.deficiency = t.best
            switches.append(SwitchEvent(s + 1, cur, 1 - cur, t.best_n, t.deficiency))
            cur = 1 - cur
            continue
        out.append(t.bits[p])
        use_log.append((p + 1, monitor.high_water))
    return TransducerResult(
        output=BitWord("".join(out)),
        switches=switches,
        final_track=cur,
        deficiencies=(tracks[0].deficiency, tracks[1].deficiency),
        high_water=monitor.high_water,
        queries=monitor.count,
        use_log=use_log,
        stages=stages,
    )


class _OutOfSteps(Exception):
    pass


class Oracle:
    """What an evaluator sees: ``query`` reads the oracle, ``tick`` spends a step."""

    def __init__(self, monitor: QueryMonitor, budget: int | None):
        self._monitor = monitor
        self.budget = budget
        self.steps = 0

    def tick(self, k: int = 1) -> None:
        self.steps += k
        if self.budget is not None and self.steps > self.budget:
            raise _OutOfSteps

    def query(self, i: int) -> int:
        self.tick()
        return self._monitor.bit_at(i)


@dataclass(frozen=True)
class WttMachine:
    """Bit evaluator with a declared use bound.

    ``evaluator(oracle, n)`` returns bit ``n`` and must only query indices
    below ``use_bound(n)``.  ``step_budget`` caps the steps of each bit,
    counting one step for the answer and one per query or tick.
    """

    evaluator: Callable[[Oracle, int], int]
    use_bound: Callable[[int], int]
    step_budget: int | None = 10**6
    name: str = "machine"
    monotone: bool = False  # use_bound is nondecreasing

    def describe(self) -> dict:
        return {"machine": self.name, "step_budget": self.step_budget}


@dataclass
class WttResult:
    bits: BitWord
    total: bool
    nontotal_at: int | None
    high_water: int
    steps: int

    def to_json(self) -> dict:
        return {"schema_version": 1, "total": self.total, "nontotal_at": self.nontotal_at,
                "length": len(self.bits), "query_high_water": self.high_water, "steps": self.steps}


def apply_wtt(machine: WttMachine, x: BitSource, n_bits: int) -> WttResult:
    """The first ``n_bits`` of ``Φ^X``, or a report of the first bit that ran out of steps.

    A read at or beyond ``use_bound(n)`` raises :class:`UseViolation`.
    """
    monitor = QueryMonitor(x)
    out: list[str] = []
    total_steps = 0
    for n in range(n_bits):
        monitor.limit = machine.use_bound(n)
        oracle = Oracle(monitor, machine.step_budget)
        try:
            oracle.tick()
            b = machine.evaluator(oracle, n)
        except _OutOfSteps:
            return WttResult(BitWord("".join(out)), False, n, monitor.high_water, total_steps + oracle.steps)
        total_steps += oracle.steps
        out.append("1" if b else "0")
    return WttResult(BitWord("".join(out)), True, None, monitor.high_water, total_steps)


def identity_machine(step_budget: int | None = 10**6) -> WttMachine:
    return WttMachine(lambda o, n: o.query(n), lambda n: n + 1, step_budget, "identity", True)


def bit_repeat_machine(step_budget: int | None = 10**6) -> WttMachine:
    """Bit ``j`` of the oracle repeated ``2j+1`` times: ``Φ(m) = X(⌊√m⌋)``."""
    return WttMachine(lambda o, m: o.query(math.isqrt(m)), lambda m: math.isqrt(m) + 1,
                      step_budget, "bit-repeat", True)


def square_sample_machine(step_budget: int | None = 10**6) -> WttMachine:
    """``Φ(0) = 0`` and ``Φ(n) = X(n² - 1)``; use bound ``n²``."""

    def ev(o, n):
        return o.query(n * n - 1) if n else 0

    return WttMachine(ev, lambda n: n * n, step_budget, "square-sample", True)


MACHINES = {
    "identity": identity_machine,
    "bit-repeat": bit_repeat_machine,
    "square-sample": square_sample_machine,
}


@dataclass(frozen=True)
class WordSource(BitSource):
    """A finite word read as an infinite sequence, zero past its end."""

    bits: str
    label: str = "word"
    kind = "word"

    def bit_at(self, n):
        return 1 if n < len(self.bits) and self.bits[n] == "1" else 0

    def segment(self, m, n):
        part = self.bits[m:n]
        return part + "0" * (n - m - len(part))

    def describe(self):
        return {"kind": self.kind, "label": self.label, "length": len(self.bits)}


@dataclass
class Theorem12Result:
    x_profile: DimensionProfile
    image_profile: DimensionProfile
    wtt: WttResult
    endpoints: list[int]
    immunity: list[ScanResult] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "x": self.x_profile.to_json(),
            "image": self.image_profile.to_json() if self.image_profile else None,
            "wtt": self.wtt.to_json(),
            "endpoints": self.endpoints,
            "immunity": [vars(r) for r in self.immunity],
        }


def theorem12_experiment(s0: GuideSet, machine: WttMachine, fam: IndexFamily, est: ComplexityEstimator,
                         horizon: int, f: Callable[[int], int] | None = None, r: BitSource = Pseudorandom(0),
                         n_min: int = 64, scan_depth: int = 64) -> Theorem12Result:
    """Build ``X`` against ``machine`` and profile ``X`` and ``Φ^X`` side by side.

    ``X`` is profiled over the tails of ``{ℓ_k : k ∈ S}``; if none of them
    meets the window (e.g. ``S`` empty), the window's cofinite tails stand
    in.  ``Φ^X`` is profiled over ``fam``.  ``immunity`` scans ``fam`` for
    members escaping ``S``.
    """
    f = f or machine.use_bound
    x = build_theorem12_X(r, s0, f, monotone=machine.monotone)
    s = tripled(s0)
    w = Window(horizon, n_min)
    members = []
    k = 0
    while True:
        b = BoundarySet(x.sched, s.membership, k, f"ell-tail-{k}")
        if b.next_after(w.n_min - 1, horizon) is None:
            break
        members.append(b)
        k += 1
    endpoints = members[0].elements(horizon) if members else []
    fam_x = IndexFamily(tuple(members), "ell-endpoints") if members else cofinite_tails(w.m_grid)
    x_prof = profile(x, est, fam_x, w, source_label="theorem12-X")
    res = apply_wtt(machine, x, horizon)
    if not res.total:
        return Theorem12Result(x_prof, None, res, endpoints)
    image = WordSource(res.bits.bits, f"{machine.name}-image")
    img_prof = profile(image, est, fam, w, source_label=f"{machine.name}(X)")
    scans = immunity_scan(s, fam, scan_depth, horizon)
    return Theorem12Result(x_prof, img_prof, res, endpoints, scans)
