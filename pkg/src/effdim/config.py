"""Experiment configuration: INI sections in, live objects out.

A config fully determines a run.  Unknown sections or keys are rejected, so
a typo cannot silently fall back to a default.  The effective config (after
command-line overrides) is written next to every artifact as
``manifest.ini`` and can be replayed as-is.

Example::

    [run]
    command = profile
    horizon = 8192
    seed = 7

    [source]
    kind = theorem4
    schedule = power

    [estimator]
    name = compressor

    [family]
    members =
        tails grid
        endpoints odd
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from pathlib import Path

from . import core
from .complexity import ESTIMATORS, ComplexityEstimator, estimator_from_name
from .constructions import (Requirement, SegmentSchedule, build_double_segment, build_generic_like,
                            build_theorem12_X, build_theorem4, endpoint_family_upto)
from .core import BitSource, GuideSet, Pseudorandom
from .dimensions import Window
from .families import (Enumerated, Explicit, IndexFamily, IndexSet, Interval, Predicate, Progression,
                       read_index_file)
from .machine import EnumerationBudget

COMMANDS = ("construct", "profile", "transduce", "wtt", "exactk")

BASIC_KEYS = {"kind", "bit", "pattern", "seed", "path"}
ALLOWED = {
    "run": {"command", "seed", "horizon", "stages", "n_bits"},
    "source": BASIC_KEYS | {"schedule", "c", "guide", "mode", "machine", "bank",
                            "growth_compressible", "growth_incompressible", "start_length"},
    "track0": BASIC_KEYS,
    "track1": BASIC_KEYS,
    "estimator": {"name", "c"},
    "window": {"n_min", "n_max", "m_grid"},
    "family": {"members"},
    "machine": {"name", "step_budget"},
    "exactk": {"l_max", "max_program_length", "step_budget", "steps_per_stage"},
}


class ConfigError(ValueError):
    pass


def _parser() -> configparser.ConfigParser:
    p = configparser.ConfigParser(interpolation=None)
    p.optionxform = str
    return p


@dataclass
class ExperimentConfig:
    """Validated sections of a run; ``sections[name][key]`` is raw text."""

    sections: dict[str, dict[str, str]]

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        p = _parser()
        try:
            p.read_string(text)
        except configparser.Error as e:
            raise ConfigError(str(e)) from None
        cfg = cls({s: dict(p[s]) for s in p.sections()})
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_text(Path(path).read_text())
        except OSError as e:
            raise ConfigError(f"cannot read config: {e}") from None

    def validate(self) -> None:
        for name, keys in self.sections.items():
            if name not in ALLOWED:
                raise ConfigError(f"unknown section [{name}]")
            extra = set(keys) - ALLOWED[name]
            if extra:
                raise ConfigError(f"unknown keys in [{name}]: {sorted(extra)}")
        cmd = self.get("run", "command")
        if cmd is not None and cmd not in COMMANDS:
            raise ConfigError(f"unknown command {cmd!r}")

    def get(self, section: str, key: str, default=None):
        return self.sections.get(section, {}).get(key, default)

    def get_int(self, section: str, key: str, default=None) -> int | None:
        v = self.get(section, key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be an integer, got {v!r}") from None

    def get_float(self, section: str, key: str, default: float) -> float:
        v = self.get(section, key)
        try:
            return default if v is None else float(v)
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be a number, got {v!r}") from None

    def set(self, section: str, key: str, value) -> None:
        if key not in ALLOWED.get(section, ()):
            raise ConfigError(f"cannot set [{section}] {key}")
        self.sections.setdefault(section, {})[key] = str(value)

    def dumps(self) -> str:
        p = _parser()
        for name in sorted(self.sections):
            p[name] = dict(sorted(self.sections[name].items()))
        buf = io.StringIO()
        p.write(buf)
        return buf.getvalue()

    # typed accessors

    @property
    def command(self) -> str:
        cmd = self.get("run", "command")
        if cmd is None:
            raise ConfigError("[run] command is required")
        return cmd

    @property
    def horizon(self) -> int:
        h = self.get_int("run", "horizon")
        if h is None:
            raise ConfigError("[run] horizon is required")
        if h < 0:
            raise ConfigError("horizon must be >= 0")
        return h

    @property
    def seed(self) -> int:
        return self.get_int("run", "seed", 0)


def _basic_source(fields: dict[str, str], seed: int) -> BitSource:
    fields = dict(fields)
    if fields.get("kind") == "pseudorandom":
        fields.setdefault("seed", str(seed))
    try:
        return core.source_from_spec(fields)
    except (ValueError, KeyError) as e:
        raise ConfigError(f"bad source: {e}") from None


def build_schedule(cfg: ExperimentConfig) -> SegmentSchedule:
    name = cfg.get("source", "schedule", "power")
    if name == "power":
        c = cfg.get_int("source", "c", 1)
        if c < 1:
            raise ConfigError("schedule c must be >= 1")
        return SegmentSchedule.power(c)
    if name == "triangular":
        return SegmentSchedule.triangular()
    raise ConfigError(f"unknown schedule {name!r}")


def build_guide(text: str, seed: int) -> GuideSet:
    """``naturals``, ``empty``, ``evens``, ``finite 1,2,3``, ``prefix-code [seed=N]``, ``bits [seed=N]``."""
    kind, _, rest = text.strip().partition(" ")
    if kind == "naturals":
        return GuideSet.naturals()
    if kind == "empty":
        return GuideSet.empty()
    if kind == "evens":
        return GuideSet.evens()
    if kind == "finite":
        return GuideSet.finite(int(v) for v in rest.replace(",", " ").split())
    if kind in ("prefix-code", "bits"):
        kv = core.parse_kv(rest)
        src = Pseudorandom(int(kv.pop("seed", seed)))
        if kv:
            raise ConfigError(f"unknown guide keys {sorted(kv)}")
        return core.prefix_code_set(src) if kind == "prefix-code" else GuideSet.from_source(src)
    raise ConfigError(f"unknown guide {text!r}")


def build_source(cfg: ExperimentConfig, section: str = "source") -> BitSource:
    fields = cfg.sections.get(section)
    if not fields or "kind" not in fields:
        raise ConfigError(f"[{section}] kind is required")
    kind = fields["kind"]
    seed = cfg.seed
    if section != "source" or kind in ("constant", "periodic", "pseudorandom", "file"):
        extra = set(fields) - BASIC_KEYS
        if extra:
            raise ConfigError(f"keys {sorted(extra)} do not apply to kind={kind}")
        return _basic_source(fields, seed)
    base = Pseudorandom(cfg.get_int(section, "seed", seed))
    if kind == "theorem4":
        return build_theorem4(base, build_schedule(cfg))
    if kind == "double-segment":
        x0 = build_guide(cfg.get(section, "guide", "naturals"), seed)
        mode = cfg.get(section, "mode", "si-zero")
        try:
            return build_double_segment(base, x0, build_schedule(cfg), mode)
        except ValueError as e:
            raise ConfigError(str(e)) from None
    if kind == "theorem12":
        from .reductions import MACHINES

        s0 = build_guide(cfg.get(section, "guide", "naturals"), seed)
        name = cfg.get(section, "machine", cfg.get("machine", "name", "identity"))
        if name not in MACHINES:
            raise ConfigError(f"unknown machine {name!r}")
        m = MACHINES[name]()
        return build_theorem12_X(base, s0, m.use_bound, monotone=m.monotone)
    if kind == "generic-like":
        bank = []
        for line in _lines(cfg.get(section, "bank", "")):
            polarity, _, spec = line.partition(" ")
            for member in parse_family_line(spec, cfg):
                try:
                    bank.append(Requirement(member, polarity))
                except ValueError as e:
                    raise ConfigError(str(e)) from None
        if not bank:
            raise ConfigError("generic-like source needs a non-empty bank")
        return build_generic_like(
            bank, core.Constant(0), base,
            start_length=cfg.get_int(section, "start_length", 64),
            growth_compressible=cfg.get_float(section, "growth_compressible", 6.0),
            growth_incompressible=cfg.get_float(section, "growth_incompressible", 3.0),
        )
    raise ConfigError(f"unknown source kind {kind!r}")


def build_estimator(cfg: ExperimentConfig) -> ComplexityEstimator:
    name = cfg.get("estimator", "name", "compressor")
    if name not in ESTIMATORS:
        raise ConfigError(f"unknown estimator {name!r}; choose from {sorted(ESTIMATORS)}")
    c = cfg.get_int("estimator", "c")
    try:
        return estimator_from_name(name) if c is None else ESTIMATORS[name](c=c)
    except ValueError as e:
        raise ConfigError(str(e)) from None


def build_window(cfg: ExperimentConfig) -> Window:
    n_max = cfg.get_int("window", "n_max", cfg.horizon)
    n_min = cfg.get_int("window", "n_min", 64)
    grid = cfg.get("window", "m_grid")
    try:
        m_grid = tuple(int(v) for v in grid.replace(",", " ").split()) if grid else None
        return Window(n_max, n_min, m_grid)
    except ValueError as e:
        raise ConfigError(f"bad window: {e}") from None


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.replace(";", "\n").splitlines() if ln.strip()]


def parse_family_line(line: str, cfg: ExperimentConfig | None = None) -> list[IndexSet]:
    """One family line to a list of index sets.

    ``tails grid`` or ``tails 64,128``; ``ap 0:1 1:2``; ``grid 1 3`` (the sets
    ``{m 2^k}``); ``file PATH``; ``endpoints odd|even``; ``naturals``;
    ``prefix-code [seed=N]``.
    """
    kind, _, rest = line.strip().partition(" ")
    args = rest.replace(",", " ").split()
    try:
        if kind == "tails":
            if args == ["grid"]:
                if cfg is None:
                    raise ConfigError("tails grid needs a window")
                return [Interval(m) for m in build_window(cfg).m_grid]
            return [Interval(int(m)) for m in args]
        if kind == "ap":
            out = []
            for a in args:
                start, step = a.split(":")
                out.append(Progression(int(start), int(step)))
            return out
        if kind == "grid":
            return [Enumerated((lambda m: lambda k: m << k)(int(m)), f"{m}*2^k") for m in args]
        if kind == "file":
            return [read_index_file(rest.strip())]
        if kind == "naturals":
            return [Interval(0)]
        if kind == "endpoints":
            if cfg is None or len(args) != 1:
                raise ConfigError("endpoints needs a parity and a schedule")
            w = build_window(cfg)
            return list(endpoint_family_upto(build_schedule(cfg), args[0], w.n_min, w.n_max).members)
        if kind == "prefix-code":
            g = build_guide(line, cfg.seed if cfg else 0)
            return [Predicate(g.membership, g.description)]
        if kind == "explicit":
            return [Explicit(tuple(int(a) for a in args))]
    except (ValueError, OSError) as e:
        raise ConfigError(f"bad family line {line!r}: {e}") from None
    raise ConfigError(f"unknown family line {line!r}")


def build_family(cfg: ExperimentConfig) -> IndexFamily:
    text = cfg.get("family", "members", "tails grid")
    members: list[IndexSet] = []
    for line in _lines(text):
        members.extend(parse_family_line(line, cfg))
    if not members:
        raise ConfigError("family is empty")
    return IndexFamily(tuple(members), "; ".join(_lines(text)))


def build_budget(cfg: ExperimentConfig) -> EnumerationBudget:
    d = EnumerationBudget()
    return EnumerationBudget(
        l_max=cfg.get_int("exactk", "l_max", d.l_max),
        max_program_length=cfg.get_int("exactk", "max_program_length", d.max_program_length),
        step_budget=cfg.get_int("exactk", "step_budget", d.step_budget),
        steps_per_stage=cfg.get_int("exactk", "steps_per_stage", d.steps_per_stage),
    )
