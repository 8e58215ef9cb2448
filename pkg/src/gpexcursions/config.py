"""Run configuration: INI-style ``key = value`` files overridden by CLI flags.

Section headers only group keys; every key is looked up in a flat namespace,
so ``[model] d_c = 2`` and ``[grid] d_c = 2`` are equivalent.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

from .acf import AcfModel, ConditionFlags
from .errors import ConfigError

__all__ = ["RunConfig", "load_config", "parse_list"]


def parse_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).replace(";", ",").split(",") if v.strip()]


def _parse_bool(value) -> Optional[bool]:
    if value is None or isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    if v in ("", "none", "unknown"):
        return None
    raise ConfigError(f"not a boolean: {value!r}")


@dataclass
class RunConfig:
    experiment: str = "run"
    # model
    kind: str = "squared_exponential"
    d_c: float = 2.0
    table: Optional[str] = None
    flags: Optional[str] = None  # "eq5=true,eq6=true,..." for tabulated models
    # grid
    dt: Optional[float] = None
    total_time: float = 1.0e6
    replicates: int = 1
    block_samples: int = 2**21
    workers: int = 1
    seed: int = 0
    # levels
    gamma: float = 1.0
    gamma1: float = 2.5
    gamma2: float = 2.7
    tau1: float = 0.0
    tau2: float = 0.0
    delta_gammas: list = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3, 0.4, 0.5])
    gamma1_grid: list = field(default_factory=list)
    fixed_delta_gamma: float = 0.1
    k_values: list = field(default_factory=lambda: [1, 2, 3])
    # validation gates
    tolerance: Optional[float] = None
    erlang_tolerance: float = 0.07
    rate_tolerance: float = 0.05
    mean_tolerance: float = 0.05
    atom_tolerance: float = 0.03
    t2_tolerance: float = 0.07
    min_events: Optional[int] = None
    oracle_samples: int = 10**6
    oracle_sigmas: float = 3.0
    out: str = "out"

    def __post_init__(self):
        self.validate()

    @property
    def step(self) -> float:
        return self.dt if self.dt is not None else self.d_c / 20.0

    def validate(self) -> None:
        if self.dt is not None and not (self.dt > 0):
            raise ConfigError("dt must be positive")
        if self.kind != "tabulated" and not (self.d_c > 0):
            raise ConfigError("d_c must be positive")
        if self.kind == "tabulated" and not self.table:
            raise ConfigError("tabulated models need 'table = <csv path>'")
        if not (self.total_time / self.step >= 2) or not math.isfinite(self.total_time):
            raise ConfigError(
                f"total_time/dt must be >= 2 (total_time={self.total_time}, dt={self.step})"
            )
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.block_samples < 16:
            raise ConfigError("block_samples must be >= 16")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def condition_flags(self) -> Optional[ConditionFlags]:
        if not self.flags:
            return None
        kw = {}
        for item in self.flags.split(","):
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in {f.name for f in dataclasses.fields(ConditionFlags)}:
                raise ConfigError(f"unknown condition flag {key!r}")
            kw[key] = _parse_bool(value)
        return ConditionFlags(**kw)

    def model(self) -> AcfModel:
        if self.kind == "exponential":
            return AcfModel.exponential(self.d_c)
        if self.kind == "squared_exponential":
            return AcfModel.squared_exponential(self.d_c)
        if self.kind == "tabulated":
            return AcfModel.from_csv(self.table, flags=self.condition_flags())
        raise ConfigError(f"unknown ACF kind {self.kind!r}")

    def as_dict(self) -> dict:
        """Provenance record; ``out`` is left out so reports do not depend on where they land."""
        d = dataclasses.asdict(self)
        d["dt"] = self.step
        del d["out"]
        return d

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_LIST_FIELDS = {"delta_gammas", "gamma1_grid", "k_values"}


def _coerce(name: str, value):
    if value is None:
        return None
    if name in _LIST_FIELDS:
        vals = parse_list(value)
        return [int(v) for v in vals] if name == "k_values" else vals
    default = _FIELDS[name].default
    if name in ("experiment", "kind", "table", "flags", "out"):
        return str(value)
    if name in ("replicates", "block_samples", "workers", "seed", "oracle_samples",
                "min_events"):
        return int(float(value)) if name != "seed" else int(value)
    if isinstance(default, bool):
        return _parse_bool(value)
    return float(value)


def load_config(path: Optional[str] = None, overrides: Optional[dict] = None) -> RunConfig:
    """Build a :class:`RunConfig` from an optional file plus overrides (which win)."""
    values = {}
    if path:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        with open(path) as fh:
            text = fh.read()
        if not text.lstrip().startswith("["):
            text = "[run]\n" + text
        parser.read_string(text, source=str(path))
        for section in parser.sections():
            for key, value in parser.items(section):
                key = key.strip().replace("-", "_")
                if key not in _FIELDS:
                    raise ConfigError(f"{path}: unknown key {key!r} in [{section}]")
                values[key] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    try:
        return RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
