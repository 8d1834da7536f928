"""Run configuration.

Field names are the parameter code names used in config files, so a file is
a flat list of ``key = value`` lines::

    # f4.cfg
    problem = f4_himmelblau
    population_size = 100
    tau_bounds_gain = 0.02, 0.30, 0.20
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from typing import Optional

from .exceptions import ContractViolation

__all__ = ["RunConfig", "ConfigError", "parse_config_text", "load_config_file"]


class ConfigError(ContractViolation):
    """Malformed configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class RunConfig:
    problem: str = "f2_equal_maxima"
    mode: Optional[str] = None  # "so" | "mo"; None picks from the problem
    seed: int = 0
    max_generations: int = 200
    population_size: int = 100
    chaotic_mu: float = 4.0
    chaotic_step_init: float = 0.5
    chaotic_step_decay: float = 0.99
    crossover_rate: float = 0.9
    k_neighbors: int = 10
    graph_symmetrize: str = "mutual"  # "mutual" | "union"
    persistence_tau_init: float = 0.10
    tau_min: float = 0.02
    tau_max: float = 0.30
    tau_gain: float = 0.20
    k_target: Optional[int] = None  # None -> nearest integer to sqrt(N), clipped
    saliency_beta: float = 0.70
    quota_min: int = 1
    rankcrowd_kappa: float = 1.0
    height_transform: str = "rank"  # SO heights: "rank" | "minmax"
    local_sigma: float = 0.05
    refine_fraction: float = 0.5
    archive_size: int = 5
    decoding: bool = True  # False forces a single basin every generation
    record_canvas: bool = False

    def __post_init__(self):
        checks = [
            ("mode", self.mode in (None, "so", "mo"), "must be 'so' or 'mo'"),
            ("max_generations", self.max_generations >= 1, "must be >= 1"),
            ("population_size", self.population_size >= 2, "must be >= 2"),
            ("chaotic_mu", 0.0 < self.chaotic_mu <= 4.0, "must lie in (0, 4]"),
            ("chaotic_step_init", self.chaotic_step_init >= 0.0, "must be >= 0"),
            ("chaotic_step_decay", 0.0 < self.chaotic_step_decay < 1.0, "must lie in (0, 1)"),
            ("crossover_rate", 0.0 <= self.crossover_rate <= 1.0, "must lie in [0, 1]"),
            ("k_neighbors", self.k_neighbors >= 1, "must be >= 1"),
            ("graph_symmetrize", self.graph_symmetrize in ("mutual", "union"),
             "must be 'mutual' or 'union'"),
            ("height_transform", self.height_transform in ("rank", "minmax"),
             "must be 'rank' or 'minmax'"),
            ("tau_min", 0.0 <= self.tau_min <= self.tau_max, "need 0 <= tau_min <= tau_max"),
            ("persistence_tau_init", self.persistence_tau_init >= 0.0, "must be >= 0"),
            ("tau_gain", self.tau_gain >= 0.0, "must be >= 0"),
            ("k_target", self.k_target is None or self.k_target >= 1, "must be >= 1"),
            ("saliency_beta", 0.0 <= self.saliency_beta <= 1.0, "must lie in [0, 1]"),
            ("quota_min", 1 <= self.quota_min <= self.population_size, "must lie in [1, population_size]"),
            ("rankcrowd_kappa", self.rankcrowd_kappa >= 0.0, "must be >= 0"),
            ("local_sigma", self.local_sigma > 0.0, "must be > 0"),
            ("refine_fraction", 0.0 <= self.refine_fraction <= 1.0, "must lie in [0, 1]"),
            ("archive_size", self.archive_size >= 1, "must be >= 1"),
        ]
        for name, ok, msg in checks:
            if not ok:
                raise ConfigError(name, msg)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_BOOL_WORDS = {"true": True, "yes": True, "on": True, "1": True,
               "false": False, "no": False, "off": False, "0": False}
# accepted for compatibility with the reference parameter table; the decoding
# canvas is always parents + candidates (2N points)
IGNORED_KEYS = ("canvas_size",)


def _coerce(name, raw):
    kind = _FIELD_TYPES[name]
    text = str(raw).strip()
    try:
        if kind in ("int", "Optional[int]"):
            if kind == "Optional[int]" and text.lower() in ("", "none", "auto"):
                return None
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            if isinstance(raw, bool):
                return raw
            return _BOOL_WORDS[text.lower()]
        if kind == "Optional[str]":
            return None if text.lower() in ("", "none", "auto") else text.lower()
        return text
    except (ValueError, KeyError):
        raise ConfigError(name, f"cannot parse {raw!r} as {kind}") from None


def coerce_mapping(mapping):
    """Typed field values from a ``{key: raw}`` mapping of config entries."""
    out = {}
    for key, raw in mapping.items():
        key = key.strip()
        if key in IGNORED_KEYS:
            continue
        if key == "tau_bounds_gain":
            parts = [p for p in str(raw).replace("(", "").replace(")", "").split(",") if p.strip()]
            if len(parts) != 3:
                raise ConfigError(key, "expected three values: tau_min, tau_max, gain")
            try:
                out["tau_min"], out["tau_max"], out["tau_gain"] = (float(p) for p in parts)
            except ValueError:
                raise ConfigError(key, f"cannot parse {raw!r}") from None
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(key, "unknown configuration key")
        out[key] = _coerce(key, raw)
    return out


def parse_config_text(text):
    """Parse ``key = value`` lines (``#`` starts a comment) into typed values."""
    entries = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected 'key = value'")
        key, value = line.split("=", 1)
        entries[key.strip()] = value.strip()
    return coerce_mapping(entries)


def load_config_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())
