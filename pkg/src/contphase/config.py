"""
Experiment configuration: strict schema validation, canonical digests, and
result records.

Configs are YAML documents with nested sections.  The schema (not the
syntax) is the contract: every key is checked against a per-section allow
list and unknown keys abort before any computation.  See README for the full
schema and shipped examples.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .core import PhysicalConstants, QuadratureScheme, SpectralBand

__all__ = [
    "ConfigError",
    "EXPERIMENTS",
    "OutputSpec",
    "ExperimentConfig",
    "ResultRecord",
    "parse_config",
    "load_config",
    "emit_config",
    "config_digest",
]

EXPERIMENTS = (
    "dirac-circuit",
    "reflectionless-phase",
    "smatrix-compare",
    "oracle-verify",
)

_FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """A configuration document violates the schema; the message names the
    offending field."""


# per-experiment model-section schema: name -> (type, required, default)
_MODEL_SCHEMA: dict[str, dict[str, tuple]] = {
    "dirac-circuit": {
        "thetas": (list, True, None),
        "k": (float, False, 0.0),
        "omega0": (float, False, 1.0),
        "branch": (int, False, -1),
        "sigma3_sector": (int, False, 1),
    },
    "reflectionless-phase": {
        "k1": (float, True, None),
        "mass": (float, False, 1.0),
        "half_length": (float, False, 16.0),
    },
    "smatrix-compare": {
        "k1": (float, True, None),
        "mass": (float, False, 1.0),
        "half_length": (float, False, 16.0),
    },
    "oracle-verify": {
        "k1": (float, False, 1.0),
        "mass": (float, False, 1.0),
    },
}

_SCHEME_FIELDS = {
    "time_panels": int,
    "time_order": int,
    "space_truncation": float,
    "space_points": int,
    "kprime_truncation": float,
    "kprime_points": int,
    "extrapolation_levels": int,
}


@dataclass(frozen=True)
class OutputSpec:
    path: str = "result.csv"
    format: str = "csv"

    def __post_init__(self):
        if self.format not in _FORMATS:
            raise ConfigError(f"output.format must be one of {_FORMATS}, "
                              f"got {self.format!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    constants: PhysicalConstants = PhysicalConstants()
    model: dict = field(default_factory=dict)
    sweep: Optional[SpectralBand] = None
    scheme: QuadratureScheme = QuadratureScheme()
    output: OutputSpec = OutputSpec()

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "experiment": self.experiment,
            "constants": {"hbar": self.constants.hbar, "c": self.constants.c},
            "model": dict(self.model),
            "scheme": {k: getattr(self.scheme, k) for k in _SCHEME_FIELDS},
            "output": {"path": self.output.path, "format": self.output.format},
        }
        if self.sweep is not None:
            d["sweep"] = {"k_lo": self.sweep.k_lo, "k_hi": self.sweep.k_hi,
                          "n_points": self.sweep.n_points}
        return d


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section {where!r}")


def _coerce(value, typ, name: str):
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"field {name!r} must be a number, got {value!r}")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field {name!r} must be an integer, got {value!r}")
        return int(value)
    if typ is list:
        if not isinstance(value, list) or not value:
            raise ConfigError(f"field {name!r} must be a non-empty list")
        return [_coerce(v, float, f"{name}[]") for v in value]
    raise ConfigError(f"unsupported type for field {name!r}")


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a raw mapping against the schema and build the config."""
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    _check_keys(data, {"experiment", "constants", "model", "sweep", "scheme",
                       "output"}, "<root>")
    exp = data.get("experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {exp!r}")

    const_raw = data.get("constants", {}) or {}
    _check_keys(const_raw, {"hbar", "c"}, "constants")
    try:
        constants = PhysicalConstants(
            hbar=_coerce(const_raw.get("hbar", 1.0), float, "constants.hbar"),
            c=_coerce(const_raw.get("c", 1.0), float, "constants.c"))
    except ValueError as e:
        raise ConfigError(f"constants: {e}") from e

    model_raw = data.get("model", {}) or {}
    schema = _MODEL_SCHEMA[exp]
    _check_keys(model_raw, set(schema), f"model ({exp})")
    model: dict[str, Any] = {}
    for name, (typ, required, default) in schema.items():
        if name in model_raw:
            model[name] = _coerce(model_raw[name], typ, f"model.{name}")
        elif required:
            raise ConfigError(f"missing required field model.{name!r} "
                              f"for experiment {exp!r}")
        else:
            model[name] = default

    sweep = None
    if "sweep" in data and data["sweep"] is not None:
        sw = data["sweep"]
        _check_keys(sw, {"k_lo", "k_hi", "n_points"}, "sweep")
        try:
            sweep = SpectralBand(
                k_lo=_coerce(sw.get("k_lo"), float, "sweep.k_lo"),
                k_hi=_coerce(sw.get("k_hi"), float, "sweep.k_hi"),
                n_points=_coerce(sw.get("n_points", 16), int, "sweep.n_points"))
        except ValueError as e:
            raise ConfigError(f"sweep: {e}") from e

    scheme_raw = data.get("scheme", {}) or {}
    _check_keys(scheme_raw, set(_SCHEME_FIELDS), "scheme")
    kwargs = {k: _coerce(v, _SCHEME_FIELDS[k], f"scheme.{k}")
              for k, v in scheme_raw.items()}
    try:
        scheme = QuadratureScheme(**kwargs)
    except ValueError as e:
        raise ConfigError(f"scheme: {e}") from e

    out_raw = data.get("output", {}) or {}
    _check_keys(out_raw, {"path", "format"}, "output")
    output = OutputSpec(path=str(out_raw.get("path", "result.csv")),
                        format=str(out_raw.get("format", "csv")))

    return ExperimentConfig(experiment=exp, constants=constants, model=model,
                            sweep=sweep, scheme=scheme, output=output)


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as e:
            raise ConfigError(f"config is not valid YAML: {e}") from e
    return parse_config(data)


def emit_config(cfg: ExperimentConfig) -> str:
    """Canonical YAML rendering; parse(emit(cfg)) reproduces cfg."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True,
                          default_flow_style=False)


def config_digest(cfg: ExperimentConfig) -> str:
    """sha256 over the canonicalized config bytes (sorted-key JSON)."""
    blob = json.dumps(cfg.to_dict(), sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
    return "sha256:" + hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class ResultRecord:
    """One experiment's output: column-ordered rows plus provenance."""

    experiment: str
    config: dict
    config_digest: str
    tool_version: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    generated_at: str

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "config_digest": self.config_digest,
            "tool_version": self.tool_version,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "generated_at": self.generated_at,
        }
