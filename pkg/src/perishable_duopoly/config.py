"""Flat INI-style run configuration and the run manifest.

Schema (every key optional; sections and keys outside it are errors)::

    [model]      n_products n_buyers tau0 tau1 h_c alpha n_sellers temperature greed
    [sim]        seed duration record_interval scheduler init_shelves
                 init_satisfaction update_rule burn_in
    [meanfield]  dt bias
    [sweep]      T_range g_range threshold          (ranges as LO:HI:COUNT)
    [output]     out csv json svg threads
    [meta]       free-form; written into manifests, ignored on input

A manifest is this same format with every value resolved, so parsing a
manifest reproduces the configuration that produced it.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import __version__
from .agents import SatisfactionInit, Scheduler, ShelfInit, SimConfig, UpdateRule
from .model import ModelParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GridRange:
    lo: float
    hi: float
    count: int

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.lo]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.count)]

    def __str__(self) -> str:
        return f"{self.lo!r}:{self.hi!r}:{self.count}"


def parse_range(text: str, key: str = "range") -> GridRange:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected LO:HI:COUNT, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{key}: expected LO:HI:COUNT, got {text!r}") from None
    if count < 1:
        raise ConfigError(f"{key}: COUNT must be >= 1, got {count}")
    if count > 1 and not hi > lo:
        raise ConfigError(f"{key}: range {lo}:{hi} is degenerate")
    return GridRange(lo, hi, count)


@dataclass(frozen=True)
class MeanFieldConfig:
    dt: float = 0.05
    bias: float = 1e-4


@dataclass(frozen=True)
class SweepConfig:
    T_range: GridRange | None = None
    g_range: GridRange | None = None
    threshold: float = 0.1


@dataclass(frozen=True)
class OutputConfig:
    out: str = "results"
    csv: bool = True
    json: bool = False
    svg: bool = False
    threads: int = 1


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    sim: SimConfig
    meanfield: MeanFieldConfig = field(default_factory=MeanFieldConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)


_INT_KEYS = {"n_products", "n_buyers", "n_sellers", "seed", "threads"}
_BOOL_KEYS = {"csv", "json", "svg"}
_STR_KEYS = {"scheduler", "init_shelves", "init_satisfaction", "update_rule", "out"}
_RANGE_KEYS = {"T_range", "g_range"}

SCHEMA: dict[str, tuple[str, ...]] = {
    "model": ("n_products", "n_buyers", "tau0", "tau1", "h_c", "alpha", "n_sellers",
              "temperature", "greed"),
    "sim": ("seed", "duration", "record_interval", "scheduler", "init_shelves",
            "init_satisfaction", "update_rule", "burn_in"),
    "meanfield": ("dt", "bias"),
    "sweep": ("T_range", "g_range", "threshold"),
    "output": ("out", "csv", "json", "svg", "threads"),
}
_SECTION_OF = {key: sec for sec, keys in SCHEMA.items() for key in keys}


def _convert(key: str, raw: Any) -> Any:
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _BOOL_KEYS:
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no", "on", "off"):
                raise ValueError
            return low in ("true", "1", "yes", "on")
        if key in _RANGE_KEYS:
            return parse_range(raw, key)
        if key in _STR_KEYS:
            return raw
        if key == "burn_in" and raw.lower() in ("", "none"):
            return None
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse value {raw!r}") from None


def _read_sections(text: str) -> dict[str, dict[str, Any]]:
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    values: dict[str, dict[str, Any]] = {sec: {} for sec in SCHEMA}
    for sec in parser.sections():
        if sec == "meta":
            continue
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]")
        for key, raw in parser.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in section [{sec}]")
            values[sec][key] = _convert(key, raw)
    return values


def _build(cls, key_values: Mapping[str, Any], section: str):
    try:
        return cls(**key_values)
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[{section}] {exc}") from None


def parse_config(text: str = "", overrides: Mapping[str, Any] | None = None,
                 require_point: bool = True) -> RunConfig:
    """Parse configuration text, apply flag ``overrides`` (flags win), validate.

    ``overrides`` maps bare key names (``temperature``, ``seed``, ``T_range``
    ...) to values; ``None`` values are ignored. With ``require_point`` the
    control parameters ``temperature`` and ``greed`` must be given somewhere;
    otherwise they default to 0.
    """
    values = _read_sections(text)
    for key, raw in (overrides or {}).items():
        if raw is None:
            continue
        if key not in _SECTION_OF:
            raise ConfigError(f"unknown key {key!r}")
        values[_SECTION_OF[key]][key] = _convert(key, raw)

    model = dict(values["model"])
    for key in ("temperature", "greed"):
        if key not in model:
            if require_point:
                raise ConfigError(f"{key} is required (config [model] {key} or --{'T' if key == 'temperature' else 'g'})")
            model[key] = 0.0
    sim = values["sim"]
    for key, enum_cls in (("scheduler", Scheduler), ("init_shelves", ShelfInit),
                          ("init_satisfaction", SatisfactionInit), ("update_rule", UpdateRule)):
        if key in sim:
            try:
                sim[key] = enum_cls(sim[key])
            except ValueError:
                allowed = "|".join(m.value for m in enum_cls)
                raise ConfigError(f"{key}: expected one of {allowed}, got {sim[key]!r}") from None
    output = values["output"]
    if "threads" in output and output["threads"] < 1:
        raise ConfigError(f"threads must be >= 1, got {output['threads']}")
    mf = values["meanfield"]
    if "dt" in mf and not mf["dt"] > 0:
        raise ConfigError(f"dt must be positive, got {mf['dt']}")
    sw = values["sweep"]
    if "threshold" in sw and not sw["threshold"] >= 0:
        raise ConfigError(f"threshold must be non-negative, got {sw['threshold']}")
    return RunConfig(
        model=_build(ModelParams, model, "model"),
        sim=_build(SimConfig, sim, "sim"),
        meanfield=_build(MeanFieldConfig, mf, "meanfield"),
        sweep=_build(SweepConfig, sw, "sweep"),
        output=_build(OutputConfig, output, "output"),
    )


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "value"):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def manifest_text(cfg: RunConfig, command: str | None = None) -> str:
    """Every resolved setting, in the configuration format, plus a [meta] block."""
    lines = ["[meta]", f"version = {__version__}"]
    if command:
        lines.append(f"command = {command}")
    parts = {"model": cfg.model, "sim": cfg.sim, "meanfield": cfg.meanfield,
             "sweep": cfg.sweep, "output": cfg.output}
    for sec, keys in SCHEMA.items():
        lines += ["", f"[{sec}]"]
        obj = parts[sec]
        for key in keys:
            value = getattr(obj, key)
            if value is None:
                continue
            lines.append(f"{key} = {_format(value)}")
    return "\n".join(lines) + "\n"


def replace_output(cfg: RunConfig, **changes) -> RunConfig:
    return dataclasses.replace(cfg, output=dataclasses.replace(cfg.output, **changes))
