"""Declarative experiment configuration: parsing, validation, serialization.

A single TOML file describes the grid, the propagator backend, the stage
chain, the sweep, and the output destination:

    [grid]
    n_points = 512
    window = 20.0

    [propagator]
    backend = "matrix_exponential"   # or "stepped_rk4"
    step = 1e-3                      # rk4 step size

    [[stages]]
    length = 3.0                     # soliton periods
    filter = { kind = "parabolic", loss = 0.1 }

    [sweep]
    stage_index = 0
    lengths = { start = 0.0, stop = 8.0, step = 0.25 }   # or an explicit list

    [output]
    path = "sweep.csv"
    format = "csv"                   # or "json"

Filters: {kind="parabolic", loss=...} calibrates the bandwidth on the
grid, {kind="parabolic", eta=...} fixes it directly, {kind="identity"},
and {kind="custom", table="file.csv"} loads sampled (omega, ReH, ImH)
rows, linearly interpolated onto the grid (zero outside the table).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import ConfigError

__all__ = [
    "FilterSpec",
    "StageEntry",
    "ExperimentConfig",
    "load_config",
    "parse_config",
    "dumps_toml",
    "config_hash",
]

_BACKENDS = ("matrix_exponential", "stepped_rk4")
_FORMATS = ("csv", "json")
_FILTER_KINDS = ("parabolic", "identity", "custom")


@dataclass(frozen=True)
class FilterSpec:
    kind: str
    loss: Optional[float] = None
    eta: Optional[float] = None
    table: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.loss is not None:
            out["loss"] = self.loss
        if self.eta is not None:
            out["eta"] = self.eta
        if self.table is not None:
            out["table"] = self.table
        return out


@dataclass(frozen=True)
class StageEntry:
    length: float
    filter: FilterSpec

    def to_dict(self) -> dict:
        return {"length": self.length, "filter": self.filter.to_dict()}


@dataclass(frozen=True)
class ExperimentConfig:
    n_points: int = 512
    window: float = 20.0
    backend: str = "matrix_exponential"
    step: float = 1e-3
    stages: tuple = field(default_factory=tuple)
    sweep_stage_index: int = 0
    sweep_lengths: tuple = field(default_factory=tuple)
    output_path: str = "sweep.csv"
    output_format: str = "csv"

    def to_dict(self) -> dict:
        return {
            "grid": {"n_points": self.n_points, "window": self.window},
            "propagator": {"backend": self.backend, "step": self.step},
            "stages": [s.to_dict() for s in self.stages],
            "sweep": {
                "stage_index": self.sweep_stage_index,
                "lengths": list(self.sweep_lengths),
            },
            "output": {"path": self.output_path, "format": self.output_format},
        }


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _parse_filter(raw) -> FilterSpec:
    _require(isinstance(raw, dict), "filter must be a table")
    kind = raw.get("kind")
    _require(kind in _FILTER_KINDS, f"filter kind must be one of {_FILTER_KINDS}, got {kind!r}")
    spec = FilterSpec(
        kind=kind,
        loss=raw.get("loss"),
        eta=raw.get("eta"),
        table=raw.get("table"),
    )
    if kind == "parabolic":
        _require(
            (spec.loss is None) != (spec.eta is None),
            "parabolic filter needs exactly one of 'loss' or 'eta'",
        )
        if spec.loss is not None:
            _require(0.0 < spec.loss < 1.0, "filter loss must lie in (0, 1)")
        if spec.eta is not None:
            _require(spec.eta > 0, "filter bandwidth must be positive")
    elif kind == "custom":
        _require(spec.table is not None, "custom filter needs a 'table' path")
    return spec


def _parse_lengths(raw) -> List[float]:
    if isinstance(raw, dict):
        for key in ("start", "stop", "step"):
            _require(key in raw, f"length range needs '{key}'")
        start, stop, step = float(raw["start"]), float(raw["stop"]), float(raw["step"])
        _require(step > 0, "length range step must be positive")
        _require(stop >= start, "length range must have stop >= start")
        n = int(np.floor((stop - start) / step + 0.5)) + 1
        values = [start + k * step for k in range(n)]
    elif isinstance(raw, list):
        values = [float(x) for x in raw]
    else:
        raise ConfigError("sweep lengths must be a list or a {start, stop, step} table")
    _require(len(values) > 0, "sweep lengths must be non-empty")
    _require(all(v >= 0 for v in values), "sweep lengths must be >= 0")
    return values


def parse_config(data: dict) -> ExperimentConfig:
    _require(isinstance(data, dict), "top-level config must be a table")
    known = {"grid", "propagator", "stages", "sweep", "output"}
    unknown = set(data) - known
    _require(not unknown, f"unknown config sections: {sorted(unknown)}")

    grid = data.get("grid", {})
    n_points = int(grid.get("n_points", 512))
    window = float(grid.get("window", 20.0))
    _require(n_points >= 8 and (n_points & (n_points - 1)) == 0, "grid.n_points must be a power of two >= 8")
    _require(window > 0, "grid.window must be positive")

    prop = data.get("propagator", {})
    backend = prop.get("backend", "matrix_exponential")
    _require(backend in _BACKENDS, f"propagator.backend must be one of {_BACKENDS}")
    step = float(prop.get("step", 1e-3))
    _require(step > 0, "propagator.step must be positive")

    raw_stages = data.get("stages", [])
    _require(isinstance(raw_stages, list) and len(raw_stages) >= 1, "config needs at least one [[stages]] entry")
    stages = []
    for k, raw in enumerate(raw_stages):
        _require(isinstance(raw, dict), f"stage {k} must be a table")
        _require("length" in raw, f"stage {k} needs a length (soliton periods)")
        length = float(raw["length"])
        _require(length >= 0, f"stage {k} length must be >= 0")
        stages.append(StageEntry(length, _parse_filter(raw.get("filter", {"kind": "identity"}))))

    sweep = data.get("sweep")
    if sweep is None:
        index, lengths = 0, [stages[0].length]
    else:
        index = int(sweep.get("stage_index", len(stages) - 1))
        _require(0 <= index < len(stages), f"sweep.stage_index {index} out of range for {len(stages)} stages")
        _require("lengths" in sweep, "sweep needs 'lengths'")
        lengths = _parse_lengths(sweep["lengths"])

    out = data.get("output", {})
    fmt = out.get("format", "csv")
    _require(fmt in _FORMATS, f"output.format must be one of {_FORMATS}")
    path = str(out.get("path", f"sweep.{fmt}"))

    return ExperimentConfig(
        n_points=n_points,
        window=window,
        backend=backend,
        step=step,
        stages=tuple(stages),
        sweep_stage_index=index,
        sweep_lengths=tuple(lengths),
        output_path=path,
        output_format=fmt,
    )


def load_config(path) -> ExperimentConfig:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = tomllib.loads(blob.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"config {path} is not valid TOML: {exc}") from exc
    return parse_config(data)


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)} to TOML")


def _toml_inline(table: dict) -> str:
    parts = [f"{k} = {_toml_scalar(v)}" for k, v in table.items()]
    return "{ " + ", ".join(parts) + " }"


def dumps_toml(config: ExperimentConfig) -> str:
    """Serialize to TOML; parse(dumps(c)) == c."""
    d = config.to_dict()
    lines = []
    lines.append("[grid]")
    lines.append(f"n_points = {_toml_scalar(d['grid']['n_points'])}")
    lines.append(f"window = {_toml_scalar(d['grid']['window'])}")
    lines.append("")
    lines.append("[propagator]")
    lines.append(f"backend = {_toml_scalar(d['propagator']['backend'])}")
    lines.append(f"step = {_toml_scalar(d['propagator']['step'])}")
    for stage in d["stages"]:
        lines.append("")
        lines.append("[[stages]]")
        lines.append(f"length = {_toml_scalar(stage['length'])}")
        lines.append(f"filter = {_toml_inline(stage['filter'])}")
    lines.append("")
    lines.append("[sweep]")
    lines.append(f"stage_index = {_toml_scalar(d['sweep']['stage_index'])}")
    lengths = ", ".join(_toml_scalar(v) for v in d["sweep"]["lengths"])
    lines.append(f"lengths = [{lengths}]")
    lines.append("")
    lines.append("[output]")
    lines.append(f"path = {_toml_scalar(d['output']['path'])}")
    lines.append(f"format = {_toml_scalar(d['output']['format'])}")
    lines.append("")
    return "\n".join(lines)


def config_hash(config: ExperimentConfig) -> str:
    """Stable short hash of the parsed configuration."""
    canonical = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
