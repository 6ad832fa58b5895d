"""Experiment configuration: dataclass schema, YAML files and overrides.

A configuration file is a YAML mapping with ``version: 1`` and any subset of
the fields of :class:`ExperimentConfig`; nested sections mirror the nested
dataclasses. Unknown keys are errors. ``optimizer.dimension`` may be left
out, in which case it is derived from ``n_hh``.

Example::

    version: 1
    name: cma-nhh9
    n_hh: 9
    optimizer: {kind: cma-es, seed: 1, cma: {lam: 12, mu: 4, sigma0: 0.05}}
    evaluator: {kind: surrogate, surrogate: {seed: 0, n_bumps: 8}}
    budget: {max_generations: 120}
    max_parallel: 4
    output_dir: runs/cma-nhh9
"""

from __future__ import annotations

import copy
import dataclasses
import typing
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .evaluation import ExternalConfig, FitnessConfig, SurrogateConfig
from .geometry import BaselineConfig, search_dimension
from .optimizers import OptimizerConfig

CONFIG_VERSION = 1
EVALUATOR_KINDS = ("surrogate", "external", "benchmark")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class EvaluatorConfig:
    kind: str = "surrogate"
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    external: ExternalConfig = field(default_factory=ExternalConfig)
    benchmark: str = "sphere"


@dataclass
class SearchConfig:
    """Physical bounds behind the unit search cube, relative to local chord."""

    amplitude_fraction: float = 0.02
    rotation_bound_deg: float = 5.0
    shift_fraction: float = 0.05
    min_thickness_fraction: float = 0.001


@dataclass
class BaselineSource:
    kind: str = "synthetic"  # or "file"
    path: Optional[str] = None
    synthetic: BaselineConfig = field(default_factory=BaselineConfig)


@dataclass
class Budget:
    """Fixed budget. ``max_evaluations`` includes the baseline evaluation."""

    max_generations: Optional[int] = None
    max_evaluations: Optional[int] = None


@dataclass
class ExperimentConfig:
    name: str = "run"
    n_hh: int = 9
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    evaluator: EvaluatorConfig = field(default_factory=EvaluatorConfig)
    fitness: FitnessConfig = field(default_factory=FitnessConfig)
    search: SearchConfig = field(default_factory=SearchConfig)
    baseline: BaselineSource = field(default_factory=BaselineSource)
    budget: Budget = field(default_factory=lambda: Budget(max_generations=10))
    max_parallel: int = 1
    fail_generations: int = 5
    output_dir: str = "runs/run"

    @property
    def search_dimension(self) -> int:
        return search_dimension(self.n_hh)

    def generations(self) -> int:
        """Number of generations the budget allows."""
        lam = self.optimizer.population
        limits = []
        if self.budget.max_generations is not None:
            limits.append(self.budget.max_generations)
        if self.budget.max_evaluations is not None:
            limits.append((self.budget.max_evaluations - 1) // lam)
        return min(limits)

    def validate(self) -> "ExperimentConfig":
        try:
            dim = search_dimension(self.n_hh)
            self.optimizer.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.optimizer.dimension != dim:
            raise ConfigError(
                f"optimizer.dimension={self.optimizer.dimension} but n_hh={self.n_hh} "
                f"implies 3*(n_hh+3)={dim}"
            )
        if self.evaluator.kind not in EVALUATOR_KINDS:
            raise ConfigError(f"evaluator.kind must be one of {EVALUATOR_KINDS}")
        if self.evaluator.kind == "surrogate":
            from .evaluation import get_surrogate

            try:
                get_surrogate(self.evaluator.surrogate, dim)
            except ValueError as exc:
                raise ConfigError(f"evaluator.surrogate: {exc}") from exc
        if self.evaluator.kind == "external" and not self.evaluator.external.command:
            raise ConfigError("external evaluator needs evaluator.external.command")
        if self.baseline.kind not in ("synthetic", "file"):
            raise ConfigError("baseline.kind must be 'synthetic' or 'file'")
        if self.baseline.kind == "file" and not self.baseline.path:
            raise ConfigError("baseline.path is required for a file baseline")
        if self.budget.max_generations is None and self.budget.max_evaluations is None:
            raise ConfigError("budget needs max_generations and/or max_evaluations")
        if self.generations() < 1:
            raise ConfigError("budget allows no generation")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be at least 1")
        if self.fail_generations < 1:
            raise ConfigError("fail_generations must be at least 1")
        return self

    def to_dict(self) -> dict:
        return {"version": CONFIG_VERSION, **_plain(asdict(self))}

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(copy.deepcopy(self), **changes)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _deep_tuple(v):
    if isinstance(v, list):
        return tuple(_deep_tuple(x) for x in v)
    return v


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected a mapping, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(_join(path, k) for k in unknown)}")
    kwargs = {}
    for key, value in data.items():
        hint = hints[key]
        if dataclasses.is_dataclass(hint):
            kwargs[key] = _build(hint, value, _join(path, key))
        elif "tuple" in str(hint).lower():
            kwargs[key] = _deep_tuple(value) if value is not None else None
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path or 'config'}: {exc}") from exc


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def config_from_dict(data: dict) -> ExperimentConfig:
    data = copy.deepcopy(data)
    version = data.pop("version", None)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version!r} (expected {CONFIG_VERSION})")
    opt = data.setdefault("optimizer", {})
    if isinstance(opt, dict) and "dimension" not in opt:
        opt["dimension"] = search_dimension(data.get("n_hh", ExperimentConfig.n_hh))
    return _build(ExperimentConfig, data, "").validate()


def check_key(key: str):
    """Raise ConfigError unless the dotted ``key`` names a schema field."""
    cls = ExperimentConfig
    parts = key.split(".")
    for i, part in enumerate(parts):
        if part == "version" and i == 0 and len(parts) == 1:
            return
        if cls is None or not dataclasses.is_dataclass(cls):
            raise ConfigError(f"unknown config key: {key}")
        hints = typing.get_type_hints(cls)
        if part not in hints:
            raise ConfigError(f"unknown config key: {key}")
        hint = hints[part]
        cls = hint if dataclasses.is_dataclass(hint) else None
    if cls is not None:
        raise ConfigError(f"override key {key} names a section, not a value")


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``dotted.key=value`` strings; values are parsed as YAML scalars."""
    data = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        key = key.strip()
        check_key(key)
        value = yaml.safe_load(raw)
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
        if key == "n_hh" and "dimension" in data.get("optimizer", {}):
            data["optimizer"]["dimension"] = search_dimension(value)
    return data


def load_config(path, overrides=()) -> ExperimentConfig:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(apply_overrides(data, overrides))


def save_config(config: ExperimentConfig, path) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(config.to_dict(), sort_keys=False))
    return path
