"""Penalized efficiency fitness, external-solver protocol and surrogates.

The fitness to be minimized is ``1 - eta_avg + P`` where ``eta_avg`` is the
isentropic efficiency averaged over the last solver iterations and ``P`` the
sum of penalty terms. Any failed evaluation (non-converged run, infeasible
geometry) treats ``eta_avg`` as 0, so its fitness is at least 1.

External protocol
-----------------
For each candidate a fresh work directory receives

``blade.sec``
    the candidate geometry (see :mod:`bladeopt.blade_io`),
``params``
    JSON manifest with the search vector and decoded deformation.

The configured command is run as ``command... <workdir>`` and must exit
with status 0 after writing ``<workdir>/result``: whitespace-separated
columns ``p_total_in p_total_out t_total_in t_total_out``, one row per
solver iteration, ``#`` lines ignored. Efficiency is always recomputed
from these columns.
"""

from __future__ import annotations

import functools
import json
import logging
import math
import shutil
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from . import blade_io
from .geometry import BladeGeometry, check_feasibility

log = logging.getLogger(__name__)

RESULT_COLUMNS = ("p_total_in", "p_total_out", "t_total_in", "t_total_out")


class EvaluationError(RuntimeError):
    """An evaluation that could not produce an efficiency."""


@dataclass(frozen=True)
class FitnessConfig:
    gamma: float = 1.4
    averaging_window: int = 1000
    penalty_nonconverged: float = 0.5
    penalty_infeasible: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if self.averaging_window < 1:
            raise ValueError("averaging_window must be at least 1")
        if self.penalty_nonconverged < 0 or self.penalty_infeasible < 0:
            raise ValueError("penalties must be non-negative")


@dataclass(frozen=True, eq=False)
class FlowStationData:
    """Per-iteration mass-flow-averaged total pressures (Pa) and temperatures (K)."""

    p_total_inlet: np.ndarray
    p_total_outlet: np.ndarray
    t_total_inlet: np.ndarray
    t_total_outlet: np.ndarray

    def __post_init__(self):
        arrays = [np.atleast_1d(np.asarray(getattr(self, n), dtype=float)) for n in self._names()]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1 or arrays[0].size == 0:
            raise ValueError("station series must be non-empty 1-D arrays of equal length")
        for name, a in zip(self._names(), arrays):
            if not np.all(np.isfinite(a)) or np.any(a <= 0):
                raise ValueError(f"{name} must be finite and strictly positive")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @staticmethod
    def _names():
        return ("p_total_inlet", "p_total_outlet", "t_total_inlet", "t_total_outlet")

    def __len__(self):
        return self.p_total_inlet.size

    @classmethod
    def read(cls, path) -> "FlowStationData":
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 4:
            raise ValueError(f"{path}: expected 4 columns, found {data.shape[1]}")
        return cls(*data.T)

    def write(self, path) -> Path:
        path = Path(path)
        data = np.column_stack(
            [self.p_total_inlet, self.p_total_outlet, self.t_total_inlet, self.t_total_outlet]
        )
        np.savetxt(path, data, header=" ".join(RESULT_COLUMNS), fmt="%.17g")
        return path

    def efficiency_series(self, gamma: float = 1.4) -> np.ndarray:
        return isentropic_efficiency(
            self.p_total_inlet, self.p_total_outlet, self.t_total_inlet, self.t_total_outlet, gamma
        )


@dataclass(frozen=True, eq=False)
class FitnessReport:
    efficiency_series: tuple[float, ...]
    eta_avg: float
    penalties: Mapping[str, float]
    fitness: float
    converged: bool
    feasible: bool
    message: str = ""

    @property
    def penalty(self) -> float:
        return float(sum(self.penalties.values()))

    @property
    def ok(self) -> bool:
        return self.converged and self.feasible


def isentropic_efficiency(p_in, p_out, t_in, t_out, gamma: float = 1.4):
    """Compressor isentropic efficiency from total-pressure and -temperature ratios.

    ``((p_out/p_in)**((gamma-1)/gamma) - 1) / (t_out/t_in - 1)``; works
    element-wise on arrays.
    """
    p_in, p_out, t_in, t_out = (np.asarray(a, dtype=float) for a in (p_in, p_out, t_in, t_out))
    for a in (p_in, p_out, t_in, t_out):
        if np.any(~np.isfinite(a)) or np.any(a <= 0):
            raise ValueError("pressures and temperatures must be finite and positive")
    if not gamma > 1.0:
        raise ValueError("gamma must exceed 1")
    t_ratio = t_out / t_in
    if np.any(t_ratio == 1.0):
        raise EvaluationError("efficiency undefined: no total-temperature rise")
    eta = ((p_out / p_in) ** ((gamma - 1.0) / gamma) - 1.0) / (t_ratio - 1.0)
    return float(eta) if eta.ndim == 0 else eta


def average_efficiency(series: Sequence[float], window: int = 1000) -> float:
    """Mean of the final ``min(window, len(series))`` entries."""
    s = np.asarray(series, dtype=float)
    if s.size == 0:
        raise ValueError("efficiency series is empty")
    if window < 1:
        raise ValueError("window must be at least 1")
    return float(np.mean(s[-window:]))


def fitness(eta_avg: float, penalties: Sequence[float] | Mapping[str, float] = ()) -> float:
    """``1 - eta_avg + sum(penalties)``; lower is better."""
    if not math.isfinite(eta_avg):
        raise ValueError("eta_avg must be finite")
    values = penalties.values() if isinstance(penalties, Mapping) else penalties
    return 1.0 - eta_avg + float(sum(values))


def normalized_efficiency(eta: float, eta_baseline: float) -> float:
    if not eta_baseline > 0:
        raise ValueError("baseline efficiency must be positive")
    return eta / eta_baseline


def make_report(
    series: Sequence[float],
    config: FitnessConfig,
    converged: bool = True,
    feasible: bool = True,
    message: str = "",
) -> FitnessReport:
    penalties = {}
    if not feasible:
        penalties["infeasible"] = config.penalty_infeasible
    elif not converged:
        penalties["nonconverged"] = config.penalty_nonconverged
    series = tuple(float(v) for v in series)
    eta = average_efficiency(series, config.averaging_window) if (converged and feasible) else 0.0
    return FitnessReport(
        efficiency_series=series,
        eta_avg=eta,
        penalties=penalties,
        fitness=fitness(eta, penalties),
        converged=converged,
        feasible=feasible,
        message=message,
    )


def infeasible_report(config: FitnessConfig, message: str = "") -> FitnessReport:
    return make_report((), config, converged=False, feasible=False, message=message)


def failed_report(config: FitnessConfig, message: str) -> FitnessReport:
    return make_report((), config, converged=False, feasible=True, message=message)


# ---------------------------------------------------------------------------
# External solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExternalConfig:
    command: tuple[str, ...] = ()
    timeout: float = 6 * 3600.0
    result_name: str = "result"
    blade_name: str = "blade.sec"
    params_name: str = "params"

    def __post_init__(self):
        object.__setattr__(self, "command", tuple(str(c) for c in self.command))
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")


def evaluate_external(
    blade: BladeGeometry,
    manifest: Mapping,
    workdir,
    config: ExternalConfig,
    fitness_config: FitnessConfig = FitnessConfig(),
    min_thickness_fraction: float = 0.001,
) -> FitnessReport:
    """Evaluate one candidate blade with the external solver.

    Infeasible geometry is penalized without running the command. Timeouts,
    nonzero exits and missing or unreadable results are penalized as
    non-converged.
    """
    if not config.command:
        raise ValueError("no external command configured")
    violations = check_feasibility(blade, min_thickness_fraction)
    if violations:
        return infeasible_report(fitness_config, "; ".join(f"{v.kind}@{v.section}" for v in violations))

    workdir = Path(workdir)
    if workdir.exists():
        shutil.rmtree(workdir)
    workdir.mkdir(parents=True)
    blade_io.write_blade(blade, workdir / config.blade_name)
    (workdir / config.params_name).write_text(json.dumps(dict(manifest), indent=1, default=_jsonable))

    cmd = [*config.command, str(workdir)]
    try:
        with open(workdir / "solver.log", "w") as logf:
            proc = subprocess.run(
                cmd, stdout=logf, stderr=subprocess.STDOUT, timeout=config.timeout, check=False
            )
    except subprocess.TimeoutExpired:
        log.warning("solver timed out after %.0f s in %s", config.timeout, workdir)
        return failed_report(fitness_config, f"timeout after {config.timeout} s")
    except OSError as exc:
        return failed_report(fitness_config, f"could not start solver: {exc}")
    if proc.returncode != 0:
        return failed_report(fitness_config, f"solver exited with status {proc.returncode}")

    try:
        data = FlowStationData.read(workdir / config.result_name)
        series = data.efficiency_series(fitness_config.gamma)
    except (OSError, ValueError, EvaluationError) as exc:
        return failed_report(fitness_config, f"bad result file: {exc}")
    return make_report(series, fitness_config)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


# ---------------------------------------------------------------------------
# Surrogate landscape
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurrogateConfig:
    """Synthetic multi-modal efficiency landscape on the unit cube.

    ``eta(x) = base_peak - base_curvature * r2(x, anchor)
               + sum_k height_k * exp(-r2(x, c_k) / (2 width**2))``

    with ``r2(a, b) = |a - b|**2 / d`` (mean squared coordinate difference),
    which keeps the landscape's shape independent of the dimension. Anchor,
    centers and heights are drawn from ``seed`` unless given explicitly.
    """

    seed: int = 0
    n_bumps: int = 8
    bump_height: tuple[float, float] = (0.02, 0.05)
    bump_width: float = 0.1
    base_peak: float = 0.55
    base_curvature: float = 0.4
    anchor: Optional[tuple[float, ...]] = None
    centers: Optional[tuple[tuple[float, ...], ...]] = None
    heights: Optional[tuple[float, ...]] = None
    series_length: int = 100

    def __post_init__(self):
        if self.centers is not None:
            object.__setattr__(self, "centers", tuple(tuple(float(v) for v in c) for c in self.centers))
            if self.heights is None or len(self.heights) != len(self.centers):
                raise ValueError("explicit centers need one height each")
        if self.heights is not None:
            object.__setattr__(self, "heights", tuple(float(h) for h in self.heights))
        if self.anchor is not None:
            object.__setattr__(self, "anchor", tuple(float(v) for v in self.anchor))
        object.__setattr__(self, "bump_height", tuple(float(h) for h in self.bump_height))
        if not self.bump_width > 0 or self.series_length < 1 or self.n_bumps < 0:
            raise ValueError("invalid surrogate configuration")


class Surrogate:
    """Materialized landscape for one dimension."""

    def __init__(self, config: SurrogateConfig, dimension: int):
        self.config = config
        self.dimension = d = int(dimension)
        rng = np.random.Generator(np.random.Philox(config.seed))
        anchor = rng.uniform(0.35, 0.65, d)
        if config.centers is not None:
            centers = np.array(config.centers, dtype=float).reshape(-1, d)
            heights = np.array(config.heights, dtype=float)
        else:
            centers = rng.uniform(0.1, 0.9, (config.n_bumps, d))
            lo, hi = config.bump_height
            heights = rng.uniform(lo, hi, config.n_bumps)
        if config.anchor is not None:
            anchor = np.array(config.anchor, dtype=float)
        if anchor.shape != (d,):
            raise ValueError("anchor dimension mismatch")
        self.anchor, self.centers, self.heights = anchor, centers, heights
        lowest = config.base_peak - config.base_curvature
        highest = config.base_peak + float(np.sum(np.clip(heights, 0, None)))
        if not (lowest > 0.0 and highest < 1.0):
            raise ValueError(f"surrogate efficiency range ({lowest}, {highest}) leaves (0, 1)")

    def base(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return self.config.base_peak - self.config.base_curvature * float(
            np.mean((x - self.anchor) ** 2)
        )

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        r2 = np.mean((self.centers - x) ** 2, axis=1) if len(self.centers) else np.zeros(0)
        bumps = float(np.sum(self.heights * np.exp(-r2 / (2 * self.config.bump_width**2))))
        return self.base(x) + bumps


def two_basin_surrogate(
    n_hh: int,
    offset: float = 0.25,
    height: float = 0.2,
    width: float = 0.1,
    base_peak: float = 0.55,
    base_curvature: float = 0.3,
    series_length: int = 100,
) -> SurrogateConfig:
    """Landscape with two equal bumps mirrored about the identity point.

    The bump centers are ``0.5 +/- offset`` on the rotation and shift
    components of every control section and 0.5 elsewhere; the smooth base
    is centered on the identity point. Both optima therefore have the same
    efficiency but correspond to clearly different blades.
    """
    from .geometry import search_dimension

    d = search_dimension(n_hh)
    block = n_hh + 3
    u = np.zeros(d)
    for k in range(3):
        u[k * block + n_hh : (k + 1) * block] = 1.0
    return SurrogateConfig(
        n_bumps=2,
        bump_width=width,
        base_peak=base_peak,
        base_curvature=base_curvature,
        anchor=(0.5,) * d,
        centers=(tuple(0.5 + offset * u), tuple(0.5 - offset * u)),
        heights=(height, height),
        series_length=series_length,
    )


@functools.lru_cache(maxsize=64)
def get_surrogate(config: SurrogateConfig, dimension: int) -> Surrogate:
    return Surrogate(config, dimension)


def evaluate_surrogate(
    vector, config: SurrogateConfig, fitness_config: FitnessConfig = FitnessConfig()
) -> FitnessReport:
    """Fitness report from the synthetic landscape; a pure function of its inputs."""
    x = np.asarray(vector, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise ValueError("surrogate input must be a finite vector in [0, 1]^d")
    eta = get_surrogate(config, x.size)(x)
    return make_report((eta,) * config.series_length, fitness_config)


# ---------------------------------------------------------------------------
# Benchmarks
# ---------------------------------------------------------------------------

_BOXES = {
    "sphere": (-5.12, 5.12),
    "rastrigin": (-5.12, 5.12),
    "rosenbrock": (-2.048, 2.048),
}


def map_to_box(name: str, vector) -> np.ndarray:
    lo, hi = _BOXES[name]
    return lo + (hi - lo) * np.asarray(vector, dtype=float)


def benchmark_function(name: str, vector) -> float:
    """Standard test function evaluated on ``vector`` mapped from ``[0, 1]^d``."""
    if name not in _BOXES:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(_BOXES)}")
    u = np.asarray(vector, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("benchmark input must be finite")
    x = map_to_box(name, u)
    if name == "sphere":
        return float(np.sum(x**2))
    if name == "rastrigin":
        return float(10 * x.size + np.sum(x**2 - 10 * np.cos(2 * np.pi * x)))
    return float(np.sum(100 * (x[1:] - x[:-1] ** 2) ** 2 + (1 - x[:-1]) ** 2))
