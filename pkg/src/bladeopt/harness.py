"""Optimization runs, sweeps, checkpoints and run records.

Run directory layout (all text, stable for :mod:`bladeopt.analysis`)::

    config.yaml        configuration snapshot (version 1)
    candidates.jsonl   one JSON object per evaluated candidate, append-only:
                       generation, index, vector, fitness, eta_avg, penalty,
                       converged, feasible, message
    timings.jsonl      wall-clock seconds per candidate (generation, index, wall_time)
    checkpoint.json    optimizer + harness state after the last full generation
    summary.json       baseline, incumbent series, best candidate, status
    best_blade.sec     geometry of the best candidate

``candidates.jsonl`` and ``summary.json`` contain no timing data, so two runs
with the same configuration produce byte-identical files.
"""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import yaml

from . import blade_io
from .config import ConfigError, ExperimentConfig, config_from_dict, save_config
from .evaluation import (
    benchmark_function,
    evaluate_external,
    evaluate_surrogate,
    infeasible_report,
)
from .geometry import (
    BladeGeometry,
    SearchSpace,
    build_blade,
    check_feasibility,
    decode,
    synthetic_baseline,
)
from .optimizers import RNG_ALGORITHM, init, optimizer_from_state

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


class EvaluatorFailure(RuntimeError):
    """Every candidate failed for ``fail_generations`` consecutive generations."""


class SweepError(RuntimeError):
    def __init__(self, records, failures):
        self.records = records
        self.failures = failures
        lines = [f"{value!r}: {exc}" for value, exc in failures]
        super().__init__(f"{len(failures)} sweep run(s) failed: " + "; ".join(lines))


@dataclass
class Outcome:
    fitness: float
    eta_avg: Optional[float]
    penalty: float
    converged: bool
    feasible: bool
    message: str = ""


@dataclass
class CandidateRow:
    generation: int
    index: int
    vector: list
    fitness: float
    eta_avg: Optional[float]
    penalty: float
    converged: bool
    feasible: bool
    message: str = ""
    wall_time: float = 0.0

    def record_json(self) -> str:
        d = asdict(self)
        d.pop("wall_time")
        return json.dumps(d, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str, wall_time: float = 0.0) -> "CandidateRow":
        return cls(**json.loads(line), wall_time=wall_time)


@dataclass
class RunRecord:
    config: dict
    rows: list[CandidateRow] = field(default_factory=list)
    incumbents: list[float] = field(default_factory=list)
    baseline_fitness: Optional[float] = None
    baseline_eta: Optional[float] = None
    status: str = "running"
    rng_algorithm: str = RNG_ALGORITHM
    run_dir: Optional[str] = None

    @property
    def population(self) -> int:
        opt = self.config["optimizer"]
        return opt["cma"]["lam"] if opt["kind"] == "cma-es" else opt["pso"]["particles"]

    @property
    def generations(self) -> int:
        return len(self.incumbents)

    @property
    def evaluations(self) -> int:
        """Total evaluations including the baseline."""
        return 1 + len(self.rows)

    @property
    def seed(self) -> int:
        return self.config["optimizer"]["seed"]

    def experiment_config(self) -> ExperimentConfig:
        return config_from_dict(self.config)

    def best_row(self) -> CandidateRow:
        if not self.rows:
            raise ValueError("record has no candidates")
        return min(self.rows, key=lambda r: (r.fitness, r.generation, r.index))

    @property
    def best_fitness(self) -> float:
        return self.best_row().fitness

    @property
    def best_vector(self) -> np.ndarray:
        return np.array(self.best_row().vector)

    def best_normalized_efficiency(self) -> Optional[float]:
        row = self.best_row()
        if row.eta_avg is None or not self.baseline_eta:
            return None
        return row.eta_avg / self.baseline_eta

    def summary(self) -> dict:
        best = self.best_row() if self.rows else None
        return {
            "name": self.config.get("name"),
            "status": self.status,
            "rng_algorithm": self.rng_algorithm,
            "seed": self.seed,
            "population": self.population,
            "generations": self.generations,
            "evaluations": self.evaluations,
            "baseline": {"fitness": self.baseline_fitness, "eta_avg": self.baseline_eta},
            "incumbents": self.incumbents,
            "best": None
            if best is None
            else {
                "generation": best.generation,
                "index": best.index,
                "fitness": best.fitness,
                "eta_avg": best.eta_avg,
                "normalized_efficiency": self.best_normalized_efficiency(),
                "vector": best.vector,
            },
        }


# ---------------------------------------------------------------------------
# Evaluation plumbing
# ---------------------------------------------------------------------------


def load_baseline(config: ExperimentConfig) -> BladeGeometry:
    if config.baseline.kind == "file":
        return blade_io.read_blade(config.baseline.path)
    return synthetic_baseline(config.baseline.synthetic)


def search_space(config: ExperimentConfig, baseline: BladeGeometry) -> SearchSpace:
    s = config.search
    return SearchSpace.for_blade(
        baseline, config.n_hh, s.amplitude_fraction, s.rotation_bound_deg, s.shift_fraction
    )


def blade_for_vector(config: ExperimentConfig, vector, baseline=None) -> BladeGeometry:
    baseline = baseline if baseline is not None else load_baseline(config)
    return build_blade(baseline, decode(vector, search_space(config, baseline)))


class CandidateEvaluator:
    """Maps a search vector to an :class:`Outcome` using the configured evaluator."""

    def __init__(self, config: ExperimentConfig, run_dir: Optional[Path] = None):
        self.config = config
        self.kind = config.evaluator.kind
        self.run_dir = Path(run_dir) if run_dir is not None else None
        self.baseline = load_baseline(config)
        self.space = search_space(config, self.baseline)

    def __call__(self, vector, tag: str) -> Outcome:
        cfg = self.config
        if self.kind == "benchmark":
            value = benchmark_function(cfg.evaluator.benchmark, vector)
            return Outcome(value, None, 0.0, True, True)
        params = decode(vector, self.space)
        blade = build_blade(self.baseline, params)
        if self.kind == "surrogate":
            violations = check_feasibility(blade, cfg.search.min_thickness_fraction)
            if violations:
                report = infeasible_report(cfg.fitness, f"{len(violations)} violation(s)")
            else:
                report = evaluate_surrogate(vector, cfg.evaluator.surrogate, cfg.fitness)
        else:
            manifest = {
                "tag": tag,
                "n_hh": cfg.n_hh,
                "vector": list(map(float, vector)),
                "deformation": params.flatten().tolist(),
            }
            root = self.run_dir if self.run_dir is not None else Path(cfg.output_dir)
            report = evaluate_external(
                blade,
                manifest,
                root / "evaluations" / tag,
                cfg.evaluator.external,
                cfg.fitness,
                cfg.search.min_thickness_fraction,
            )
        return Outcome(
            report.fitness,
            report.eta_avg,
            report.penalty,
            report.converged,
            report.feasible,
            report.message,
        )

    def baseline_key(self) -> str:
        """Cache key under which baseline evaluations may be shared."""
        cfg = self.config
        if self.kind == "benchmark":
            parts = ["benchmark", cfg.evaluator.benchmark, cfg.search_dimension]
        elif self.kind == "surrogate":
            parts = ["surrogate", asdict(cfg.evaluator.surrogate), cfg.search_dimension,
                     asdict(cfg.fitness), asdict(cfg.baseline), cfg.search.min_thickness_fraction]
        else:
            # identity geometry does not depend on n_hh or the search bounds
            parts = ["external", asdict(cfg.evaluator.external), asdict(cfg.fitness),
                     asdict(cfg.baseline), cfg.search.min_thickness_fraction]
        return json.dumps(parts, sort_keys=True, default=str)


# ---------------------------------------------------------------------------
# Run
# ---------------------------------------------------------------------------


def _write_json_atomic(path: Path, data):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=1))
    os.replace(tmp, path)


def _truncate_lines(path: Path, n: int) -> list[str]:
    lines = path.read_text().splitlines() if path.exists() else []
    if len(lines) < n:
        raise ValueError(f"{path} has {len(lines)} rows, checkpoint expects {n}")
    lines = lines[:n]
    path.write_text("".join(line + "\n" for line in lines))
    return lines


def run(
    config: ExperimentConfig,
    *,
    stop_after: Optional[int] = None,
    baseline_cache: Optional[dict] = None,
    evaluator: Optional[Callable] = None,
) -> RunRecord:
    """Run one optimization from scratch into ``config.output_dir``.

    ``stop_after`` ends the run early after that many generations (the
    checkpoint allows :func:`resume` to finish it). ``evaluator`` replaces
    the configured evaluator; it is called as ``evaluator(vector, tag)`` and
    must return an :class:`Outcome`.
    """
    config.validate()
    run_dir = Path(config.output_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    for name in ("candidates.jsonl", "timings.jsonl", "checkpoint.json", "summary.json"):
        (run_dir / name).unlink(missing_ok=True)
    save_config(config, run_dir / "config.yaml")

    cand_eval = CandidateEvaluator(config, run_dir)
    evaluate = evaluator or cand_eval
    record = RunRecord(config=config.to_dict(), run_dir=str(run_dir))

    key = cand_eval.baseline_key()
    if baseline_cache is not None and key in baseline_cache:
        base = baseline_cache[key]
    else:
        base = evaluate(cand_eval.space.identity_vector(), "baseline")
        if baseline_cache is not None:
            baseline_cache[key] = base
    record.baseline_fitness = base.fitness
    if base.converged and base.feasible:
        record.baseline_eta = base.eta_avg
    else:
        # the run goes on; persistent failure is caught by fail_generations
        log.warning("baseline evaluation failed (%s); normalized efficiency undefined", base.message)

    optimizer = init(config.optimizer)
    state = {"consecutive_failures": 0}
    return _loop(config, record, optimizer, evaluate, cand_eval, run_dir, state, stop_after)


def resume(run_dir, *, stop_after: Optional[int] = None, evaluator=None) -> RunRecord:
    """Continue an interrupted run from its last checkpoint."""
    run_dir = Path(run_dir)
    config = config_from_dict(yaml.safe_load((run_dir / "config.yaml").read_text()))
    config = config.replace(output_dir=str(run_dir))
    ckpt = json.loads((run_dir / "checkpoint.json").read_text())
    if ckpt.get("version") != CHECKPOINT_VERSION:
        raise ConfigError(f"unsupported checkpoint version {ckpt.get('version')!r}")

    n = ckpt["rows"]
    cand_lines = _truncate_lines(run_dir / "candidates.jsonl", n)
    time_lines = (run_dir / "timings.jsonl").read_text().splitlines()[:n] if (
        run_dir / "timings.jsonl"
    ).exists() else []
    (run_dir / "timings.jsonl").write_text("".join(t + "\n" for t in time_lines))
    times = [json.loads(t)["wall_time"] for t in time_lines] + [0.0] * (n - len(time_lines))
    record = RunRecord(
        config=config.to_dict(),
        rows=[CandidateRow.from_json(line, t) for line, t in zip(cand_lines, times)],
        incumbents=list(ckpt["incumbents"]),
        baseline_fitness=ckpt["baseline"]["fitness"],
        baseline_eta=ckpt["baseline"]["eta_avg"],
        run_dir=str(run_dir),
    )
    optimizer = optimizer_from_state(ckpt["optimizer"])
    cand_eval = CandidateEvaluator(config, run_dir)
    state = {"consecutive_failures": ckpt["consecutive_failures"]}
    return _loop(config, record, optimizer, evaluator or cand_eval, cand_eval, run_dir, state, stop_after)


def _loop(config, record, optimizer, evaluate, cand_eval, run_dir, state, stop_after):
    total = config.generations()
    start_gen = optimizer.generation
    cand_path = run_dir / "candidates.jsonl"
    time_path = run_dir / "timings.jsonl"

    def timed(args):
        vector, tag = args
        t0 = time.perf_counter()
        out = evaluate(vector, tag)
        return out, time.perf_counter() - t0

    with ThreadPoolExecutor(max_workers=config.max_parallel) as pool:
        for gen in range(start_gen, total):
            if stop_after is not None and gen >= stop_after:
                record.status = "interrupted"
                break
            X = optimizer.ask()
            tags = [f"g{gen:04d}_c{k:03d}" for k in range(len(X))]
            # map() yields in submission order whatever the completion order
            results = list(pool.map(timed, zip(X, tags)))
            rows = [
                CandidateRow(gen, k, x.tolist(), o.fitness, o.eta_avg, o.penalty,
                             o.converged, o.feasible, o.message, wall)
                for k, (x, (o, wall)) in enumerate(zip(X, results))
            ]
            _, best_f = optimizer.tell([r.fitness for r in rows])
            record.rows.extend(rows)
            record.incumbents.append(best_f)
            with open(cand_path, "a") as fh:
                fh.writelines(r.record_json() + "\n" for r in rows)
            with open(time_path, "a") as fh:
                fh.writelines(
                    json.dumps({"generation": r.generation, "index": r.index, "wall_time": r.wall_time})
                    + "\n"
                    for r in rows
                )
            if all(r.penalty > 0 for r in rows):
                state["consecutive_failures"] += 1
            else:
                state["consecutive_failures"] = 0
            _write_checkpoint(run_dir, record, optimizer, state)
            log.info("generation %d: best %.6g (incumbent %.6g)", gen, min(r.fitness for r in rows), best_f)
            if state["consecutive_failures"] >= config.fail_generations:
                record.status = "aborted"
                _finish(run_dir, record, cand_eval)
                last = "; ".join(sorted({r.message for r in rows}))
                raise EvaluatorFailure(
                    f"every candidate failed for {state['consecutive_failures']} consecutive "
                    f"generations (last messages: {last})"
                )
        else:
            record.status = "complete"
    _finish(run_dir, record, cand_eval)
    return record


def _write_checkpoint(run_dir: Path, record: RunRecord, optimizer, state: dict):
    _write_json_atomic(
        run_dir / "checkpoint.json",
        {
            "version": CHECKPOINT_VERSION,
            "rows": len(record.rows),
            "incumbents": record.incumbents,
            "baseline": {"fitness": record.baseline_fitness, "eta_avg": record.baseline_eta},
            "consecutive_failures": state["consecutive_failures"],
            "optimizer": optimizer.state_dict(),
        },
    )


def _finish(run_dir: Path, record: RunRecord, cand_eval: CandidateEvaluator):
    _write_json_atomic(run_dir / "summary.json", record.summary())
    if record.rows:
        blade = build_blade(cand_eval.baseline, decode(record.best_vector, cand_eval.space))
        blade_io.write_blade(blade, run_dir / "best_blade.sec")


def load_record(run_dir) -> RunRecord:
    """Rebuild a :class:`RunRecord` from a run directory."""
    run_dir = Path(run_dir)
    config = yaml.safe_load((run_dir / "config.yaml").read_text())
    summary = json.loads((run_dir / "summary.json").read_text())
    lines = (run_dir / "candidates.jsonl").read_text().splitlines()
    times = {}
    if (run_dir / "timings.jsonl").exists():
        for t in (run_dir / "timings.jsonl").read_text().splitlines():
            d = json.loads(t)
            times[(d["generation"], d["index"])] = d["wall_time"]
    rows = []
    for line in lines:
        row = CandidateRow.from_json(line)
        row.wall_time = times.get((row.generation, row.index), 0.0)
        rows.append(row)
    return RunRecord(
        config=config,
        rows=rows,
        incumbents=summary["incumbents"],
        baseline_fitness=summary["baseline"]["fitness"],
        baseline_eta=summary["baseline"]["eta_avg"],
        status=summary["status"],
        rng_algorithm=summary["rng_algorithm"],
        run_dir=str(run_dir),
    )


# ---------------------------------------------------------------------------
# Sweeps and series
# ---------------------------------------------------------------------------

SWEEP_AXES = ("seed", "lambda", "n_hh")


def sweep_config(base: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    cfg = base.replace()
    if axis == "seed":
        cfg.optimizer.seed = int(value)
    elif axis == "lambda":
        if cfg.optimizer.kind == "cma-es":
            cfg.optimizer.cma.lam = int(value)
        else:
            cfg.optimizer.pso.particles = int(value)
    elif axis == "n_hh":
        cfg.n_hh = int(value)
        cfg.optimizer.dimension = cfg.search_dimension
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    cfg.name = f"{base.name}-{axis}{value}"
    cfg.output_dir = str(Path(base.output_dir) / f"{axis}-{value}")
    return cfg.validate()


def sweep(base: ExperimentConfig, axis: str, values: Sequence, **run_kwargs) -> list[RunRecord]:
    """Independent runs, one per value of ``axis``.

    A failing run does not stop its siblings; failures are raised together
    as :class:`SweepError` once every run has finished.
    """
    if not values:
        raise ConfigError("sweep needs at least one value")
    configs = [sweep_config(base, axis, v) for v in values]
    cache = run_kwargs.pop("baseline_cache", {})
    records, failures = [], []
    for value, cfg in zip(values, configs):
        try:
            records.append(run(cfg, baseline_cache=cache, **run_kwargs))
        except Exception as exc:  # noqa: BLE001 - reported collectively below
            log.error("sweep run %s=%s failed: %s", axis, value, exc)
            failures.append((value, exc))
    if failures:
        raise SweepError(records, failures)
    return records


@dataclass
class BestSoFar:
    generations: np.ndarray
    per_generation: np.ndarray
    evaluations: np.ndarray
    per_evaluation: np.ndarray


def best_so_far(record: RunRecord) -> BestSoFar:
    """Incumbent fitness by generation and by cumulative candidate evaluation.

    The baseline evaluation is not part of either series; the evaluation
    axis counts optimizer candidates 1..N.
    """
    if not record.rows:
        raise ValueError("record has no candidates")
    f = np.array([r.fitness for r in record.rows])
    gens = np.array([r.generation for r in record.rows])
    per_eval = np.minimum.accumulate(f)
    ug = np.unique(gens)
    per_gen = np.array([per_eval[np.nonzero(gens == g)[0][-1]] for g in ug])
    return BestSoFar(ug, per_gen, np.arange(1, f.size + 1), per_eval)
