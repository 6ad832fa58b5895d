"""Convergence tables, cross-run comparison and geometry-difference export.

Tables are tab-separated text with a single header row. The geometry
difference is written as legacy ASCII VTK polydata: the lofted reference
surface as quads, with the signed normal displacement as point scalars.
Open it in ParaView or VisIt and apply a diverging colormap centered on
zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import blade_io
from .geometry import (
    BladeGeometry,
    GeometryError,
    build_blade,
    decode,
    encode,
    geometry_diff,
    geometry_distance,
)
from .harness import RunRecord, best_so_far, load_baseline, search_space


def _run_labels(records: Sequence[RunRecord]) -> list[str]:
    labels, seen = [], {}
    for r in records:
        name = str(r.config.get("name") or "run")
        seen[name] = seen.get(name, 0) + 1
        labels.append(name if seen[name] == 1 else f"{name}#{seen[name]}")
    return labels


def _fmt(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_table(path: Path, header: Sequence[str], rows) -> Path:
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")
    return path


def read_table(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    return lines[0].split("\t"), [ln.split("\t") for ln in lines[1:]]


def convergence_export(records: Sequence[RunRecord], out_dir, axis: str = "generation") -> dict:
    """Write ``scatter.tsv`` and ``incumbent_<axis>.tsv`` for plotting.

    The scatter table has one row per evaluated candidate; the incumbent
    table one row per generation (``axis="generation"``) or per candidate
    evaluation (``axis="evaluation"``). Normalized efficiencies divide by
    each run's baseline efficiency.
    """
    if axis not in ("generation", "evaluation"):
        raise ValueError("axis must be 'generation' or 'evaluation'")
    if not records:
        raise ValueError("no records to export")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    scatter, incumbent = [], []
    for label, rec in zip(_run_labels(records), records):
        series = best_so_far(rec)
        base = rec.baseline_eta
        for n, (row, inc) in enumerate(zip(rec.rows, series.per_evaluation), start=1):
            norm = row.eta_avg / base if (row.eta_avg is not None and base) else None
            scatter.append((label, row.generation, n, row.index, row.fitness, row.eta_avg, norm, inc))
        if axis == "generation":
            incumbent += [(label, int(g), f) for g, f in zip(series.generations, series.per_generation)]
        else:
            incumbent += [(label, int(e), f) for e, f in zip(series.evaluations, series.per_evaluation)]

    paths = {
        "scatter": _write_table(
            out / "scatter.tsv",
            ["run", "generation", "evaluation", "index", "fitness", "eta_avg", "eta_normalized", "incumbent"],
            scatter,
        ),
        "incumbent": _write_table(out / f"incumbent_{axis}.tsv", ["run", axis, "incumbent"], incumbent),
    }
    return paths


@dataclass
class ComparisonSummary:
    labels: list[str]
    best_fitness: np.ndarray
    best_normalized_efficiency: list[Optional[float]]
    distance: np.ndarray
    fitness_spread: float
    min_distance: float
    max_distance: float
    eps_f: float
    delta_g: float
    multimodal: bool

    def to_dict(self) -> dict:
        return {
            "runs": self.labels,
            "best_fitness": self.best_fitness.tolist(),
            "best_normalized_efficiency": self.best_normalized_efficiency,
            "distance_matrix": self.distance.tolist(),
            "fitness_spread": self.fitness_spread,
            "min_distance": self.min_distance,
            "max_distance": self.max_distance,
            "eps_f": self.eps_f,
            "delta_g": self.delta_g,
            "multimodal": self.multimodal,
        }


def final_blade(record: RunRecord) -> BladeGeometry:
    cfg = record.experiment_config()
    baseline = load_baseline(cfg)
    return build_blade(baseline, decode(record.best_vector, search_space(cfg, baseline)))


def roundtrip_noise(record: RunRecord) -> float:
    """Distance between the best blade and its encode/decode round trip."""
    cfg = record.experiment_config()
    baseline = load_baseline(cfg)
    space = search_space(cfg, baseline)
    params = decode(record.best_vector, space)
    again = decode(encode(params, space), space)
    return geometry_distance(build_blade(baseline, params), build_blade(baseline, again))


def relative_spread(values) -> float:
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return 0.0
    return (hi - lo) / lo if lo > 0 else math.inf


def compare_runs(
    records: Sequence[RunRecord], eps_f: float = 0.01, delta_g: Optional[float] = None
) -> ComparisonSummary:
    """Compare final fitness and geometry across runs.

    The multimodality flag is set when best fitnesses agree to within a
    relative spread ``eps_f`` while every pair of final blades is further
    apart than ``delta_g``. By default ``delta_g`` is ten times the largest
    geometry round-trip noise of the runs, floored at a few ulps of the
    blade coordinates.
    """
    if len(records) < 2:
        raise ValueError("need at least two records to compare")
    blades = [final_blade(r) for r in records]
    for b in blades[1:]:
        if not b.same_topology(blades[0]):
            raise GeometryError("final blades have different topology")
    n = len(blades)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = geometry_distance(blades[i], blades[j])
    if delta_g is None:
        scale = max(float(np.max(np.abs(b.point_array()))) for b in blades)
        noise = max(roundtrip_noise(r) for r in records)
        delta_g = 10.0 * max(noise, 4 * np.finfo(float).eps * scale)
    best = np.array([r.best_fitness for r in records])
    spread = relative_spread(best)
    off = dist[np.triu_indices(n, k=1)]
    return ComparisonSummary(
        labels=_run_labels(records),
        best_fitness=best,
        best_normalized_efficiency=[r.best_normalized_efficiency() for r in records],
        distance=dist,
        fitness_spread=spread,
        min_distance=float(off.min()),
        max_distance=float(off.max()),
        eps_f=eps_f,
        delta_g=float(delta_g),
        multimodal=bool(spread < eps_f and off.min() > delta_g),
    )


def diff_export(baseline: BladeGeometry, optimized: BladeGeometry, path) -> Path:
    """Write the baseline surface with the signed normal displacement of ``optimized``."""
    values = geometry_diff(baseline, optimized).ravel()
    pts = blade_io.lofted_points(baseline)
    quads = blade_io.lofted_quads(baseline)
    lines = [
        "# vtk DataFile Version 3.0",
        "bladeopt signed normal displacement",
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {len(pts)} double",
    ]
    lines += [f"{x!r} {y!r} {z!r}" for x, y, z in pts.tolist()]
    lines.append(f"POLYGONS {len(quads)} {5 * len(quads)}")
    lines += ["4 " + " ".join(map(str, q)) for q in quads.tolist()]
    lines += [
        f"POINT_DATA {len(pts)}",
        "SCALARS normal_displacement double 1",
        "LOOKUP_TABLE default",
    ]
    lines += [repr(v) for v in values.tolist()]
    path = Path(path)
    path.write_text("\n".join(lines) + "\n")
    return path


def read_vtk_scalars(path) -> tuple[np.ndarray, np.ndarray]:
    """Points and point scalars of a file written by :func:`diff_export`."""
    tokens = Path(path).read_text().split("\n")
    i = 0
    points = scalars = None
    while i < len(tokens):
        line = tokens[i].strip()
        if line.startswith("POINTS"):
            n = int(line.split()[1])
            points = np.array([tokens[i + 1 + k].split() for k in range(n)], dtype=float)
            i += n
        elif line.startswith("POINT_DATA"):
            n = int(line.split()[1])
            scalars = np.array([tokens[i + 3 + k] for k in range(n)], dtype=float)
            i += n + 2
        i += 1
    if points is None or scalars is None:
        raise ValueError(f"{path}: not a bladeopt VTK diff file")
    return points, scalars
