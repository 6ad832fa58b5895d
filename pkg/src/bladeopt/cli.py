"""Command-line entry point: ``bladeopt <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 configuration error, 4 evaluator
failure, 5 I/O failure. Relative ``--config`` paths that do not exist are
looked up in ``$BLADEOPT_CONFIG_DIR``; without ``--config`` the file
``$BLADEOPT_CONFIG_DIR/default.yaml`` is used if present, else built-in
defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, blade_io, harness
from .config import ConfigError, apply_overrides, config_from_dict, load_config
from .evaluation import EvaluationError
from .geometry import GeometryError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_EVALUATOR = 4
EXIT_IO = 5

CONFIG_DIR_ENV = "BLADEOPT_CONFIG_DIR"


def _resolve_config(path: str | None) -> Path | None:
    env_dir = os.environ.get(CONFIG_DIR_ENV)
    if path is None:
        if env_dir and (Path(env_dir) / "default.yaml").is_file():
            return Path(env_dir) / "default.yaml"
        return None
    p = Path(path)
    if not p.exists() and not p.is_absolute() and env_dir and (Path(env_dir) / p).exists():
        return Path(env_dir) / p
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    return p


def _config(args):
    path = _resolve_config(args.config)
    if path is None:
        return config_from_dict(apply_overrides({"version": 1}, args.set))
    return load_config(path, args.set)


def _add_config_args(p):
    p.add_argument("-c", "--config", help="experiment configuration file (YAML, version 1)")
    p.add_argument(
        "-s", "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a config value by dotted path, e.g. optimizer.seed=3 (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bladeopt",
        description="Hicks-Henne blade shape optimization with CMA-ES/PSO on surrogate or external evaluators.",
        epilog="exit codes: 0 ok, 2 usage, 3 config error, 4 evaluator failure, 5 I/O failure",
    )
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress per generation")
    sub = ap.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("baseline", help="write the baseline blade (sections file, optional OBJ)")
    _add_config_args(p)
    p.add_argument("--out", required=True, help="output sections file (.sec)")
    p.add_argument("--obj", help="also write the lofted surface as Wavefront OBJ")

    p = sub.add_parser("run", help="run one optimization")
    _add_config_args(p)
    p.add_argument("--dry-run", action="store_true",
                   help="validate the config and print derived quantities without evaluating")

    p = sub.add_parser("sweep", help="independent runs over seeds, lambda or n_hh")
    _add_config_args(p)
    p.add_argument("--axis", required=True, choices=["seed", "lambda", "n_hh"], help="swept variable")
    p.add_argument("--values", required=True, help="comma-separated values, e.g. 1,2,3")

    p = sub.add_parser("resume", help="continue an interrupted run from its checkpoint")
    p.add_argument("run_dir", help="run directory containing checkpoint.json")

    p = sub.add_parser("analyze", help="convergence tables and cross-run comparison")
    p.add_argument("run_dirs", nargs="+", help="run directories")
    p.add_argument("--out", required=True, help="directory for tables and comparison.json")
    p.add_argument("--axis", choices=["generation", "evaluation"], default="generation",
                   help="incumbent series axis (default: generation)")
    p.add_argument("--eps-f", type=float, default=0.01, help="relative fitness-spread threshold")
    p.add_argument("--delta-g", type=float, default=None,
                   help="geometry distance threshold in meters (default: measured round-trip noise x10)")

    p = sub.add_parser("diff", help="VTK file of the signed normal displacement between blades")
    p.add_argument("run_dir", help="run whose best blade is compared")
    p.add_argument("--against", help="second run directory (default: the baseline blade)")
    p.add_argument("--out", required=True, help="output .vtk file")

    p = sub.add_parser("export", help="export the best blade of a run")
    p.add_argument("run_dir", help="run directory")
    p.add_argument("--format", choices=["sec", "obj"], default="obj", help="output format")
    p.add_argument("--out", required=True, help="output file")
    return ap


def _cmd_baseline(args):
    cfg = _config(args)
    blade = harness.load_baseline(cfg)
    blade_io.write_blade(blade, args.out)
    if args.obj:
        blade_io.write_obj(blade, args.obj)
    print(f"baseline: {blade.n_sections} sections x {blade.n_points} points -> {args.out}")


def _cmd_run(args):
    cfg = _config(args)
    if args.dry_run:
        gens = cfg.generations()
        lam = cfg.optimizer.population
        print(f"N_search={cfg.search_dimension}")
        print(f"optimizer={cfg.optimizer.kind} population={lam} seed={cfg.optimizer.seed}")
        print(f"budget: generations={gens} evaluations={1 + gens * lam}")
        print(f"evaluator={cfg.evaluator.kind}")
        print(f"output_dir={cfg.output_dir}")
        return
    rec = harness.run(cfg)
    _report(rec)


def _report(rec):
    best = rec.best_row()
    norm = rec.best_normalized_efficiency()
    extra = f" eta_normalized={norm:.6f}" if norm is not None else ""
    print(f"{rec.config['name']}: {rec.status}, {rec.evaluations} evaluations, "
          f"best fitness {best.fitness:.6g}{extra} -> {rec.run_dir}")


def _cmd_sweep(args):
    cfg = _config(args)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    try:
        values = [int(v) for v in values]
    except ValueError:
        raise ConfigError(f"sweep values must be integers: {args.values}")
    for rec in harness.sweep(cfg, args.axis, values):
        _report(rec)


def _cmd_resume(args):
    _report(harness.resume(args.run_dir))


def _cmd_analyze(args):
    records = [harness.load_record(d) for d in args.run_dirs]
    out = Path(args.out)
    paths = analysis.convergence_export(records, out, args.axis)
    for p in paths.values():
        print(f"wrote {p}")
    if len(records) >= 2:
        summary = analysis.compare_runs(records, args.eps_f, args.delta_g)
        (out / "comparison.json").write_text(json.dumps(summary.to_dict(), indent=1))
        print(f"fitness spread {summary.fitness_spread:.3%}, min distance {summary.min_distance:.3e} m "
              f"(delta_g {summary.delta_g:.1e}), multimodal={summary.multimodal}")


def _cmd_diff(args):
    rec = harness.load_record(args.run_dir)
    optimized = analysis.final_blade(rec)
    if args.against:
        reference = analysis.final_blade(harness.load_record(args.against))
    else:
        reference = harness.load_baseline(rec.experiment_config())
    analysis.diff_export(reference, optimized, args.out)
    print(f"wrote {args.out}")


def _cmd_export(args):
    blade = analysis.final_blade(harness.load_record(args.run_dir))
    if args.format == "obj":
        blade_io.write_obj(blade, args.out)
    else:
        blade_io.write_blade(blade, args.out)
    print(f"wrote {args.out}")


COMMANDS = {
    "baseline": _cmd_baseline,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "resume": _cmd_resume,
    "analyze": _cmd_analyze,
    "diff": _cmd_diff,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ConfigError, GeometryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (harness.EvaluatorFailure, harness.SweepError, EvaluationError) as exc:
        print(f"evaluator failure: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
