"""Number of Hicks-Henne bumps per side against the best fitness reached.

    python3 scripts/hh_sweep.py --values 3,5,7,9,12 -s budget.max_evaluations=1441
"""

from bladeopt import analysis, harness

from _common import base_config, parser, write_json


def main():
    ap = parser(__doc__.splitlines()[0], "results/hh_sweep")
    ap.add_argument("--values", default="3,5,7,9,12", help="comma-separated n_hh values")
    args = ap.parse_args()
    records = harness.sweep(base_config(args), "n_hh", [int(v) for v in args.values.split(",")])
    analysis.convergence_export(records, args.out, "evaluation")
    rows = [{"n_hh": r.config["n_hh"], "dimension": r.config["optimizer"]["dimension"],
             "best_fitness": r.best_fitness, "best_normalized_efficiency": r.best_normalized_efficiency()}
            for r in records]
    write_json(f"{args.out}/summary.json", rows)
    for row in rows:
        print(f"n_hh {row['n_hh']:>2d} (dimension {row['dimension']:>2d}): best fitness {row['best_fitness']:.6f}")


if __name__ == "__main__":
    main()
