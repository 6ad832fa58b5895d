"""CMA-ES population sizes compared at a fixed number of evaluations.

    python3 scripts/population_study.py --lambdas 12,24 -s budget.max_evaluations=1441
"""

from bladeopt import analysis, harness

from _common import base_config, parser, write_json


def main():
    ap = parser(__doc__.splitlines()[0], "results/population_study")
    ap.add_argument("--lambdas", default="12,24", help="comma-separated population sizes (default: 12,24)")
    args = ap.parse_args()
    base = base_config(args)
    if base.budget.max_evaluations is None:
        ap.error("set budget.max_evaluations so all population sizes get the same budget")
    records = harness.sweep(base, "lambda", [int(v) for v in args.lambdas.split(",")])
    analysis.convergence_export(records, args.out, "evaluation")
    series = [harness.best_so_far(r) for r in records]
    n = min(len(s.per_evaluation) for s in series)
    result = {str(r.config["optimizer"]["cma"]["lam"]): {
        "generations": r.generations,
        "best_after_common_evaluations": float(s.per_evaluation[n - 1]),
    } for r, s in zip(records, series)}
    write_json(f"{args.out}/summary.json", {"common_evaluations": n, "runs": result})
    for lam, s in result.items():
        print(f"lambda {lam:>3s}: {s['generations']} generations, best after {n} evaluations "
              f"{s['best_after_common_evaluations']:.6f}")


if __name__ == "__main__":
    main()
