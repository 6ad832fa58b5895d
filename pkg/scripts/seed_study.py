"""Independent runs differing only in seed: fitness spread and final-geometry distances.

With ``--two-basin`` the surrogate has two equally good optima in separate
regions of the search space, so different seeds can land on different blades.

    python3 scripts/seed_study.py --two-basin -s n_hh=7 -s budget.max_generations=60
"""

from bladeopt import analysis, harness
from bladeopt.evaluation import two_basin_surrogate

from _common import base_config, parser, write_json


def main():
    ap = parser(__doc__.splitlines()[0], "results/seed_study")
    ap.add_argument("--seeds", default="1,2,3", help="comma-separated seeds (default: 1,2,3)")
    ap.add_argument("--two-basin", action="store_true", help="use the two-optimum surrogate")
    ap.add_argument("--eps-f", type=float, default=0.01, help="relative fitness-spread threshold")
    args = ap.parse_args()
    base = base_config(args)
    if args.two_basin:
        base.evaluator.surrogate = two_basin_surrogate(base.n_hh)
        base.validate()
    records = harness.sweep(base, "seed", [int(s) for s in args.seeds.split(",")])
    analysis.convergence_export(records, args.out)
    summary = analysis.compare_runs(records, eps_f=args.eps_f)
    write_json(f"{args.out}/comparison.json", summary.to_dict())
    print(f"best fitness {summary.best_fitness.tolist()}")
    print(f"fitness spread {summary.fitness_spread:.3%}, max distance {summary.max_distance:.3e} m "
          f"(delta_g {summary.delta_g:.1e} m), multimodal={summary.multimodal}")


if __name__ == "__main__":
    main()
