"""CMA-ES against PSO on the same evaluator, seed and evaluation budget.

    python3 scripts/cma_vs_pso.py --out results/cma_vs_pso -s budget.max_generations=60
"""

from dataclasses import replace

from bladeopt import analysis, harness

from _common import base_config, parser, write_json


def main():
    args = parser(__doc__.splitlines()[0], "results/cma_vs_pso").parse_args()
    base = base_config(args)
    records = [harness.run(base.replace(name=kind, output_dir=f"{args.out}/{kind}",
                                        optimizer=replace(base.optimizer, kind=kind)).validate())
               for kind in ("cma-es", "pso")]
    analysis.convergence_export(records, args.out, "evaluation")
    summary = {r.config["optimizer"]["kind"]: {
        "best_fitness": r.best_fitness,
        "best_normalized_efficiency": r.best_normalized_efficiency(),
        "evaluations": r.evaluations,
    } for r in records}
    write_json(f"{args.out}/summary.json", summary)
    for kind, s in summary.items():
        print(f"{kind:7s} best fitness {s['best_fitness']:.6f} after {s['evaluations']} evaluations")


if __name__ == "__main__":
    main()
