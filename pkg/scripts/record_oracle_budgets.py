"""Record reference evaluation budgets on the shifted 10-D sphere.

Runs third-party implementations (pycma, pyswarms) with the same settings
as the package defaults and prints the median number of evaluations needed
to reach the target. The numbers printed here are frozen in
``tests/test_acceptance.py``; the package code is not used.

    pip install cma pyswarms
    python3 scripts/record_oracle_budgets.py
"""

import logging

import numpy as np

DIM = 10
OPTIMUM = 0.7
SEEDS = range(1, 11)


def sphere(x):
    return float(np.sum((np.asarray(x) - OPTIMUM) ** 2))


def cma_budget(seed, target=1e-8, max_evals=40_000):
    import cma

    es = cma.CMAEvolutionStrategy(
        DIM * [0.5], 0.05,
        {"popsize": 12, "CMA_mu": 4, "bounds": [0, 1], "seed": seed, "verbose": -9,
         "maxfevals": max_evals, "tolfun": 0, "tolx": 0, "tolfunhist": 0},
    )
    evals = 0
    while evals < max_evals:
        X = es.ask()
        f = [sphere(x) for x in X]
        es.tell(X, f)
        evals += len(X)
        if min(f) < target:
            return evals
    return None


def pso_budget(seed, target=1e-3, iters=3_000):
    import pyswarms as ps

    logging.getLogger("pyswarms").setLevel(logging.ERROR)
    np.random.seed(seed)
    opt = ps.single.GlobalBestPSO(
        n_particles=12, dimensions=DIM,
        options={"c1": 1.7, "c2": 1.4, "w": 0.8},
        bounds=(np.zeros(DIM), np.ones(DIM)),
        velocity_clamp=(-0.5, 0.5),
    )
    opt.optimize(lambda X: np.sum((X - OPTIMUM) ** 2, axis=1), iters=iters, verbose=False)
    hist = np.asarray(opt.cost_history)
    hit = np.nonzero(hist < target)[0]
    return None if hit.size == 0 else int(hit[0] + 1) * 12


if __name__ == "__main__":
    cma_runs = [cma_budget(s) for s in SEEDS]
    pso_runs = [pso_budget(s) for s in SEEDS]
    print("pycma evaluations to f < 1e-8:", cma_runs, "median", np.median(cma_runs))
    print("pyswarms evaluations to f < 1e-3:", pso_runs, "median", np.median(pso_runs))
