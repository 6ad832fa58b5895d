"""Seeded ask/tell optimizers on the unit box: CMA-ES and PSO.

Both optimizers minimize. Random numbers come from numpy's counter-based
Philox-4x64 generator (``RNG_ALGORITHM``), whose full state is serialized
in checkpoints so a resumed run continues bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "CMAConfig",
    "CMAES",
    "OptimizerConfig",
    "OptimizerError",
    "PSO",
    "PSOConfig",
    "RNG_ALGORITHM",
    "STATE_VERSION",
    "bound_handle",
    "evaluations_to_target",
    "init",
    "optimizer_from_state",
]

RNG_ALGORITHM = "numpy.random.Philox(4x64-10)"
STATE_VERSION = 1


class OptimizerError(RuntimeError):
    """Protocol misuse: ask/tell out of order or mismatched fitness count."""


@dataclass
class CMAConfig:
    lam: int = 12
    mu: int = 4
    sigma0: float = 0.05
    max_resamples: int = 10


@dataclass
class PSOConfig:
    particles: int = 12
    omega: float = 0.8
    phi1: float = 1.7
    phi2: float = 1.4
    v_max: float = 0.5


@dataclass
class OptimizerConfig:
    kind: str = "cma-es"
    dimension: int = 36
    seed: int = 1
    cma: CMAConfig = field(default_factory=CMAConfig)
    pso: PSOConfig = field(default_factory=PSOConfig)

    def validate(self):
        if self.kind not in ("cma-es", "pso"):
            raise ValueError(f"unknown optimizer kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 1 <= self.cma.mu <= self.cma.lam:
            raise ValueError("CMA-ES requires 1 <= mu <= lambda")
        if not self.cma.sigma0 > 0:
            raise ValueError("sigma0 must be positive")
        if self.cma.max_resamples < 0:
            raise ValueError("max_resamples must be non-negative")
        if self.pso.particles < 2:
            raise ValueError("PSO needs at least 2 particles")
        if not self.pso.v_max > 0:
            raise ValueError("v_max must be positive")
        return self

    @property
    def population(self) -> int:
        """Candidates per generation."""
        return self.cma.lam if self.kind == "cma-es" else self.pso.particles


def bound_handle(vector) -> np.ndarray:
    """Clamp every component to ``[0, 1]``."""
    return np.clip(np.asarray(vector, dtype=float), 0.0, 1.0)


def _make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _rng_state_to_json(rng: np.random.Generator) -> dict:
    def conv(v):
        if isinstance(v, dict):
            return {k: conv(x) for k, x in v.items()}
        if isinstance(v, np.ndarray):
            return {"__uint64__": [int(x) for x in v]}
        if isinstance(v, np.integer):
            return int(v)
        return v

    return conv(rng.bit_generator.state)


def _rng_from_json(state: dict) -> np.random.Generator:
    def conv(v):
        if isinstance(v, dict):
            if "__uint64__" in v:
                return np.array(v["__uint64__"], dtype=np.uint64)
            return {k: conv(x) for k, x in v.items()}
        return v

    bitgen = np.random.Philox(0)
    bitgen.state = conv(state)
    return np.random.Generator(bitgen)


def _check_fitnesses(fitnesses, expected: int) -> np.ndarray:
    f = np.asarray(fitnesses, dtype=float)
    if f.shape != (expected,):
        raise OptimizerError(f"expected {expected} fitness values, got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("fitness values must be finite; penalize failures before telling")
    return f


class _AskTell:
    config: OptimizerConfig

    def __init__(self, config: OptimizerConfig):
        self.config = config.validate()
        self.rng = _make_rng(config.seed)
        self.generation = 0
        self.evaluations = 0
        self.best_x: Optional[np.ndarray] = None
        self.best_f = math.inf
        self._pending: Optional[np.ndarray] = None

    @property
    def dimension(self) -> int:
        return self.config.dimension

    @property
    def awaiting_tell(self) -> bool:
        return self._pending is not None

    def ask(self) -> list[np.ndarray]:
        if self._pending is not None:
            raise OptimizerError("ask() called twice without tell()")
        X = self._sample()
        self._pending = X
        out = []
        for x in X:
            x = x.copy()
            x.setflags(write=False)
            out.append(x)
        return out

    def tell(self, fitnesses: Sequence[float]) -> tuple[np.ndarray, float]:
        """Report fitnesses of the last ``ask`` batch, in candidate order.

        Returns the incumbent ``(best_x, best_f)`` over all generations.
        """
        if self._pending is None:
            raise OptimizerError("tell() called without a pending ask()")
        X = self._pending
        f = _check_fitnesses(fitnesses, len(X))
        k = int(np.argmin(f))
        if f[k] < self.best_f:
            self.best_f = float(f[k])
            self.best_x = X[k].copy()
        self._update(X, f)
        self._pending = None
        self.generation += 1
        self.evaluations += len(X)
        return self.best_x.copy(), self.best_f

    def _sample(self) -> np.ndarray:
        raise NotImplementedError

    def _update(self, X: np.ndarray, f: np.ndarray):
        raise NotImplementedError

    # checkpointing -------------------------------------------------------

    def _common_state(self) -> dict:
        return {
            "version": STATE_VERSION,
            "kind": self.config.kind,
            "rng_algorithm": RNG_ALGORITHM,
            "config": asdict(self.config),
            "rng": _rng_state_to_json(self.rng),
            "generation": self.generation,
            "evaluations": self.evaluations,
            "best_x": None if self.best_x is None else self.best_x.tolist(),
            "best_f": self.best_f if math.isfinite(self.best_f) else None,
            "pending": None if self._pending is None else self._pending.tolist(),
        }

    def _load_common(self, state: dict):
        self.rng = _rng_from_json(state["rng"])
        self.generation = state["generation"]
        self.evaluations = state["evaluations"]
        self.best_x = None if state["best_x"] is None else np.array(state["best_x"])
        self.best_f = math.inf if state["best_f"] is None else state["best_f"]
        self._pending = None if state["pending"] is None else np.array(state["pending"])


class CMAES(_AskTell):
    """(mu/mu_w, lambda)-CMA-ES with the reference default learning rates.

    Candidates leaving the unit box are resampled up to
    ``max_resamples`` times and clamped afterwards; the update uses the
    clamped points, i.e. exactly what was evaluated.
    """

    def __init__(self, config: OptimizerConfig, start=None):
        super().__init__(config)
        n = config.dimension
        lam, mu = config.cma.lam, config.cma.mu
        start = np.full(n, 0.5) if start is None else np.asarray(start, dtype=float)
        if start.shape != (n,):
            raise ValueError(f"start point has shape {start.shape}, expected ({n},)")

        w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / np.sum(self.weights**2)
        mueff = self.mueff
        self.cs = (mueff + 2) / (n + mueff + 5)
        self.damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + self.cs
        self.cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        self.c1 = 2 / ((n + 1.3) ** 2 + mueff)
        self.cmu = min(1 - self.c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        self.chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))
        self.lam = lam

        self.mean = start.copy()
        self.sigma = float(config.cma.sigma0)
        self.C = np.eye(n)
        self.ps = np.zeros(n)
        self.pc = np.zeros(n)
        self.last_selection: Optional[np.ndarray] = None

    def _eigen(self):
        D2, B = np.linalg.eigh(self.C)
        return B, np.sqrt(np.maximum(D2, 0.0))

    def _sample(self) -> np.ndarray:
        n = self.dimension
        B, D = self._eigen()
        X = np.empty((self.lam, n))
        for k in range(self.lam):
            for _ in range(self.config.cma.max_resamples + 1):
                x = self.mean + self.sigma * (B @ (D * self.rng.standard_normal(n)))
                if np.all((x >= 0.0) & (x <= 1.0)):
                    break
            X[k] = bound_handle(x)
        return X

    def _update(self, X, f):
        n = self.dimension
        mu = self.config.cma.mu
        order = np.argsort(f, kind="stable")
        self.last_selection = order[:mu].copy()
        old = self.mean
        Y = (X[order[:mu]] - old) / self.sigma
        y_w = self.weights @ Y
        self.mean = old + self.sigma * y_w

        B, D = self._eigen()
        inv_sqrt = B @ np.diag(1.0 / D) @ B.T
        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * (
            inv_sqrt @ y_w
        )
        ps_norm = np.linalg.norm(self.ps)
        g = self.generation + 1
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * g)) < (1.4 + 2 / (n + 1)) * self.chi_n
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(
            self.cc * (2 - self.cc) * self.mueff
        ) * y_w

        rank_mu = (Y.T * self.weights) @ Y
        C = (
            (1 - self.c1 - self.cmu) * self.C
            + self.c1 * (np.outer(self.pc, self.pc) + (not hsig) * self.cc * (2 - self.cc) * self.C)
            + self.cmu * rank_mu
        )
        self.C = 0.5 * (C + C.T)
        self.sigma *= math.exp((self.cs / self.damps) * (ps_norm / self.chi_n - 1))

    def state_dict(self) -> dict:
        state = self._common_state()
        state.update(
            mean=self.mean.tolist(),
            sigma=self.sigma,
            C=self.C.tolist(),
            ps=self.ps.tolist(),
            pc=self.pc.tolist(),
        )
        return state

    @classmethod
    def from_state(cls, state: dict) -> "CMAES":
        opt = cls(_config_from_dict(state["config"]), start=state["mean"])
        opt._load_common(state)
        opt.sigma = state["sigma"]
        opt.C = np.array(state["C"])
        opt.ps = np.array(state["ps"])
        opt.pc = np.array(state["pc"])
        return opt


class PSO(_AskTell):
    """Inertia-weight particle swarm.

    Per generation: ``v <- omega v + phi1 r1 (p - x) + phi2 r2 (g - x)`` with
    per-component uniform ``r1, r2``; velocities clamped to ``v_max``, then
    ``x <- clamp(x + v)``. The first ``ask`` returns the initial positions.
    """

    def __init__(self, config: OptimizerConfig):
        super().__init__(config)
        p, n, vmax = config.pso.particles, config.dimension, config.pso.v_max
        self.x = self.rng.uniform(0.0, 1.0, (p, n))
        self.v = self.rng.uniform(-vmax, vmax, (p, n))
        self.pbest = self.x.copy()
        self.pbest_f = np.full(p, math.inf)
        self.gbest: Optional[np.ndarray] = None
        self.gbest_f = math.inf

    def _sample(self) -> np.ndarray:
        if self.generation > 0:
            cfg = self.config.pso
            shape = self.x.shape
            r1 = self.rng.random(shape)
            r2 = self.rng.random(shape)
            v = (
                cfg.omega * self.v
                + cfg.phi1 * r1 * (self.pbest - self.x)
                + cfg.phi2 * r2 * (self.gbest - self.x)
            )
            self.v = np.clip(v, -cfg.v_max, cfg.v_max)
            self.x = bound_handle(self.x + self.v)
        return self.x.copy()

    def _update(self, X, f):
        better = f < self.pbest_f
        self.pbest[better] = X[better]
        self.pbest_f[better] = f[better]
        k = int(np.argmin(self.pbest_f))
        if self.pbest_f[k] < self.gbest_f:
            self.gbest_f = float(self.pbest_f[k])
            self.gbest = self.pbest[k].copy()

    def state_dict(self) -> dict:
        state = self._common_state()
        state.update(
            x=self.x.tolist(),
            v=self.v.tolist(),
            pbest=self.pbest.tolist(),
            pbest_f=[None if not math.isfinite(v) else v for v in self.pbest_f.tolist()],
            gbest=None if self.gbest is None else self.gbest.tolist(),
            gbest_f=self.gbest_f if math.isfinite(self.gbest_f) else None,
        )
        return state

    @classmethod
    def from_state(cls, state: dict) -> "PSO":
        opt = cls(_config_from_dict(state["config"]))
        opt._load_common(state)
        opt.x = np.array(state["x"])
        opt.v = np.array(state["v"])
        opt.pbest = np.array(state["pbest"])
        opt.pbest_f = np.array([math.inf if v is None else v for v in state["pbest_f"]])
        opt.gbest = None if state["gbest"] is None else np.array(state["gbest"])
        opt.gbest_f = math.inf if state["gbest_f"] is None else state["gbest_f"]
        return opt


def _config_from_dict(d: dict) -> OptimizerConfig:
    return OptimizerConfig(
        kind=d["kind"],
        dimension=d["dimension"],
        seed=d["seed"],
        cma=CMAConfig(**d["cma"]),
        pso=PSOConfig(**d["pso"]),
    )


def init(config: OptimizerConfig, start=None):
    """Fresh optimizer for ``config``; ``start`` sets the CMA-ES mean."""
    if config.kind == "cma-es":
        return CMAES(config, start=start)
    if start is not None:
        raise ValueError("PSO does not take a start point")
    return PSO(config)


def optimizer_from_state(state: dict):
    if state.get("version") != STATE_VERSION:
        raise ValueError(f"unsupported optimizer state version {state.get('version')!r}")
    if state.get("rng_algorithm") != RNG_ALGORITHM:
        raise ValueError(f"state was written with RNG {state.get('rng_algorithm')!r}, expected {RNG_ALGORITHM!r}")
    cls = CMAES if state["kind"] == "cma-es" else PSO
    return cls.from_state(state)


def evaluations_to_target(
    config: OptimizerConfig, objective, target: float, max_evaluations: int = 40_000
) -> Optional[int]:
    """Evaluations (whole generations) until some candidate scores below ``target``.

    Returns ``None`` if the budget runs out first. Used for benchmark checks
    against reference implementations.
    """
    opt = init(config)
    while opt.evaluations < max_evaluations:
        X = opt.ask()
        f = [float(objective(x)) for x in X]
        opt.tell(f)
        if min(f) < target:
            return opt.evaluations
    return None
