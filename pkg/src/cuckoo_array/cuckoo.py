"""Cuckoo search over a bounded box (minimization).

Each iteration lays one Levy-flight cuckoo per nest, drops it into a randomly
chosen nest if it is strictly better there, then abandons the worst fraction
``pa`` of nests (never the current best) and rebuilds them. All random draws
of an iteration happen on the calling thread before any objective call, so a
run is reproducible regardless of how many evaluation workers are used.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import gamma

from .errors import ContractViolation, ObjectiveEvaluationError

Objective = Callable[[np.ndarray], float]

# Mantegna's ratio can blow up when the denominator draw is ~0; cap so that
# (huge * 0) never turns into nan before clamping.
_STEP_CAP = 1e150


@dataclass(frozen=True)
class CsaConfig:
    population: int = 25
    pa: float = 0.25
    alpha: float = 0.01
    levy_exponent: float = 1.5
    max_iterations: int = 500
    seed: int = 0
    raw_levy: bool = False

    def __post_init__(self):
        if isinstance(self.population, bool) or int(self.population) != self.population \
                or self.population < 2:
            raise ContractViolation(f"population must be an integer >= 2, got {self.population!r}")
        if not 0.0 <= self.pa <= 1.0:
            raise ContractViolation(f"pa must lie in [0, 1], got {self.pa!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0.0):
            raise ContractViolation(f"alpha must be non-negative, got {self.alpha!r}")
        _check_exponent(self.levy_exponent)
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations \
                or self.max_iterations < 1:
            raise ContractViolation(f"max_iterations must be a positive integer, got {self.max_iterations!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ContractViolation(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "population", int(self.population))
        object.__setattr__(self, "max_iterations", int(self.max_iterations))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "pa", float(self.pa))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "levy_exponent", float(self.levy_exponent))
        object.__setattr__(self, "raw_levy", bool(self.raw_levy))

    def n_abandoned(self) -> int:
        # tolerance keeps e.g. 0.2 * 25 from rounding up to 6
        k = math.ceil(self.pa * self.population - 1e-9)
        return min(max(k, 0), self.population - 1)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.array(self.lower, dtype=float).reshape(-1)
        hi = np.array(self.upper, dtype=float).reshape(-1)
        if lo.size == 0 or lo.shape != hi.shape:
            raise ContractViolation("bounds must be non-empty with matching lower/upper lengths")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))) or np.any(lo >= hi):
            raise ContractViolation("every dimension needs finite lower < upper")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def box(cls, lower: float, upper: float, dimension: int) -> "Bounds":
        return cls(np.full(dimension, lower), np.full(dimension, upper))

    @property
    def dimension(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


def as_bounds(bounds) -> Bounds:
    """Accept a :class:`Bounds` or a sequence of ``[lower, upper]`` pairs."""
    if isinstance(bounds, Bounds):
        return bounds
    pairs = np.array(bounds, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ContractViolation("bounds must be a list of [lower, upper] pairs")
    return Bounds(pairs[:, 0], pairs[:, 1])


@dataclass(frozen=True, eq=False)
class Nest:
    position: np.ndarray
    objective_value: float

    def __post_init__(self):
        p = np.array(self.position, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "objective_value", float(self.objective_value))


@dataclass
class RunResult:
    best_position: np.ndarray
    best_objective: float
    best_history: list[float]
    fitness_deltas: list[float]
    iterations_executed: int
    seed: int
    initial_best_objective: float = field(default=float("nan"))

    def to_dict(self) -> dict:
        return {
            "best_position": [float(v) for v in self.best_position],
            "best_objective": self.best_objective,
            "initial_best_objective": self.initial_best_objective,
            "iterations_executed": self.iterations_executed,
            "seed": self.seed,
            "best_history": list(self.best_history),
            "fitness_deltas": list(self.fitness_deltas),
        }


def _check_exponent(levy_exponent):
    if not 1.0 < levy_exponent < 3.0:
        raise ContractViolation(f"levy_exponent must lie strictly inside (1, 3), got {levy_exponent!r}")


def mantegna_sigma(beta: float) -> float:
    num = gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def levy_step(rng: np.random.Generator, levy_exponent: float, dimension: int) -> np.ndarray:
    """Heavy-tailed step vector via Mantegna's ratio of Gaussians.

    The stable index is ``beta = levy_exponent - 1`` so that the density of
    ``|step|`` decays like ``|step| ** -levy_exponent``.
    """
    _check_exponent(levy_exponent)
    beta = levy_exponent - 1.0
    u = rng.normal(0.0, mantegna_sigma(beta), dimension)
    v = rng.normal(0.0, 1.0, dimension)
    with np.errstate(divide="ignore", over="ignore"):
        step = u / np.abs(v) ** (1.0 / beta)
    return np.nan_to_num(np.clip(step, -_STEP_CAP, _STEP_CAP), nan=0.0)


def _evaluate(objective: Objective, positions: Sequence[np.ndarray], iteration, workers: int,
              indices: Sequence[int] | None = None) -> list[float]:
    if indices is None:
        indices = range(len(positions))

    def call(k):
        x = positions[k]
        try:
            value = float(objective(x))
        except Exception as exc:
            raise ObjectiveEvaluationError(f"objective raised {exc!r}", iteration, indices[k]) from exc
        if math.isnan(value):
            raise ObjectiveEvaluationError("objective returned nan", iteration, indices[k])
        return value

    if workers > 1 and len(positions) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(call, range(len(positions))))
    return [call(k) for k in range(len(positions))]


def init_population(config: CsaConfig, bounds, objective: Objective,
                    rng: np.random.Generator, workers: int = 1) -> list[Nest]:
    bounds = as_bounds(bounds)
    positions = rng.uniform(bounds.lower, bounds.upper, size=(config.population, bounds.dimension))
    values = _evaluate(objective, list(positions), None, workers)
    return [Nest(p, f) for p, f in zip(positions, values)]


def propose_cuckoo(nest: Nest, best: Nest, config: CsaConfig, bounds,
                   rng: np.random.Generator) -> np.ndarray:
    bounds = as_bounds(bounds)
    if nest.position.shape != best.position.shape:
        raise ContractViolation("nest and best have different dimensions")
    step = levy_step(rng, config.levy_exponent, nest.position.size)
    scale = nest.position - best.position
    if config.raw_levy or not scale.any():
        # the best nest (or a copy of it) would otherwise never move
        scale = bounds.width
    return bounds.clip(nest.position + config.alpha * step * scale)


def _best_index(nests: Sequence[Nest]) -> int:
    return int(np.argmin([n.objective_value for n in nests]))


def step_iteration(nests: Sequence[Nest], best: Nest, config: CsaConfig, bounds,
                   objective: Objective, rng: np.random.Generator, iteration=None,
                   workers: int = 1) -> tuple[list[Nest], Nest]:
    """One generation: cuckoo laying, random-nest replacement, abandonment."""
    bounds = as_bounds(bounds)
    nests = list(nests)
    n = len(nests)
    if n == 0:
        raise ContractViolation("population is empty")

    # (a) one cuckoo per nest, each dropped into a uniformly chosen nest j
    candidates, targets = [], []
    for nest in nests:
        candidates.append(propose_cuckoo(nest, best, config, bounds, rng))
        targets.append(int(rng.integers(n)))
    values = _evaluate(objective, candidates, iteration, workers)
    for x, f, j in zip(candidates, values, targets):
        if f < nests[j].objective_value:
            nests[j] = Nest(x, f)

    # (b) rebuild the worst ceil(pa * n) nests, sparing the elite
    k = config.n_abandoned()
    if k:
        elite = _best_index(nests)
        order = np.argsort([nd.objective_value for nd in nests], kind="stable")[::-1]
        doomed = [int(i) for i in order if i != elite][:k]
        survivors = [i for i in range(n) if i not in set(doomed)]
        fresh = []
        for _ in doomed:
            if rng.random() < 0.5:
                fresh.append(rng.uniform(bounds.lower, bounds.upper))
            else:
                base = nests[survivors[int(rng.integers(len(survivors)))]].position
                step = levy_step(rng, config.levy_exponent, bounds.dimension)
                fresh.append(bounds.clip(base + config.alpha * step * bounds.width))
        fresh_values = _evaluate(objective, fresh, iteration, workers, indices=doomed)
        for i, x, f in zip(doomed, fresh, fresh_values):
            nests[i] = Nest(x, f)

    # (c)
    return nests, nests[_best_index(nests)]


def run_csa(config: CsaConfig, bounds, objective: Objective, workers: int = 1,
            callback: Callable[[int, Nest], None] | None = None) -> RunResult:
    """Run cuckoo search for exactly ``config.max_iterations`` iterations.

    ``fitness_deltas[t]`` is the change of the best objective during
    iteration ``t``; entry 0 is measured against the initial population.
    """
    bounds = as_bounds(bounds)
    rng = np.random.default_rng(config.seed)
    nests = init_population(config, bounds, objective, rng, workers)
    best = nests[_best_index(nests)]
    initial = best.objective_value
    history, deltas = [], []
    previous = initial
    for t in range(config.max_iterations):
        nests, best = step_iteration(nests, best, config, bounds, objective, rng,
                                     iteration=t, workers=workers)
        history.append(best.objective_value)
        deltas.append(best.objective_value - previous)
        previous = best.objective_value
        if callback is not None:
            callback(t, best)
    return RunResult(
        best_position=np.array(best.position),
        best_objective=best.objective_value,
        best_history=history,
        fitness_deltas=deltas,
        iterations_executed=config.max_iterations,
        seed=config.seed,
        initial_best_objective=initial,
    )
