"""Published variant mechanisms, composable over the base algorithm.

Includes the elitist probing move for the brightest firefly, the
global-best pull update, preset reductions that turn the base update into
simulated-annealing-, differential-evolution-, and particle-swarm-like
special cases, a multi-swarm scheme for changing landscapes, and a
penalty wrapper for constrained problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .core import (
    EvaluationError,
    FaParams,
    Objective,
    SwarmState,
    fitness_to_intensity,
    initialize,
    step,
)
from .randomization import alpha_at

REDUCTION_MODES = ("sa_like", "de_like", "pso_like")

# Fitness drift beyond this at an unchanged position means the landscape moved.
CHANGE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MultiSwarmConfig:
    """Layout and interaction radii of a multi-swarm run.

    Radii are in normalized coordinates (domain mapped to the unit box).
    sentinel_count bests are re-evaluated each step to detect landscape
    changes.
    """

    num_swarms: int
    swarm_size: int
    exclusion_radius: float
    anticonvergence_radius: float
    sentinel_count: int = 1

    def __post_init__(self):
        if self.num_swarms < 1:
            raise ValueError(f"num_swarms must be >= 1, got {self.num_swarms}")
        if self.swarm_size < 1:
            raise ValueError(f"swarm_size must be >= 1, got {self.swarm_size}")
        if self.exclusion_radius <= 0:
            raise ValueError(f"exclusion_radius must be > 0, got {self.exclusion_radius}")
        if self.anticonvergence_radius <= 0:
            raise ValueError(f"anticonvergence_radius must be > 0, got {self.anticonvergence_radius}")
        if self.sentinel_count < 0:
            raise ValueError(f"sentinel_count must be >= 0, got {self.sentinel_count}")


@dataclass
class SentinelSet:
    """Fixed probe positions whose objective values should never drift.

    values holds the cached reference evaluations; it is filled on first
    use and refreshed whenever a landscape change is detected.
    """

    positions: np.ndarray
    values: Optional[np.ndarray] = None


def make_sentinels(objective: Objective, count: int, seed) -> SentinelSet:
    """Uniformly placed sentinel probes for change detection."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    rng = np.random.default_rng(seed)
    positions = rng.uniform(objective.lower, objective.upper, size=(count, objective.dim))
    return SentinelSet(positions=positions)


@dataclass(frozen=True)
class PenaltySpec:
    """Inequality constraints g(x) <= 0 folded into the objective as penalties."""

    constraints: tuple[Callable[[np.ndarray], float], ...]
    weight: float = 1e3
    exponent: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.weight <= 0:
            raise ValueError(f"weight must be > 0, got {self.weight}")
        if self.exponent < 1:
            raise ValueError(f"exponent must be >= 1, got {self.exponent}")


def elitist_best_move(
    state: SwarmState,
    m: int,
    params: FaParams,
    objective: Objective,
    alpha: Optional[float] = None,
) -> SwarmState:
    """Probe m random directions from the brightest firefly, keep the best improvement.

    Directions are uniform on the sphere, displacement alpha times the
    domain width.  If no trial improves, the brightest firefly stays
    where it is.  Consumes up to m evaluations, never exceeding the
    remaining budget.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    trials = min(m, params.max_fes - state.fes_used)
    if trials <= 0:
        return state
    best = min(state.fireflies, key=lambda f: f.fitness)
    if alpha is None:
        alpha = alpha_at(params.alpha_schedule, state.t)
    w = objective.width
    dirs = state.rng.standard_normal((trials, objective.dim))
    winner_pos = None
    winner_fit = best.fitness
    evals_done = 0
    for u in dirs:
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            continue
        trial = best.position + alpha * w * (u / norm)
        np.clip(trial, objective.lower, objective.upper, out=trial)
        value = float(objective.eval(trial))
        evals_done += 1
        if math.isnan(value):
            state.fes_used += evals_done
            raise EvaluationError(f"objective returned NaN at position {trial.tolist()}")
        if value < winner_fit:
            winner_fit = value
            winner_pos = trial
    state.fes_used += evals_done
    if winner_pos is not None:
        best.position = winner_pos
        best.fitness = winner_fit
        best.intensity = fitness_to_intensity(winner_fit)
        if state.best is None or winner_fit < state.best.fitness:
            state.best = best.copy()
    return state


def global_best_pull_step(
    state: SwarmState,
    objective: Objective,
    params: FaParams,
    alpha: Optional[float] = None,
) -> SwarmState:
    """Move every firefly toward the best-so-far with a Gaussian random step.

    Update: s_i + beta0 * exp(-gamma * r^2) * (g - s_i) + alpha * eps * width,
    with r the normalized distance to the best-so-far g.  With gamma = 0
    this is the accelerated-particle-swarm special case.
    """
    if state.best is None:
        raise ValueError("population must be evaluated before a pull step")
    if alpha is None:
        alpha = alpha_at(params.alpha_schedule, state.t)
    g = state.best.position
    lo = objective.lower
    hi = objective.upper
    w = objective.width
    eps = state.rng.standard_normal((len(state.fireflies), objective.dim))
    for fly, ek in zip(state.fireflies, eps):
        diff = g - fly.position
        nd = diff / w
        beta = params.beta0 * math.exp(-params.gamma * float(nd @ nd))
        pos = fly.position + beta * diff + alpha * ek * w
        np.clip(pos, lo, hi, out=pos)
        fly.position = pos
    return state


def reduction_mode(name: str, base: Optional[FaParams] = None, seed: Optional[int] = None) -> FaParams:
    """Parameter preset collapsing the base update into a simpler known method.

    sa_like zeroes the attraction so only the scheduled random walk remains;
    de_like removes absorption and draws beta0 once per run from U(0,1)
    (seed required, stream decorrelated from the run's own stream);
    pso_like removes absorption and is meant to be paired with
    global_best_pull_step as the movement rule.
    """
    if name not in REDUCTION_MODES:
        raise ValueError(f"unknown reduction mode {name!r}; expected one of {REDUCTION_MODES}")
    params = base if base is not None else FaParams()
    if name == "sa_like":
        return replace(params, beta0=0.0)
    if name == "de_like":
        if seed is None:
            raise ValueError("de_like draws beta0 once per run and needs a seed")
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
        return replace(params, gamma=0.0, beta0=float(rng.uniform()))
    return replace(params, gamma=0.0)


def _normalized(position: np.ndarray, objective: Objective) -> np.ndarray:
    return (position - objective.lower) / objective.width


def _swarm_diameter(swarm: SwarmState, objective: Objective) -> float:
    pts = [_normalized(f.position, objective) for f in swarm.fireflies]
    diameter = 0.0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = float(np.linalg.norm(pts[i] - pts[j]))
            if d > diameter:
                diameter = d
    return diameter


def _rerandomize(swarm: SwarmState, objective: Objective) -> None:
    pos = swarm.rng.uniform(objective.lower, objective.upper, size=(len(swarm.fireflies), objective.dim))
    for fly, row in zip(swarm.fireflies, pos):
        fly.position = row.copy()
        fly.fitness = math.nan
        fly.intensity = math.nan
    swarm.best = None


def initialize_multiswarm(
    objective: Objective,
    params: FaParams,
    config: MultiSwarmConfig,
    seed: int,
) -> list[SwarmState]:
    """Independent swarms with provably disjoint random streams."""
    if config.num_swarms * config.swarm_size != params.pop_size:
        raise ValueError(
            f"num_swarms * swarm_size must equal pop_size "
            f"({config.num_swarms} * {config.swarm_size} != {params.pop_size})"
        )
    half_diag = 0.5 * math.sqrt(objective.dim)
    if config.exclusion_radius >= half_diag:
        raise ValueError(
            f"exclusion_radius {config.exclusion_radius} must be below half the "
            f"normalized domain diagonal ({half_diag:.4g})"
        )
    swarm_params = replace(params, pop_size=config.swarm_size)
    children = np.random.SeedSequence(seed).spawn(config.num_swarms)
    return [initialize(objective, swarm_params, child) for child in children]


def multiswarm_step(
    swarms: list[SwarmState],
    config: MultiSwarmConfig,
    objective: Objective,
    params: FaParams,
    log: Optional[list] = None,
    sentinels: Optional[SentinelSet] = None,
) -> list[SwarmState]:
    """One generation of every swarm plus the interaction operators.

    The sentinel phase runs first: sentinel positions are re-evaluated,
    and a drift beyond CHANGE_TOLERANCE from their cached values flags a
    landscape change.  With a SentinelSet the probes are fixed positions
    (reliable: a cached reference always predates the change); without
    one, up to sentinel_count stored swarm bests serve as probes, which
    can miss a change that improves the landscape under every swarm.  On
    detection every cached fitness is invalidated, the whole population
    re-evaluated, and each swarm's best rebuilt from the fresh values, so
    the rest of the generation works on valid data.  Each swarm then
    performs one base-algorithm step.  Exclusion re-randomizes the worse
    of two swarms whose bests fall within exclusion_radius of each other;
    anti-convergence re-randomizes the globally worst swarm once every
    swarm has collapsed below the anticonvergence_radius diameter.
    """
    for i in range(len(swarms)):
        for j in range(i + 1, len(swarms)):
            if swarms[i].rng.bit_generator.state == swarms[j].rng.bit_generator.state:
                raise ValueError(f"swarms {i} and {j} share an identical random stream")

    changed = False
    if sentinels is not None and len(sentinels.positions):
        fresh = np.empty(len(sentinels.positions))
        for k, probe in enumerate(sentinels.positions):
            value = float(objective.eval(probe))
            swarms[k % len(swarms)].fes_used += 1
            if math.isnan(value):
                raise EvaluationError(f"objective returned NaN at position {probe.tolist()}")
            fresh[k] = value
        if sentinels.values is None:
            sentinels.values = fresh
        elif np.any(np.abs(fresh - sentinels.values) > CHANGE_TOLERANCE):
            changed = True
    else:
        checked = 0
        for swarm in swarms:
            if checked >= config.sentinel_count:
                break
            sentinel = swarm.best
            if sentinel is None:
                continue
            value = float(objective.eval(sentinel.position))
            swarm.fes_used += 1
            checked += 1
            if math.isnan(value):
                raise EvaluationError(f"objective returned NaN at position {sentinel.position.tolist()}")
            if abs(value - sentinel.fitness) > CHANGE_TOLERANCE:
                changed = True
    if changed:
        for swarm in swarms:
            for fly in swarm.fireflies:
                value = float(objective.eval(fly.position))
                if math.isnan(value):
                    raise EvaluationError(f"objective returned NaN at position {fly.position.tolist()}")
                fly.fitness = value
                fly.intensity = fitness_to_intensity(value)
            swarm.fes_used += len(swarm.fireflies)
            swarm.best = min(swarm.fireflies, key=lambda f: f.fitness).copy()
        if sentinels is not None and len(sentinels.positions):
            # re-baseline the probes after the invalidation pass, so the
            # references are wholly post-change even when the shift landed
            # mid-way through the probe loop above
            for k, probe in enumerate(sentinels.positions):
                value = float(objective.eval(probe))
                swarms[k % len(swarms)].fes_used += 1
                sentinels.values[k] = value
        if log is not None:
            log.append({"event": "change"})

    swarm_params = replace(params, pop_size=config.swarm_size)
    for swarm in swarms:
        if swarm.fes_used < swarm_params.max_fes:
            step(swarm, objective, swarm_params)

    # Exclusion: the better of an overlapping pair keeps its ground.
    victims: set[int] = set()
    for i in range(len(swarms)):
        for j in range(i + 1, len(swarms)):
            bi, bj = swarms[i].best, swarms[j].best
            if bi is None or bj is None or i in victims or j in victims:
                continue
            gap = float(np.linalg.norm(_normalized(bi.position, objective) - _normalized(bj.position, objective)))
            if gap < config.exclusion_radius:
                victims.add(j if bj.fitness >= bi.fitness else i)
    for idx in victims:
        _rerandomize(swarms[idx], objective)
        if log is not None:
            log.append({"event": "exclusion", "swarm": idx})

    # Anti-convergence: when everything has collapsed, re-diversify the worst.
    if len(swarms) > 1 and not victims:
        bests = [s.best for s in swarms]
        if all(b is not None for b in bests) and all(
            _swarm_diameter(s, objective) < config.anticonvergence_radius for s in swarms
        ):
            worst = max(range(len(swarms)), key=lambda k: bests[k].fitness)
            _rerandomize(swarms[worst], objective)
            if log is not None:
                log.append({"event": "anticonvergence", "swarm": worst})
    return swarms


def penalty_wrap(objective: Objective, spec: PenaltySpec) -> Objective:
    """Objective with constraint violations added as a weighted penalty.

    Feasible points keep their raw value exactly; the further a point
    violates a constraint, the larger its penalized value.  The declared
    optimum survives only if it is feasible.
    """
    raw = objective.eval

    def penalized(x: np.ndarray) -> float:
        total = raw(x)
        for g in spec.constraints:
            violation = float(g(x))
            if violation > 0.0:
                total += spec.weight * violation**spec.exponent
        return total

    optimum = objective.known_optimum
    if optimum is not None and any(float(g(optimum[0])) > 0.0 for g in spec.constraints):
        optimum = None
    return Objective(
        dim=objective.dim,
        lower=objective.lower,
        upper=objective.upper,
        eval=penalized,
        known_optimum=optimum,
        change_hook=objective.change_hook,
    )
