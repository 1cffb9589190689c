"""True error, PAC experiments, and deciding consistency through a PAC learner."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Callable, NamedTuple

import numpy as np

from ._parallel import parallel_map
from .core import (
    ThresholdSystem,
    random_directed_system,
    random_matching_system,
    random_undirected_system,
    successor_many,
)
from .learners import LearnerRefusal, learn_directed_bounded, learn_known_graph, learn_matching
from .observations import (
    BernoulliDistribution,
    ConfigDistribution,
    EmpiricalDistribution,
    TrainingSet,
    UniformDistribution,
    is_consistent,
    make_rng,
    observations_deterministic,
    sample_training_set,
)
from .theory import BoundQuery, sample_complexity_upper

EXACT_LIMIT = 20
DEFAULT_MC_SAMPLES = 100_000

Learner = Callable[[TrainingSet], ThresholdSystem]


def _check_pair(S: ThresholdSystem, S_star: ThresholdSystem, dist: ConfigDistribution) -> None:
    if S.n != S_star.n:
        raise ValueError(f"systems differ in size: {S.n} vs {S_star.n}")
    if dist.n != S.n:
        raise ValueError(f"distribution is over {dist.n} vertices, systems have {S.n}")


def _disagree(S: ThresholdSystem, S_star: ThresholdSystem, configs: np.ndarray) -> np.ndarray:
    return np.any(successor_many(S, configs) != successor_many(S_star, configs), axis=1)


def true_error_exact(S: ThresholdSystem, S_star: ThresholdSystem, dist: ConfigDistribution) -> float:
    """Probability mass of configurations on which the two systems' successors differ."""
    _check_pair(S, S_star, dist)
    if isinstance(dist, (UniformDistribution, BernoulliDistribution)) and dist.n > EXACT_LIMIT:
        raise ValueError(f"exact error enumerates 2^n configurations; n={dist.n} > {EXACT_LIMIT}, use true_error_mc")
    if not isinstance(dist, (UniformDistribution, BernoulliDistribution, EmpiricalDistribution)):
        raise ValueError(f"unsupported distribution {dist!r}; use true_error_mc")
    if isinstance(dist, EmpiricalDistribution):
        configs = np.array(dist.configs, dtype=np.uint8)
        bad = _disagree(S, S_star, configs)
        return float(sum((w for w, b in zip(dist.weights, bad) if b), Fraction(0)))
    configs, weights = dist.support()
    bad = _disagree(S, S_star, configs)
    return float(min(1.0, weights[bad].sum()))


class McEstimate(NamedTuple):
    estimate: float
    stderr: float


def true_error_mc(
    S: ThresholdSystem, S_star: ThresholdSystem, dist: ConfigDistribution, samples: int, seed: int
) -> McEstimate:
    if samples < 1:
        raise ValueError("need at least one sample")
    _check_pair(S, S_star, dist)
    configs = dist.sample(make_rng(seed), samples)
    p = float(_disagree(S, S_star, configs).mean())
    return McEstimate(p, math.sqrt(p * (1 - p) / samples))


# -- PAC experiments ---------------------------------------------------------------

LEARNERS = ("matching", "directed", "known")


@dataclass(frozen=True)
class PacExperimentConfig:
    """One PAC experiment.

    ``truth`` fixes the ground-truth system for every trial; otherwise each
    trial draws one from the generator matching ``learner``, seeded with
    ``seed + trial``.  ``q=None`` means the undirected finite-class bound,
    rounded up.
    """

    n: int
    eps: float
    delta: float
    trials: int
    learner: str = "matching"
    seed: int = 0
    q: int | None = None
    max_indegree: int | None = None
    edge_prob: float = 0.5
    distribution: ConfigDistribution | None = None
    truth: ThresholdSystem | None = None
    mc_samples: int = DEFAULT_MC_SAMPLES

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not 0 < self.eps < 1 or not 0 < self.delta < 1:
            raise ValueError("eps and delta must lie strictly inside (0, 1)")
        if self.learner not in LEARNERS:
            raise ValueError(f"unknown learner {self.learner!r}; expected one of {LEARNERS}")
        if self.q is not None and self.q < 1:
            raise ValueError("q must be at least 1")
        if self.learner == "directed" and (self.max_indegree is None or self.max_indegree < 0):
            raise ValueError("directed learner needs a non-negative max_indegree")
        if self.distribution is not None and self.distribution.n != self.n:
            raise ValueError("distribution size does not match n")
        self._check_realizable()

    def _check_realizable(self) -> None:
        truth = self.truth
        if self.learner == "matching":
            if self.n % 2:
                raise ValueError("matching class needs an even n")
            if truth is not None:
                degrees = [truth.graph.degree(v) for v in range(truth.n)]
                if truth.graph.directed or any(d != 1 for d in degrees):
                    raise ValueError("ground truth is not a perfect-matching system")
        elif self.learner == "directed" and truth is not None:
            indeg = [len(nb) - 1 for nb in truth.graph.closed_neighborhoods]
            if not truth.graph.directed or max(indeg) > self.max_indegree:
                raise ValueError("ground truth is not a directed system within the in-degree bound")
        if truth is not None and truth.n != self.n:
            raise ValueError("ground truth size does not match n")

    @property
    def resolved_q(self) -> int:
        if self.q is not None:
            return self.q
        return math.ceil(sample_complexity_upper(BoundQuery(self.n, self.eps, self.delta)))

    @property
    def dist(self) -> ConfigDistribution:
        return self.distribution if self.distribution is not None else UniformDistribution(self.n)


@dataclass(frozen=True)
class PacReport:
    q: int
    errors: tuple[float | None, ...]  # None marks a refused trial
    eps: float
    delta: float
    wall_time: float = field(default=0.0, compare=False)

    @property
    def trials(self) -> int:
        return len(self.errors)

    @property
    def refusals(self) -> int:
        return sum(e is None for e in self.errors)

    @property
    def exceed_fraction(self) -> float:
        # A refusal yields no hypothesis, so it counts as a failed trial.
        return sum(e is None or e > self.eps for e in self.errors) / self.trials

    @property
    def tolerance(self) -> float:
        return self.delta + 3 * math.sqrt(self.delta * (1 - self.delta) / self.trials)


def _generate_truth(config: PacExperimentConfig, rng: np.random.Generator) -> ThresholdSystem:
    if config.truth is not None:
        return config.truth
    if config.learner == "matching":
        return random_matching_system(config.n, rng)
    if config.learner == "directed":
        return random_directed_system(config.n, config.max_indegree, rng)
    return random_undirected_system(config.n, config.edge_prob, rng)


def _learn(config: PacExperimentConfig, truth: ThresholdSystem, obs: TrainingSet) -> ThresholdSystem:
    if config.learner == "matching":
        return learn_matching(config.n, obs)
    if config.learner == "directed":
        return learn_directed_bounded(config.n, obs, config.max_indegree)
    return learn_known_graph(truth.graph, obs)


def _trial(config: PacExperimentConfig, trial: int) -> float | None:
    seed = config.seed + trial
    rng = make_rng(seed)
    truth = _generate_truth(config, rng)
    obs = sample_training_set(truth, config.dist, config.resolved_q, rng)
    try:
        hypothesis = _learn(config, truth, obs)
    except LearnerRefusal:
        return None
    if config.n <= EXACT_LIMIT or isinstance(config.dist, EmpiricalDistribution):
        return true_error_exact(hypothesis, truth, config.dist)
    return true_error_mc(hypothesis, truth, config.dist, config.mc_samples, seed).estimate


def run_pac_experiment(config: PacExperimentConfig, jobs: int = 1) -> PacReport:
    start = time.perf_counter()
    errors = parallel_map(partial(_trial, config), range(config.trials), jobs)
    return PacReport(config.resolved_q, tuple(errors), config.eps, config.delta, time.perf_counter() - start)


def format_pac_report(report: PacReport, per_trial: bool = False, wall_time: bool = False) -> str:
    lines = [
        f"q={report.q}",
        f"trials={report.trials}",
        f"eps={report.eps!r}",
        f"delta={report.delta!r}",
        f"exceed_fraction={report.exceed_fraction!r}",
        f"tolerance={report.tolerance!r}",
        f"refusals={report.refusals}",
    ]
    done = [e for e in report.errors if e is not None]
    lines.append(f"mean_error={(sum(done) / len(done)) if done else float('nan')!r}")
    lines.append(f"max_error={max(done) if done else float('nan')!r}")
    if wall_time:
        lines.append(f"wall_time={report.wall_time:.3f}")
    if per_trial:
        lines.append("trial\terror")
        lines += [f"{i}\t{'refused' if e is None else repr(e)}" for i, e in enumerate(report.errors)]
    return "\n".join(lines) + "\n"


# -- consistency through PAC learning ------------------------------------------------


def consistency_direct(obs: TrainingSet, learner: Learner) -> bool:
    """Run the learner on ``obs`` itself and check its answer."""
    if not observations_deterministic(obs):
        return False
    try:
        return is_consistent(learner(obs), obs)
    except LearnerRefusal:
        return False


def pac_protocol_parameters(obs: TrainingSet) -> tuple[EmpiricalDistribution, float, float]:
    """Uniform distribution over the observed predecessors, ``eps = 1/(2q)`` and ``delta = 0.1``."""
    dist = EmpiricalDistribution.uniform_over(obs.predecessors.tolist())
    return dist, 1 / (2 * obs.q), 0.1


def consistency_via_pac(obs: TrainingSet, learner: Learner, repeats: int, seed: int) -> bool:
    """Decide consistency by PAC-learning under the uniform distribution over ``obs``.

    Each repeat trains on a fresh sample of ``q`` predecessors drawn from that
    distribution (labelled by ``obs``) and accepts iff the hypothesis fits
    every observation.  Any accepting repeat answers yes; a yes is always
    certified, so extra repeats can only turn a no into a yes.
    """
    if repeats < 1:
        raise ValueError("need at least one repeat")
    if obs.q == 0:
        return True
    if not observations_deterministic(obs):
        return False
    dist, _eps, _delta = pac_protocol_parameters(obs)
    label = {c: s for c, s in obs.pairs}
    for r in range(repeats):
        pre = dist.sample(make_rng(seed + r), obs.q)
        sample = TrainingSet(obs.n, tuple((c, label[c]) for c in map(tuple, pre.tolist())))
        try:
            hypothesis = learner(sample)
        except LearnerRefusal:
            continue
        if is_consistent(hypothesis, obs):
            return True
    return False
