"""Consistent learners for threshold systems whose graph is unknown.

Every learner either returns a :class:`ThresholdSystem` that reproduces all
observations, or raises :class:`LearnerRefusal`.  A refusal is an answer, not
a failure: it carries a machine-readable :class:`RefusalReason` saying whether
no system in the class can exist (a "No" instance) or the learner does not
cover the instance.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import partial
from itertools import combinations
from typing import Iterable

import numpy as np

from ._parallel import parallel_map
from .core import Graph, ThresholdSystem, max_canonical_threshold
from .matching import WeightedGraph, is_perfect, max_cardinality_matching, max_weight_matching
from .observations import (
    TrainingSet,
    h_value,
    is_consistent,
    l_value,
    observations_deterministic,
)


class RefusalReason(str, enum.Enum):
    CONTRADICTORY = "contradictory observations"
    ODD_VERTEX_COUNT = "odd vertex count admits no perfect matching"
    NO_PERFECT_MATCHING = "no perfect matching in compatibility graph"
    NO_NEIGHBORHOOD = "no in-neighbour set within the in-degree bound"
    THRESHOLD_GAP = "no threshold separates firing and non-firing scores"
    NEEDS_TWO_EDGES = "some vertex needs at least two missing edges"
    UNCOVERED = "maximum-weight matching leaves a deficient vertex uncovered"
    BUDGET_EXCEEDED = "missing edges required exceed the budget k"
    NO_SYSTEM_IN_CLASS = "no consistent system in the class"


class LearnerRefusal(Exception):
    def __init__(self, reason: RefusalReason, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(reason.value + (f": {detail}" if detail else ""))


class UnsupportedInstance(ValueError):
    """The instance lies outside what the requested routine handles."""


def _require_deterministic(obs: TrainingSet) -> None:
    if not observations_deterministic(obs):
        raise LearnerRefusal(RefusalReason.CONTRADICTORY)


def _checked(system: ThresholdSystem, obs: TrainingSet) -> ThresholdSystem:
    if not is_consistent(system, obs):
        raise RuntimeError("learner built a hypothesis that contradicts its observations")
    return system


# -- perfect matchings -------------------------------------------------------------


def _monotone_in(scores: np.ndarray, targets: np.ndarray) -> bool:
    # For all i, j: scores[i] <= scores[j] implies targets[i] <= targets[j].
    lo: dict[int, int] = {}
    hi: dict[int, int] = {}
    for s in np.unique(scores):
        t = targets[scores == s]
        lo[int(s)], hi[int(s)] = int(t.min()), int(t.max())
    keys = sorted(lo)
    for i, a in enumerate(keys):
        for b in keys[i:]:
            if hi[a] > lo[b]:
                return False
    return True


def threshold_compatible(obs: TrainingSet, u: int, v: int) -> bool:
    if u == v:
        raise ValueError("threshold compatibility needs two distinct vertices")
    for x in (u, v):
        if not 0 <= x < obs.n:
            raise ValueError(f"vertex {x} out of range [0, {obs.n})")
    if obs.q == 0:
        return True
    pre, post = obs.predecessors, obs.successors
    pair_scores = pre[:, u].astype(np.int32) + pre[:, v]
    return _monotone_in(pair_scores, post[:, u]) and _monotone_in(pair_scores, post[:, v])


def compatibility_graph(n: int, obs: TrainingSet) -> Graph:
    if obs.n != n:
        raise ValueError(f"observations are over {obs.n} vertices, not {n}")
    edges = [(u, v) for u, v in combinations(range(n), 2) if threshold_compatible(obs, u, v)]
    return Graph.from_edges(n, edges)


def learn_matching(n: int, obs: TrainingSet) -> ThresholdSystem:
    """Consistent learner for systems whose graph is a perfect matching.

    A consistent perfect-matching system exists exactly when the
    compatibility graph has a perfect matching, so a refusal here is a
    correct "No".  Each vertex gets the lowest score over its matched pair
    among observations where it fires, or 3 (never fires) if it never does.
    """
    if obs.n != n:
        raise ValueError(f"observations are over {obs.n} vertices, not {n}")
    _require_deterministic(obs)
    if n % 2:
        raise LearnerRefusal(RefusalReason.ODD_VERTEX_COUNT, f"n={n}")
    compat = compatibility_graph(n, obs)
    matching = max_cardinality_matching(compat)
    if not is_perfect(matching, n):
        raise LearnerRefusal(
            RefusalReason.NO_PERFECT_MATCHING, f"maximum matching covers {len(matching.covered)} of {n}"
        )
    graph = Graph.from_edges(n, matching.edges)
    pre, post = obs.predecessors, obs.successors
    taus = []
    for v in range(n):
        u = matching.partner(v)
        fired = post[:, v] == 1
        if not fired.any():
            taus.append(3)
        else:
            taus.append(int((pre[fired, u].astype(np.int32) + pre[fired, v]).min()))
    return _checked(ThresholdSystem(graph, tuple(taus)), obs)


# -- bounded in-degree directed systems ----------------------------------------------


def threshold_consistent_via(obs: TrainingSet, v: int, Y: Iterable[int]) -> bool:
    Y = tuple(Y)
    if v in Y:
        raise ValueError(f"vertex {v} may not appear in its own in-neighbour set")
    nbhd = (v,) + Y
    return l_value(obs, v, nbhd) < h_value(obs, v, nbhd)


def _directed_neighbourhood(obs: TrainingSet, max_indegree: int, v: int) -> tuple[tuple[int, ...], int] | None:
    others = [u for u in range(obs.n) if u != v]
    for size in range(min(max_indegree, len(others)) + 1):
        for Y in combinations(others, size):
            nbhd = (v,) + Y
            low, high = l_value(obs, v, nbhd), h_value(obs, v, nbhd)
            if low < high:
                return Y, min(high, size + 2)
    return None


def learn_directed_bounded(n: int, obs: TrainingSet, max_indegree: int, jobs: int = 1) -> ThresholdSystem:
    """Consistent learner for directed systems with in-degree at most ``max_indegree``.

    Vertices are solved independently.  Each takes the first in-neighbour set
    (smallest size first, then lexicographic) over which its firing and
    non-firing observations are separated by score, and the lowest firing
    score as threshold.
    """
    if obs.n != n:
        raise ValueError(f"observations are over {obs.n} vertices, not {n}")
    if max_indegree < 0:
        raise ValueError("in-degree bound must be non-negative")
    _require_deterministic(obs)
    found = parallel_map(partial(_directed_neighbourhood, obs, max_indegree), range(n), jobs)
    edges, taus = [], []
    for v, hit in enumerate(found):
        if hit is None:
            raise LearnerRefusal(RefusalReason.NO_NEIGHBORHOOD, f"vertex {v}, bound {max_indegree}")
        Y, tau = hit
        edges += [(u, v) for u in Y]
        taus.append(tau)
    graph = Graph.from_edges(n, edges, directed=True)
    return _checked(ThresholdSystem(graph, tuple(taus)), obs)


# -- known and partially known graphs ------------------------------------------------


def learn_known_graph(graph: Graph, obs: TrainingSet) -> ThresholdSystem:
    if obs.n != graph.n:
        raise ValueError(f"observations are over {obs.n} vertices, graph has {graph.n}")
    _require_deterministic(obs)
    taus = []
    for v in range(graph.n):
        nbhd = graph.closed_neighborhood(v)
        low, high = l_value(obs, v, nbhd), h_value(obs, v, nbhd)
        if low >= high:
            raise LearnerRefusal(RefusalReason.THRESHOLD_GAP, f"vertex {v}: l={low}, h={high}")
        taus.append(high)
    return _checked(ThresholdSystem.canonical(graph, taus), obs)


@dataclass(frozen=True)
class PartialInstance:
    g_obs: Graph
    k: int
    cap: int | None = 1

    def __post_init__(self):
        if self.g_obs.directed:
            raise ValueError("the observed graph must be undirected")
        if self.k < 0:
            raise ValueError("missing-edge budget must be non-negative")
        if self.cap is not None and self.cap < 1:
            raise ValueError("per-vertex cap must be at least 1")
        if self.cap == 1 and self.k > self.g_obs.n // 2:
            raise ValueError(f"with one missing edge per vertex, k is at most {self.g_obs.n // 2}")


@dataclass(frozen=True)
class RepairProblem:
    """Intermediate state of the one-missing-edge-per-vertex learner."""

    low: tuple[int, ...]
    high: tuple[int, ...]
    tight: frozenset[int]  # l == h: exactly one more edge needed
    broken: frozenset[int]  # l > h: two or more needed
    weighted: WeightedGraph

    @property
    def t(self) -> int:
        return len(self.tight)


def repair_problem(instance: PartialInstance, obs: TrainingSet) -> RepairProblem:
    g = instance.g_obs
    n = g.n
    low = tuple(l_value(obs, v, g.closed_neighborhood(v)) for v in range(n))
    high = tuple(h_value(obs, v, g.closed_neighborhood(v)) for v in range(n))
    tight = frozenset(v for v in range(n) if low[v] == high[v])
    broken = frozenset(v for v in range(n) if low[v] > high[v])
    t = len(tight)

    def fixed_by(v: int, extra: int) -> bool:
        nbhd = g.closed_neighborhood(v) + (extra,)
        return l_value(obs, v, nbhd) < h_value(obs, v, nbhd)

    edges = []
    for u, v in combinations(range(n), 2):
        if g.has_edge(u, v) or (u not in tight and v not in tight):
            continue
        if u in broken or v in broken:
            continue
        if fixed_by(u, v) and fixed_by(v, u):
            both = u in tight and v in tight
            edges.append((u, v, 2 * t + 1 if both else t))
    return RepairProblem(low, high, tight, broken, WeightedGraph(n, tuple(edges)))


def learn_partial(instance: PartialInstance, obs: TrainingSet, fallback: bool = False) -> ThresholdSystem:
    """Learn a supergraph of ``instance.g_obs`` with at most ``k`` added edges.

    Only the case of at most one missing edge per vertex has an efficient
    algorithm.  Other caps raise :class:`UnsupportedInstance` unless
    ``fallback`` is set, in which case the exhaustive oracle is used.
    """
    g = instance.g_obs
    if obs.n != g.n:
        raise ValueError(f"observations are over {obs.n} vertices, graph has {g.n}")
    if instance.cap != 1:
        if not fallback:
            raise UnsupportedInstance("only one missing edge per vertex is supported efficiently")
        from .bruteforce import brute_force_consistent

        return brute_force_consistent(
            g.n, obs, "supergraph", g_obs=g, k=instance.k, cap=instance.cap, limit=max(8, g.n)
        )
    _require_deterministic(obs)
    problem = repair_problem(instance, obs)
    if problem.broken:
        raise LearnerRefusal(RefusalReason.NEEDS_TWO_EDGES, f"vertices {sorted(problem.broken)}")
    matching = max_weight_matching(problem.weighted)
    missed = problem.tight - matching.covered
    if missed:
        raise LearnerRefusal(RefusalReason.UNCOVERED, f"vertices {sorted(missed)}")
    if matching.cardinality > instance.k:
        raise LearnerRefusal(
            RefusalReason.BUDGET_EXCEEDED, f"{matching.cardinality} edges needed, k={instance.k}"
        )
    repaired = g.union(matching.edges)
    taus = []
    for v in range(g.n):
        nbhd = repaired.closed_neighborhood(v)
        low, high = l_value(obs, v, nbhd), h_value(obs, v, nbhd)
        if low >= high:
            raise RuntimeError(f"vertex {v} still has no threshold after repair")
        taus.append(min(high, max_canonical_threshold(repaired, v)))
    return _checked(ThresholdSystem(repaired, tuple(taus)), obs)
