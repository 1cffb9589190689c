"""Exact matchings in general graphs.

The blossom solver itself is networkx's ``max_weight_matching``.  Everything
the learners rely on beyond "some maximum matching" is enforced here by an
integer re-weighting, so results are exact and reproducible:

* among maximum-weight matchings, one with the fewest edges wins;
* remaining ties go to the matching whose edge-indicator vector is
  lexicographically largest in sorted edge order, i.e. earlier edges are
  preferred.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import networkx as nx

from .core import Graph


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        canon = []
        for u, v, w in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) outside [0, {self.n})")
            if int(w) != w or w < 1:
                raise ValueError(f"edge ({u}, {v}) has weight {w}; weights must be integers >= 1")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append((key[0], key[1], int(w)))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @cached_property
    def weight_of(self) -> dict[tuple[int, int], int]:
        return {(u, v): w for u, v, w in self.edges}


@dataclass(frozen=True)
class Matching:
    edges: tuple[tuple[int, int], ...]
    total_weight: int = 0

    @property
    def cardinality(self) -> int:
        return len(self.edges)

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(x for e in self.edges for x in e)

    def partner(self, v: int) -> int | None:
        for a, b in self.edges:
            if a == v:
                return b
            if b == v:
                return a
        return None


def is_perfect(matching: Matching, n: int) -> bool:
    return len(matching.covered) == n


def _solve(n: int, weighted_edges: Iterable[tuple[int, int, int]]) -> tuple[tuple[int, int], ...]:
    edges = sorted((min(u, v), max(u, v), w) for u, v, w in weighted_edges)
    if not edges:
        return ()
    m = len(edges)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for rank, (u, v, w) in enumerate(edges):
        # (n+1)*w - 1 prefers fewer edges at equal weight; the low bits encode
        # the edge-order preference and can never outweigh one unit above them.
        g.add_edge(u, v, weight=((w * (n + 1) - 1) << m) + (1 << (m - 1 - rank)))
    mate = nx.max_weight_matching(g, maxcardinality=False, weight="weight")
    return tuple(sorted((min(a, b), max(a, b)) for a, b in mate))


def max_weight_matching(graph: WeightedGraph) -> Matching:
    chosen = _solve(graph.n, graph.edges)
    return Matching(chosen, sum(graph.weight_of[e] for e in chosen))


def max_cardinality_matching(graph: Graph) -> Matching:
    if graph.directed:
        raise ValueError("matching needs an undirected graph")
    chosen = _solve(graph.n, ((u, v, 1) for u, v in graph.edges))
    return Matching(chosen, len(chosen))


def format_weighted_graph(graph: WeightedGraph) -> str:
    """Debug dump: the system header plus one ``w u v weight`` line per edge."""
    lines = [f"syds {graph.n} undirected"]
    lines += [f"w {u} {v} {w}" for u, v, w in graph.edges]
    return "\n".join(lines) + "\n"
