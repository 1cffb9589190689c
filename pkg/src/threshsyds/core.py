"""Graphs, configurations and threshold systems with exact synchronous dynamics.

Vertices are the integers ``0..n-1`` and a configuration is a tuple of 0/1
ints indexed by vertex.  A vertex fires (next state 1) when the number of
state-1 vertices in its closed neighbourhood reaches its threshold; for a
directed graph the closed neighbourhood is the vertex plus its in-neighbours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

Configuration = tuple[int, ...]


def as_config(bits: Sequence[int] | str, n: int | None = None) -> Configuration:
    """Normalise a bitstring or 0/1 sequence into a configuration tuple."""
    if isinstance(bits, str):
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"configuration {bits!r} is not a bitstring")
        config = tuple(int(ch) for ch in bits)
    else:
        config = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in config):
            raise ValueError(f"configuration {config!r} has entries outside {{0,1}}")
    if n is not None and len(config) != n:
        raise ValueError(f"configuration has length {len(config)}, expected {n}")
    return config


def format_config(config: Sequence[int]) -> str:
    return "".join("1" if b else "0" for b in config)


def score(config: Sequence[int], vertex_set: Iterable[int]) -> int:
    """Number of vertices of ``vertex_set`` that are in state 1 under ``config``."""
    total = 0
    n = len(config)
    for v in vertex_set:
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} out of range for configuration of length {n}")
        total += config[v]
    return total


@dataclass(frozen=True)
class Graph:
    """Simple graph on ``0..n-1``.

    The raw constructor stores edges as given so that malformed graphs can be
    represented and reported by :func:`validate_system`.  Use
    :meth:`from_edges` to get the canonical form (undirected pairs ordered,
    duplicates dropped, edges sorted).
    """

    n: int
    edges: tuple[tuple[int, int], ...] = ()
    directed: bool = False

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> Graph:
        seen = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            seen.add((u, v) if directed else (min(u, v), max(u, v)))
        return cls(n, tuple(sorted(seen)), directed)

    @classmethod
    def empty(cls, n: int, directed: bool = False) -> Graph:
        return cls(n, (), directed)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        if self.directed:
            return (u, v) in self.edge_set
        return (min(u, v), max(u, v)) in self.edge_set

    @cached_property
    def closed_neighborhoods(self) -> tuple[tuple[int, ...], ...]:
        """N+(v) per vertex: v plus its neighbours (or in-neighbours), sorted."""
        nbrs: list[set[int]] = [{v} for v in range(self.n)]
        for u, v in self.edges:
            if 0 <= u < self.n and 0 <= v < self.n:
                nbrs[v].add(u)
                if not self.directed:
                    nbrs[u].add(v)
        return tuple(tuple(sorted(s)) for s in nbrs)

    def closed_neighborhood(self, v: int) -> tuple[int, ...]:
        return self.closed_neighborhoods[v]

    def degree(self, v: int) -> int:
        """Degree (undirected) or in-degree (directed)."""
        return len(self.closed_neighborhoods[v]) - 1

    @property
    def average_degree(self) -> float:
        if self.n == 0:
            return 0.0
        factor = 1 if self.directed else 2
        return factor * len(self.edges) / self.n

    def union(self, extra: Iterable[tuple[int, int]]) -> Graph:
        return Graph.from_edges(self.n, list(self.edges) + list(extra), self.directed)

    @cached_property
    def inclusion_matrix(self) -> np.ndarray:
        """Row v is the indicator vector of N+(v)."""
        mat = np.zeros((self.n, self.n), dtype=np.int32)
        for v, nbhd in enumerate(self.closed_neighborhoods):
            mat[v, list(nbhd)] = 1
        return mat


def max_canonical_threshold(graph: Graph, v: int) -> int:
    """The canonical "never fires" threshold |N+(v)| + 1."""
    return len(graph.closed_neighborhood(v)) + 1


@dataclass(frozen=True)
class ThresholdSystem:
    graph: Graph
    thresholds: tuple[int, ...]

    @classmethod
    def canonical(cls, graph: Graph, thresholds: Sequence[int]) -> ThresholdSystem:
        """Build a system with every threshold clamped to at most |N+(v)| + 1.

        Clamping from above never changes the dynamics because a score over
        N+(v) is at most |N+(v)|.
        """
        if len(thresholds) != graph.n:
            raise ValueError(f"{len(thresholds)} thresholds for {graph.n} vertices")
        clamped = tuple(
            min(int(tau), max_canonical_threshold(graph, v)) for v, tau in enumerate(thresholds)
        )
        return cls(graph, clamped)

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def _tau_array(self) -> np.ndarray:
        return np.asarray(self.thresholds, dtype=np.int64)

    def successor(self, config: Sequence[int]) -> Configuration:
        return successor(self, config)

    def successor_many(self, configs: np.ndarray) -> np.ndarray:
        return successor_many(self, configs)


def _check_length(system: ThresholdSystem, length: int) -> None:
    if length != system.graph.n:
        raise ValueError(f"configuration has length {length}, system has {system.graph.n} vertices")
    if len(system.thresholds) != system.graph.n:
        raise ValueError("system has a threshold vector of the wrong length")


def successor(system: ThresholdSystem, config: Sequence[int]) -> Configuration:
    _check_length(system, len(config))
    return tuple(
        1 if score(config, nbhd) >= tau else 0
        for nbhd, tau in zip(system.graph.closed_neighborhoods, system.thresholds)
    )


def successor_many(system: ThresholdSystem, configs: np.ndarray) -> np.ndarray:
    """Vectorised successor over the rows of a ``(m, n)`` 0/1 array."""
    configs = np.asarray(configs)
    if configs.ndim != 2:
        raise ValueError("expected a 2-d array of configurations")
    _check_length(system, configs.shape[1])
    scores = configs.astype(np.int32) @ system.graph.inclusion_matrix.T
    return (scores >= system._tau_array).astype(np.uint8)


def trajectory(system: ThresholdSystem, config: Sequence[int], steps: int) -> list[Configuration]:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    current = as_config(config)
    _check_length(system, len(current))
    out = [current]
    for _ in range(steps):
        current = successor(system, current)
        out.append(current)
    return out


def validate_system(system: ThresholdSystem) -> list[str]:
    """Return every invariant violation of ``system``; an empty list means ok."""
    problems: list[str] = []
    graph = system.graph
    n = graph.n
    if n < 1:
        problems.append("vertex count must be at least 1")
    if len(system.thresholds) != n:
        problems.append(f"threshold vector has length {len(system.thresholds)}, expected {n}")
    seen = set()
    for u, v in graph.edges:
        if u == v:
            problems.append(f"self-loop at vertex {u}")
            continue
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            continue
        if not graph.directed and u > v:
            problems.append(f"undirected edge ({u}, {v}) not stored as (smaller, larger)")
        key = (u, v) if graph.directed else (min(u, v), max(u, v))
        if key in seen:
            problems.append(f"duplicate edge ({u}, {v})")
        seen.add(key)
    if len(system.thresholds) == n:
        for v, tau in enumerate(system.thresholds):
            if tau < 0:
                problems.append(f"vertex {v}: threshold below 0")
            elif tau > max_canonical_threshold(graph, v):
                problems.append(
                    f"vertex {v}: threshold {tau} above canonical maximum {max_canonical_threshold(graph, v)}"
                )
    return problems


# -- random ground-truth systems -------------------------------------------------


def random_thresholds(graph: Graph, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(rng.integers(0, max_canonical_threshold(graph, v) + 1)) for v in range(graph.n))


def random_matching_system(n: int, rng: np.random.Generator) -> ThresholdSystem:
    if n % 2:
        raise ValueError("a perfect matching needs an even vertex count")
    order = rng.permutation(n)
    edges = [(int(order[i]), int(order[i + 1])) for i in range(0, n, 2)]
    graph = Graph.from_edges(n, edges)
    return ThresholdSystem(graph, random_thresholds(graph, rng))


def random_directed_system(n: int, max_indegree: int, rng: np.random.Generator) -> ThresholdSystem:
    edges = []
    for v in range(n):
        others = [u for u in range(n) if u != v]
        k = int(rng.integers(0, min(max_indegree, len(others)) + 1))
        for u in rng.choice(others, size=k, replace=False) if k else []:
            edges.append((int(u), v))
    graph = Graph.from_edges(n, edges, directed=True)
    return ThresholdSystem(graph, random_thresholds(graph, rng))


def random_undirected_system(n: int, edge_prob: float, rng: np.random.Generator) -> ThresholdSystem:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < edge_prob]
    graph = Graph.from_edges(n, edges)
    return ThresholdSystem(graph, random_thresholds(graph, rng))


# -- text format -----------------------------------------------------------------


def format_system(system: ThresholdSystem) -> str:
    graph = system.graph
    lines = [f"syds {graph.n} {'directed' if graph.directed else 'undirected'}"]
    lines += [f"e {u} {v}" for u, v in graph.edges]
    lines += [f"t {v} {tau}" for v, tau in enumerate(system.thresholds)]
    return "\n".join(lines) + "\n"


class FormatError(ValueError):
    """Malformed text input; ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno is not None else message)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"expected an integer, got {token!r}", lineno) from None


def parse_graph(text: str, require_thresholds: bool = False) -> tuple[Graph, dict[int, int]]:
    """Parse the system format, returning the graph and any ``t`` lines."""
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty system file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "syds" or parts[2] not in ("undirected", "directed"):
        raise FormatError("header must be 'syds <n> <undirected|directed>'", lineno)
    n = _parse_int(parts[1], lineno)
    if n < 1:
        raise FormatError("vertex count must be at least 1", lineno)
    directed = parts[2] == "directed"
    edges = []
    taus: dict[int, int] = {}
    for lineno, line in lines[1:]:
        parts = line.split()
        if parts[0] == "e" and len(parts) == 3:
            u, v = _parse_int(parts[1], lineno), _parse_int(parts[2], lineno)
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"invalid edge ({u}, {v})", lineno)
            edges.append((u, v))
        elif parts[0] == "t" and len(parts) == 3:
            v, tau = _parse_int(parts[1], lineno), _parse_int(parts[2], lineno)
            if not 0 <= v < n:
                raise FormatError(f"threshold for unknown vertex {v}", lineno)
            if v in taus:
                raise FormatError(f"duplicate threshold for vertex {v}", lineno)
            taus[v] = tau
        else:
            raise FormatError(f"unrecognised line {line!r}", lineno)
    keys = [(u, v) if directed else (min(u, v), max(u, v)) for u, v in edges]
    if len(set(keys)) != len(keys):
        raise FormatError("duplicate edge")
    if require_thresholds and len(taus) != n:
        missing = sorted(set(range(n)) - set(taus))
        raise FormatError(f"missing thresholds for vertices {missing}")
    return Graph.from_edges(n, edges, directed), taus


def parse_system(text: str) -> ThresholdSystem:
    graph, taus = parse_graph(text, require_thresholds=True)
    system = ThresholdSystem(graph, tuple(taus[v] for v in range(graph.n)))
    problems = validate_system(system)
    if problems:
        raise FormatError("; ".join(problems))
    return system
