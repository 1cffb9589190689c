"""Exhaustive consistency oracle over small hypothesis classes.

For each vertex a table is built over every possible neighbour set, recording
whether some admissible threshold reproduces all observations at that vertex
(found by sweeping thresholds and simulating, not via the l/h shortcut).  A
graph is consistent iff every vertex's neighbour set passes, so the search
over graphs only does table lookups.  Graph classes are enumerated in a fixed
canonical order and the first consistent system is returned.

Canonical orders:

* undirected classes: edge-indicator vector over pairs (0,1), (0,2), ...,
  (n-2,n-1), lexicographically smallest first (sparser on early pairs);
* perfect matchings: sorted edge lists in lexicographic order;
* trees: Pruefer sequences in lexicographic order;
* supergraphs: fewer added edges first, then lexicographic;
* directed: per vertex, in-neighbour bitmask in increasing integer order.
"""

from __future__ import annotations

from functools import partial
from itertools import combinations, product

import numpy as np

from ._parallel import parallel_map
from .core import Graph, ThresholdSystem
from .learners import LearnerRefusal, RefusalReason, UnsupportedInstance
from .observations import TrainingSet

CLASSES = (
    "undirected-threshold",
    "undirected-threshold2",
    "tree-threshold2",
    "matching-threshold",
    "directed-threshold",
    "supergraph",
)

DEFAULT_LIMITS = {
    "undirected-threshold": 8,
    "undirected-threshold2": 8,
    "tree-threshold2": 8,
    "matching-threshold": 12,
    "directed-threshold": 12,
    "supergraph": 8,
}


def _bit_matrix(n: int) -> np.ndarray:
    masks = np.arange(2**n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(np.int32)


def vertex_table(obs: TrainingSet, v: int, fixed_tau: int | None = None) -> np.ndarray:
    """Best threshold for ``v`` per in-neighbour bitmask, or -1 if none works.

    Entry ``mask`` refers to the closed neighbourhood ``{v} | mask``; masks
    containing ``v`` itself are always -1.  Without ``fixed_tau`` the
    thresholds swept are ``0..|N+|+1`` and the largest consistent one wins.
    """
    n = obs.n
    bits = _bit_matrix(n)
    include = bits.copy()
    include[:, v] = 1
    best = np.full(2**n, -1, dtype=np.int64)
    if obs.q == 0:
        scores = np.zeros((0, 2**n), dtype=np.int32)
    else:
        scores = obs.predecessors.astype(np.int32) @ include.T
    fire = obs.successors[:, v].astype(bool)[:, None] if obs.q else np.zeros((0, 1), dtype=bool)
    top = include.sum(axis=1) + 1
    taus = [fixed_tau] if fixed_tau is not None else range(n + 2)
    for tau in taus:
        ok = np.all((scores >= tau) == fire, axis=0)
        if fixed_tau is None:
            ok &= tau <= top
        best[ok] = tau
    best[bits[:, v] == 1] = -1
    return best


def _tables(obs: TrainingSet, fixed_tau: int | None, jobs: int) -> list[np.ndarray]:
    return parallel_map(partial(vertex_table, obs, fixed_tau=fixed_tau), range(obs.n), jobs)


def _system_from_masks(n: int, masks: list[int], tables: list[np.ndarray], directed: bool) -> ThresholdSystem:
    edges = []
    for v, mask in enumerate(masks):
        for u in range(n):
            if mask >> u & 1:
                if directed:
                    edges.append((u, v))
                elif u < v:
                    edges.append((u, v))
    graph = Graph.from_edges(n, edges, directed=directed)
    return ThresholdSystem(graph, tuple(int(tables[v][m]) for v, m in enumerate(masks)))


def _search_undirected(n: int, tables: list[np.ndarray]) -> list[int] | None:
    allowed = [[int(m) for m in np.flatnonzero(t >= 0)] for t in tables]
    # For vertex v the bits below v are already fixed when v is reached;
    # candidates are grouped by that fixed prefix and ordered lexicographically
    # over the remaining bits (lower vertex ids first, absent before present).
    groups: list[dict[int, list[int]]] = []
    prefixes: list[list[set[int]]] = []
    for v in range(n):
        low = (1 << v) - 1
        by_prefix: dict[int, list[int]] = {}
        for m in allowed[v]:
            by_prefix.setdefault(m & low, []).append(m)
        for lst in by_prefix.values():
            lst.sort(key=lambda m: [(m >> u) & 1 for u in range(v + 1, n)])
        groups.append(by_prefix)
        prefixes.append([{m & ((1 << (d + 1)) - 1) for m in allowed[v]} for d in range(n)])

    adj = [0] * n

    def place(v: int) -> bool:
        if v == n:
            return True
        for mask in groups[v].get(adj[v], ()):
            saved = adj[:]
            ok = True
            for w in range(v + 1, n):
                if mask >> w & 1:
                    adj[w] |= 1 << v
                if (adj[w] & ((1 << (v + 1)) - 1)) not in prefixes[w][v]:
                    ok = False
                    break
            if ok:
                adj[v] = mask
                if place(v + 1):
                    return True
            adj[:] = saved
        return False

    return adj if place(0) else None


def _perfect_matchings(vertices: tuple[int, ...]):
    if not vertices:
        yield ()
        return
    first, rest = vertices[0], vertices[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for tail in _perfect_matchings(remaining):
            yield ((first, partner),) + tail


def _prufer_trees(n: int):
    if n == 1:
        yield ()
        return
    if n == 2:
        yield ((0, 1),)
        return
    for seq in product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = next(i for i in range(n) if degree[i] == 1)
            edges.append((min(leaf, x), max(leaf, x)))
            degree[leaf] -= 1
            degree[x] -= 1
        u, w = [i for i in range(n) if degree[i] == 1]
        edges.append((u, w))
        yield tuple(edges)


def _masks_of(n: int, edges) -> list[int]:
    masks = [0] * n
    for u, v in edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _first_in(n: int, candidates, tables: list[np.ndarray]) -> list[int] | None:
    for edges in candidates:
        masks = _masks_of(n, edges)
        if all(tables[v][masks[v]] >= 0 for v in range(n)):
            return masks
    return None


def _supergraphs(g_obs: Graph, k: int, cap: int | None):
    n = g_obs.n
    non_edges = [(u, v) for u, v in combinations(range(n), 2) if not g_obs.has_edge(u, v)]
    for d in range(min(k, len(non_edges)) + 1):
        for extra in combinations(non_edges, d):
            if cap is not None:
                count = [0] * n
                for u, v in extra:
                    count[u] += 1
                    count[v] += 1
                if max(count, default=0) > cap:
                    continue
            yield g_obs.edges + extra


def brute_force_consistent(
    n: int,
    obs: TrainingSet,
    cls: str,
    *,
    delta: int | None = None,
    g_obs: Graph | None = None,
    k: int | None = None,
    cap: int | None = None,
    limit: int | None = None,
    jobs: int = 1,
) -> ThresholdSystem:
    """First consistent system of class ``cls`` in canonical order.

    Raises :class:`LearnerRefusal` exactly when the class has no consistent
    system, and :class:`UnsupportedInstance` when ``n`` exceeds ``limit``.
    """
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}; expected one of {CLASSES}")
    if obs.n != n:
        raise ValueError(f"observations are over {obs.n} vertices, not {n}")
    limit = DEFAULT_LIMITS[cls] if limit is None else limit
    if n > limit:
        raise UnsupportedInstance(f"n={n} exceeds the enumeration limit {limit} for {cls}")

    fixed = 2 if cls in ("undirected-threshold2", "tree-threshold2") else None
    tables = _tables(obs, fixed, jobs)

    if cls == "directed-threshold":
        if delta is None or delta < 0:
            raise ValueError("directed class needs a non-negative in-degree bound")
        masks = []
        for v in range(n):
            hit = next(
                (m for m in np.flatnonzero(tables[v] >= 0) if bin(int(m)).count("1") <= delta), None
            )
            if hit is None:
                raise LearnerRefusal(RefusalReason.NO_SYSTEM_IN_CLASS, f"vertex {v}")
            masks.append(int(hit))
        return _system_from_masks(n, masks, tables, directed=True)

    if cls in ("undirected-threshold", "undirected-threshold2"):
        masks = _search_undirected(n, tables)
    elif cls == "matching-threshold":
        masks = None if n % 2 else _first_in(n, _perfect_matchings(tuple(range(n))), tables)
    elif cls == "tree-threshold2":
        masks = _first_in(n, _prufer_trees(n), tables)
    else:
        if g_obs is None or k is None:
            raise ValueError("supergraph class needs g_obs and k")
        if g_obs.n != n or g_obs.directed:
            raise ValueError("g_obs must be an undirected graph on n vertices")
        masks = _first_in(n, _supergraphs(g_obs, k, cap), tables)

    if masks is None:
        raise LearnerRefusal(RefusalReason.NO_SYSTEM_IN_CLASS, cls)
    return _system_from_masks(n, masks, tables, directed=False)
