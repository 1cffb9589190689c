"""Sample-complexity bounds and the quadratic shattered set.

All logarithms are natural.  Switching to base 2 rescales every bound by a
constant, which the free constants ``c`` and ``c1`` absorb.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from itertools import product

import numpy as np

from ._parallel import parallel_map
from .core import Configuration, Graph, ThresholdSystem, successor_many


@dataclass(frozen=True)
class BoundQuery:
    n: int
    eps: float
    delta: float
    d_avg: float | None = None
    k: int | None = None
    m: int | None = None
    c: float = 1.0
    c1: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie strictly inside (0, 1)")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie strictly inside (0, 1)")
        if self.d_avg is not None and self.d_avg < 0:
            raise ValueError("average degree must be non-negative")
        for name in ("k", "m"):
            val = getattr(self, name)
            if val is not None and val < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.c <= 0 or self.c1 <= 0:
            raise ValueError("constants c and c1 must be positive")


def sample_complexity_upper(q: BoundQuery) -> float:
    """Finite-class bound for undirected threshold systems, in its printed form
    ``(n^2 + n ln n + ln(1/delta)) / eps``."""
    n = q.n
    return (n * n + n * math.log(n) + math.log(1 / q.delta)) / q.eps


def sample_complexity_upper_tight(q: BoundQuery) -> float:
    """Same bound with ``ln |H| = C(n,2) ln 2 + n ln n`` instead of ``n^2 + n ln n``."""
    n = q.n
    return (math.comb(n, 2) * math.log(2) + n * math.log(n) + math.log(1 / q.delta)) / q.eps


def _missing_edge_term(count: int, n: int) -> float:
    if count == 0:
        return 0.0
    return count * math.log(n * n / count)


def sample_complexity_partial(q: BoundQuery) -> float:
    if q.d_avg is None or q.k is None:
        raise ValueError("partial bound needs d_avg and k")
    if q.k > q.n * q.n:
        raise ValueError("k cannot exceed n^2")
    return (
        q.n * math.log(q.d_avg + 3) + q.c * _missing_edge_term(q.k, q.n) + math.log(1 / q.delta)
    ) / q.eps


def sample_complexity_m_edges(q: BoundQuery) -> float:
    """Bound when only an edge budget ``m`` is known.

    Has no ``n ln 3`` term, even though the partial bound with an edgeless
    observed graph would carry one.
    """
    if q.m is None:
        raise ValueError("edge-budget bound needs m")
    if q.m > q.n * q.n:
        raise ValueError("m cannot exceed n^2")
    return (q.c * _missing_edge_term(q.m, q.n) + math.log(1 / q.delta)) / q.eps


def ndim_lower_bound(n: int) -> int:
    if n < 2:
        raise ValueError("need n >= 2 for a two-sided partition")
    return n * n // 4


def ndim_sample_lower_bound(q: BoundQuery) -> float:
    return q.c1 * (q.n * q.n / 4 + math.log(1 / q.delta)) / q.eps


# -- shattering ------------------------------------------------------------------


@dataclass(frozen=True)
class ShatterInstance:
    n: int
    left: tuple[int, ...]
    right: tuple[int, ...]
    configs: tuple[Configuration, ...]

    def g1(self, config: Configuration) -> Configuration:
        """Keep the left-side states, zero the right side."""
        right = set(self.right)
        return tuple(0 if v in right else b for v, b in enumerate(config))

    def g2(self, config: Configuration) -> Configuration:
        return (0,) * self.n

    @staticmethod
    def ones(config: Configuration) -> tuple[int, int]:
        y, z = (v for v, b in enumerate(config) if b)
        return y, z


def build_shatter_instance(n: int) -> ShatterInstance:
    if n < 2:
        raise ValueError("need n >= 2")
    half = n // 2
    left, right = tuple(range(half)), tuple(range(half, n))
    configs = []
    for y, z in product(left, right):
        bits = [0] * n
        bits[y] = bits[z] = 1
        configs.append(tuple(bits))
    return ShatterInstance(n, left, right, tuple(configs))


def shatter_witness(instance: ShatterInstance, chosen) -> ThresholdSystem:
    """Bipartite system that maps ``chosen`` configurations by g1 and the rest of R by g2.

    Left vertices get threshold 2 and right vertices 3 (clamped to the
    canonical never-fire value for right vertices with no edges, which does
    not change the dynamics).
    """
    members = set(instance.configs)
    edges = []
    for config in chosen:
        config = tuple(config)
        if config not in members:
            raise ValueError(f"configuration {config} is not in the shattered set")
        edges.append(ShatterInstance.ones(config))
    graph = Graph.from_edges(instance.n, edges)
    right = set(instance.right)
    return ThresholdSystem.canonical(graph, [3 if v in right else 2 for v in range(instance.n)])


def _realises(instance: ShatterInstance, subset_mask: int) -> bool:
    chosen = [c for i, c in enumerate(instance.configs) if subset_mask >> i & 1]
    system = shatter_witness(instance, chosen)
    out = successor_many(system, np.array(instance.configs, dtype=np.uint8))
    for i, (config, row) in enumerate(zip(instance.configs, out)):
        want = instance.g1(config) if subset_mask >> i & 1 else instance.g2(config)
        if tuple(int(b) for b in row) != want:
            return False
    return True


def _realises_block(instance: ShatterInstance, block: range) -> bool:
    return all(_realises(instance, mask) for mask in block)


def verify_shattering(n: int, limit: int = 8, jobs: int = 1) -> bool:
    """Check both shattering requirements for every subset of R by simulation."""
    if n > limit:
        raise ValueError(f"n={n} exceeds the enumeration limit {limit}")
    instance = build_shatter_instance(n)
    if any(instance.g1(c) == instance.g2(c) for c in instance.configs):
        return False
    total = 2 ** len(instance.configs)
    step = max(1, total // 64)
    blocks = [range(lo, min(lo + step, total)) for lo in range(0, total, step)]
    return all(parallel_map(partial(_realises_block, instance), blocks, jobs))
