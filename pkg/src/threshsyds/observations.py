"""Training sets of (configuration, successor) pairs and the distributions they are drawn from."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Configuration,
    FormatError,
    ThresholdSystem,
    _content_lines,
    _parse_int,
    as_config,
    format_config,
    score,
    successor_many,
)


@dataclass(frozen=True)
class TrainingSet:
    n: int
    pairs: tuple[tuple[Configuration, Configuration], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("vertex count must be at least 1")
        normalised = tuple((as_config(c, self.n), as_config(s, self.n)) for c, s in self.pairs)
        object.__setattr__(self, "pairs", normalised)

    @classmethod
    def from_arrays(cls, predecessors: np.ndarray, successors: np.ndarray) -> TrainingSet:
        pre = np.asarray(predecessors)
        post = np.asarray(successors)
        pairs = tuple(
            (tuple(int(b) for b in c), tuple(int(b) for b in s)) for c, s in zip(pre, post)
        )
        return cls(int(pre.shape[1]), pairs)

    @property
    def q(self) -> int:
        return len(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @cached_property
    def predecessors(self) -> np.ndarray:
        return np.array([c for c, _ in self.pairs], dtype=np.uint8).reshape(self.q, self.n)

    @cached_property
    def successors(self) -> np.ndarray:
        return np.array([s for _, s in self.pairs], dtype=np.uint8).reshape(self.q, self.n)

    def extended(self, more: Iterable[tuple[Sequence[int], Sequence[int]]]) -> TrainingSet:
        return TrainingSet(self.n, self.pairs + tuple((tuple(c), tuple(s)) for c, s in more))


def full_truth_table(system: ThresholdSystem) -> TrainingSet:
    """All 2**n configurations (in binary order, vertex 0 most significant) with successors."""
    n = system.n
    configs = all_configurations(n)
    return TrainingSet.from_arrays(configs, successor_many(system, configs))


def all_configurations(n: int) -> np.ndarray:
    idx = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8)


# -- distributions ---------------------------------------------------------------


@dataclass(frozen=True)
class UniformDistribution:
    n: int

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.integers(0, 2, size=(size, self.n), dtype=np.uint8)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        configs = all_configurations(self.n)
        return configs, np.full(len(configs), 1.0 / len(configs))


@dataclass(frozen=True)
class BernoulliDistribution:
    probs: tuple[float, ...]

    def __post_init__(self):
        if not self.probs:
            raise ValueError("need at least one vertex probability")
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise ValueError("vertex probabilities must lie in [0, 1]")

    @property
    def n(self) -> int:
        return len(self.probs)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return (rng.random((size, self.n)) < np.asarray(self.probs)).astype(np.uint8)

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        configs = all_configurations(self.n)
        p = np.asarray(self.probs)
        weights = np.prod(np.where(configs == 1, p, 1.0 - p), axis=1)
        return configs, weights


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Finite support with rational weights summing to one.

    Repeated configurations are merged and their weights added.
    """

    configs: tuple[Configuration, ...]
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.configs or len(self.configs) != len(self.weights):
            raise ValueError("support and weights must be non-empty and of equal length")
        n = len(self.configs[0])
        merged: dict[Configuration, Fraction] = {}
        for c, w in zip(self.configs, self.weights):
            w = Fraction(w)
            if w < 0:
                raise ValueError("weights must be non-negative")
            c = as_config(c, n)
            merged[c] = merged.get(c, Fraction(0)) + w
        if sum(merged.values()) != 1:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "configs", tuple(merged))
        object.__setattr__(self, "weights", tuple(merged.values()))

    @classmethod
    def uniform_over(cls, configs: Sequence[Sequence[int]]) -> EmpiricalDistribution:
        return cls(tuple(tuple(c) for c in configs), tuple(Fraction(1, len(configs)) for _ in configs))

    @property
    def n(self) -> int:
        return len(self.configs[0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        probs = np.array([float(w) for w in self.weights])
        idx = rng.choice(len(self.configs), size=size, p=probs / probs.sum())
        return np.array(self.configs, dtype=np.uint8)[idx]

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.configs, dtype=np.uint8), np.array([float(w) for w in self.weights])


ConfigDistribution = UniformDistribution | BernoulliDistribution | EmpiricalDistribution


def make_rng(seed: int) -> np.random.Generator:
    """The package's one seeded generator: numpy PCG64."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_training_set(
    system: ThresholdSystem, dist: ConfigDistribution, q: int, seed: int | np.random.Generator
) -> TrainingSet:
    if q < 1:
        raise ValueError("q must be at least 1")
    if not isinstance(dist, (UniformDistribution, BernoulliDistribution, EmpiricalDistribution)):
        raise ValueError(f"unsupported distribution {dist!r}")
    if dist.n != system.n:
        raise ValueError(f"distribution is over {dist.n} vertices, system has {system.n}")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    pre = dist.sample(rng, q)
    return TrainingSet.from_arrays(pre, successor_many(system, pre))


# -- queries ---------------------------------------------------------------------


def _check_vertex(obs: TrainingSet, v: int) -> None:
    if not 0 <= v < obs.n:
        raise ValueError(f"vertex {v} out of range [0, {obs.n})")


def partition_by_target(obs: TrainingSet, v: int) -> tuple[TrainingSet, TrainingSet]:
    _check_vertex(obs, v)
    zeros = tuple(p for p in obs.pairs if p[1][v] == 0)
    ones = tuple(p for p in obs.pairs if p[1][v] == 1)
    return TrainingSet(obs.n, zeros), TrainingSet(obs.n, ones)


def is_consistent(system: ThresholdSystem, obs: TrainingSet) -> bool:
    if system.n != obs.n:
        raise ValueError(f"system has {system.n} vertices, observations have {obs.n}")
    if obs.q == 0:
        return True
    return bool(np.array_equal(successor_many(system, obs.predecessors), obs.successors))


def observations_deterministic(obs: TrainingSet) -> bool:
    seen: dict[Configuration, Configuration] = {}
    for c, s in obs.pairs:
        if seen.setdefault(c, s) != s:
            return False
    return True


def l_value(obs: TrainingSet, v: int, Y: Iterable[int]) -> int:
    """Highest score over ``Y`` among observations where ``v`` ends in state 0, or -1."""
    _check_vertex(obs, v)
    Y = tuple(Y)
    scores = [score(c, Y) for c, s in obs.pairs if s[v] == 0]
    return max(scores) if scores else -1


def h_value(obs: TrainingSet, v: int, Y: Iterable[int]) -> int:
    """Lowest score over ``Y`` among observations where ``v`` ends in state 1, or n+1."""
    _check_vertex(obs, v)
    Y = tuple(Y)
    scores = [score(c, Y) for c, s in obs.pairs if s[v] == 1]
    return min(scores) if scores else obs.n + 1


# -- text format -----------------------------------------------------------------


def format_training_set(obs: TrainingSet, comments: Sequence[str] = ()) -> str:
    lines = [f"obs {obs.n} {obs.q}"]
    lines += [f"# {c}" for c in comments]
    lines += [f"{format_config(c)} {format_config(s)}" for c, s in obs.pairs]
    return "\n".join(lines) + "\n"


def parse_training_set(text: str) -> TrainingSet:
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty observation file")
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "obs":
        raise FormatError("header must be 'obs <n> <q>'", lineno)
    n, q = _parse_int(parts[1], lineno), _parse_int(parts[2], lineno)
    if n < 1 or q < 0:
        raise FormatError("need n >= 1 and q >= 0", lineno)
    body = lines[1:]
    if len(body) != q:
        raise FormatError(f"header declares {q} pairs, found {len(body)}")
    pairs = []
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("expected '<predecessor> <successor>'", lineno)
        for bits in parts:
            if len(bits) != n or any(ch not in "01" for ch in bits):
                raise FormatError(f"{bits!r} is not a bitstring of length {n}", lineno)
        pairs.append((as_config(parts[0]), as_config(parts[1])))
    return TrainingSet(n, tuple(pairs))
