"""3SAT reductions to the consistency problem, plus DIMACS ingestion.

Two reductions are built:

``undirected``
    ``2n+2`` vertices (a literal vertex per polarity plus ``z`` and ``z'``)
    and ``n+m+2`` transitions.  Vertex ``y_i`` is ``2i``, its negation
    ``2i+1``, ``z`` is ``2n`` and ``z'`` is ``2n+1`` (``i`` zero-based).

``tree``
    ``4n+3`` vertices and ``4n+m+3`` transitions, aimed at trees with
    threshold 2 everywhere.  Vertex ``y_i`` is ``4i``, its negation ``4i+1``,
    ``w_i`` is ``4i+2``, ``w'_i`` is ``4i+3``, then ``z``, ``z'``, ``z''``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .core import FormatError, Graph, ThresholdSystem, max_canonical_threshold
from .observations import TrainingSet, format_training_set, parse_training_set

MAX_TRUTH_TABLE_VARS = 20


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("variable count must be non-negative")
        clauses = tuple(tuple(int(lit) for lit in c) for c in self.clauses)
        for c in clauses:
            if not c:
                raise ValueError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range")
            if any(-lit in c for lit in c):
                raise ValueError(f"tautological clause {c}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def m(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, alpha: Sequence[int]) -> bool:
        return all(any((lit > 0) == bool(alpha[abs(lit) - 1]) for lit in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise FormatError("second problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("problem line must be 'p cnf <vars> <clauses>'", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError("non-integer counts in problem line", lineno) from None
            if num_vars < 0 or num_clauses < 0:
                raise FormatError("negative counts in problem line", lineno)
            continue
        if num_vars is None:
            raise FormatError("clause before the problem line", lineno)
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise FormatError(f"non-integer literal {token!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise FormatError("empty clause", lineno)
                if any(-x in current for x in current):
                    raise FormatError(f"tautological clause {current}", lineno)
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > num_vars:
                raise FormatError("literal out of range", lineno)
            else:
                current.append(lit)
        last_line = lineno
    if num_vars is None:
        raise FormatError("missing problem line")
    if current:
        raise FormatError("last clause is not terminated by 0", last_line)
    if len(clauses) != num_clauses:
        raise FormatError(f"problem line declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def format_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {f.m}"]
    lines += [" ".join(str(lit) for lit in c) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def satisfying_assignments(f: CnfFormula) -> list[tuple[int, ...]]:
    if f.num_vars > MAX_TRUTH_TABLE_VARS:
        raise ValueError(f"truth-table search is capped at {MAX_TRUTH_TABLE_VARS} variables")
    return [alpha for alpha in product((0, 1), repeat=f.num_vars) if f.satisfied_by(alpha)]


def is_satisfiable(f: CnfFormula) -> bool:
    return bool(satisfying_assignments(f))


# -- reductions ------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionOutput:
    variant: str
    roles: tuple[str, ...]
    observations: TrainingSet

    @property
    def num_vertices(self) -> int:
        return len(self.roles)

    def vertex(self, role: str) -> int:
        return self.roles.index(role)


def _check_reducible(f: CnfFormula) -> None:
    if f.m < 1:
        raise ValueError("reduction needs at least one clause")
    if any(len(c) > 3 for c in f.clauses):
        raise ValueError("reduction needs clauses of width at most 3")


def _config(n: int, ones) -> tuple[int, ...]:
    bits = [0] * n
    for v in ones:
        bits[v] = 1
    return tuple(bits)


def undirected_roles(num_vars: int) -> tuple[str, ...]:
    roles = []
    for i in range(1, num_vars + 1):
        roles += [f"y{i}", f"ybar{i}"]
    return tuple(roles + ["z", "z'"])


def tree_roles(num_vars: int) -> tuple[str, ...]:
    roles = []
    for i in range(1, num_vars + 1):
        roles += [f"y{i}", f"ybar{i}", f"w{i}", f"w{i}'"]
    return tuple(roles + ["z", "z'", "z''"])


def _literal_vertex(lit: int, stride: int) -> int:
    i = abs(lit) - 1
    return stride * i + (0 if lit > 0 else 1)


def reduce_3sat_undirected(f: CnfFormula) -> ReductionOutput:
    _check_reducible(f)
    nv = f.num_vars
    size = 2 * nv + 2
    z, zp = 2 * nv, 2 * nv + 1
    pairs = [
        (_config(size, [z]), _config(size, [])),
        (_config(size, [z, zp]), _config(size, [z])),
    ]
    for i in range(nv):
        pairs.append((_config(size, [2 * i, 2 * i + 1]), _config(size, [])))
    for clause in f.clauses:
        ones = [z] + [_literal_vertex(lit, 2) for lit in clause]
        pairs.append((_config(size, ones), _config(size, [z])))
    return ReductionOutput("undirected", undirected_roles(nv), TrainingSet(size, tuple(pairs)))


def reduce_3sat_tree(f: CnfFormula) -> ReductionOutput:
    _check_reducible(f)
    nv = f.num_vars
    size = 4 * nv + 3
    z, zp, zpp = 4 * nv, 4 * nv + 1, 4 * nv + 2

    def fixed(ones):
        c = _config(size, ones)
        return (c, c)

    pairs = [(_config(size, [z]), _config(size, []))]
    pairs += [fixed([z, zp]), fixed([zp, zpp])]
    for i in range(nv):
        w, wp = 4 * i + 2, 4 * i + 3
        pairs += [fixed([w, wp]), fixed([w, wp, zp, zpp])]
    for i in range(nv):
        y, ybar, w = 4 * i, 4 * i + 1, 4 * i + 2
        pairs += [fixed([w, y, ybar]), fixed([w, y, ybar, z])]
    for clause in f.clauses:
        ones = [z] + [_literal_vertex(lit, 4) for lit in clause]
        ones += sorted({4 * (abs(lit) - 1) + 2 for lit in clause})
        pairs.append(fixed(ones))
    return ReductionOutput("tree", tree_roles(nv), TrainingSet(size, tuple(pairs)))


def reduce_3sat(f: CnfFormula, variant: str) -> ReductionOutput:
    if variant == "undirected":
        return reduce_3sat_undirected(f)
    if variant == "tree":
        return reduce_3sat_tree(f)
    raise ValueError(f"unknown variant {variant!r}")


def _check_assignment(f: CnfFormula, alpha: Sequence[int]) -> tuple[int, ...]:
    if len(alpha) != f.num_vars:
        raise ValueError(f"assignment has {len(alpha)} values for {f.num_vars} variables")
    return tuple(1 if a else 0 for a in alpha)


def witness_from_assignment(f: CnfFormula, alpha: Sequence[int], variant: str) -> ThresholdSystem:
    """The system the hardness argument pairs with an assignment.

    Undirected variant: ``z`` is joined to ``z'`` and to the literal vertex
    made true by each variable; ``z`` has threshold 2 and every other vertex
    is constant 0, encoded as the never-fire threshold ``|N+|+1``.

    Tree variant: threshold 2 everywhere, edges ``z-z'``, ``z'-z''`` and per
    variable ``w-w'``, ``w-y``, ``w-ybar`` plus the true literal joined to ``z``.
    """
    alpha = _check_assignment(f, alpha)
    nv = f.num_vars
    if variant == "undirected":
        z, zp = 2 * nv, 2 * nv + 1
        edges = [(z, zp)] + [(z, 2 * i + (0 if a else 1)) for i, a in enumerate(alpha)]
        graph = Graph.from_edges(2 * nv + 2, edges)
        taus = [max_canonical_threshold(graph, v) for v in range(graph.n)]
        taus[z] = 2
        return ThresholdSystem(graph, tuple(taus))
    if variant == "tree":
        z, zp, zpp = 4 * nv, 4 * nv + 1, 4 * nv + 2
        edges = [(z, zp), (zp, zpp)]
        for i, a in enumerate(alpha):
            y, ybar, w, wp = 4 * i, 4 * i + 1, 4 * i + 2, 4 * i + 3
            edges += [(w, wp), (w, y), (w, ybar), (z, y if a else ybar)]
        graph = Graph.from_edges(4 * nv + 3, edges)
        return ThresholdSystem(graph, (2,) * graph.n)
    raise ValueError(f"unknown variant {variant!r}")


def assignment_from_system(f: CnfFormula, system: ThresholdSystem, variant: str) -> tuple[int, ...]:
    nv = f.num_vars
    if variant == "undirected":
        size, stride, z = 2 * nv + 2, 2, 2 * nv
    elif variant == "tree":
        size, stride, z = 4 * nv + 3, 4, 4 * nv
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if system.n != size:
        raise ValueError(f"system has {system.n} vertices, the {variant} reduction has {size}")
    return tuple(1 if system.graph.has_edge(z, stride * i) else 0 for i in range(nv))


# -- text format -----------------------------------------------------------------


def format_reduction(out: ReductionOutput) -> str:
    comments = [f"variant {out.variant}"] + [f"role {v} {label}" for v, label in enumerate(out.roles)]
    return format_training_set(out.observations, comments)


def parse_reduction(text: str) -> ReductionOutput:
    obs = parse_training_set(text)
    variant = None
    roles: dict[int, str] = {}
    for raw in text.splitlines():
        parts = raw.strip().split()
        if len(parts) >= 2 and parts[0] == "#":
            if parts[1] == "variant" and len(parts) == 3:
                variant = parts[2]
            elif parts[1] == "role" and len(parts) == 4:
                roles[int(parts[2])] = parts[3]
    if variant is None or sorted(roles) != list(range(obs.n)):
        raise FormatError("reduction file lacks a complete role block")
    return ReductionOutput(variant, tuple(roles[v] for v in range(obs.n)), obs)
