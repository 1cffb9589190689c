import itertools

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from threshsyds.core import Graph, ThresholdSystem, max_canonical_threshold
from threshsyds.observations import TrainingSet

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def naive_successor(system, config):
    """Reference dynamics written straight from the firing rule."""
    n = system.n
    out = []
    for v in range(n):
        if system.graph.directed:
            nbhd = {v} | {u for (u, w) in system.graph.edges if w == v}
        else:
            nbhd = {v} | {u for e in system.graph.edges for u in e if v in e and u != v}
        out.append(1 if sum(config[u] for u in nbhd) >= system.thresholds[v] else 0)
    return tuple(out)


def all_configs(n):
    return [tuple(c) for c in itertools.product((0, 1), repeat=n)]


@st.composite
def graphs(draw, min_n=1, max_n=6, directed=None):
    n = draw(st.integers(min_n, max_n))
    is_directed = draw(st.booleans()) if directed is None else directed
    if is_directed:
        pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    else:
        pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Graph.from_edges(n, chosen, directed=is_directed)


@st.composite
def systems(draw, min_n=1, max_n=6, directed=None):
    g = draw(graphs(min_n, max_n, directed))
    taus = tuple(draw(st.integers(0, max_canonical_threshold(g, v))) for v in range(g.n))
    return ThresholdSystem(g, taus)


@st.composite
def training_sets(draw, n, max_q=8):
    q = draw(st.integers(0, max_q))
    bits = st.tuples(*[st.integers(0, 1)] * n)
    return TrainingSet(n, tuple((draw(bits), draw(bits)) for _ in range(q)))


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if name.startswith("test_criterion_"):
            _ACCEPTANCE[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    by_criterion = {}
    for name, outcome in _ACCEPTANCE.items():
        by_criterion.setdefault(int(name.split("_")[2]), []).append((name, outcome))
    terminalreporter.section("acceptance criteria")
    for number in sorted(by_criterion):
        parts = by_criterion[number]
        verdict = "PASS" if all(o == "passed" for _, o in parts) else "FAIL"
        failed = [n for n, o in parts if o != "passed"]
        suffix = f"  (failing: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {number}: {verdict}{suffix}")
