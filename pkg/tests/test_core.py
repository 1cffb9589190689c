import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import all_configs, naive_successor, systems
from threshsyds.core import (
    FormatError,
    Graph,
    ThresholdSystem,
    as_config,
    format_system,
    max_canonical_threshold,
    parse_graph,
    parse_system,
    score,
    successor,
    successor_many,
    trajectory,
    validate_system,
)

PATH = Graph.from_edges(3, [(0, 1), (1, 2)])


class TestScore:
    def test_examples(self):
        assert score(as_config("0000"), {0, 1, 2}) == 0
        assert score(as_config("1111"), {1, 3}) == 2
        assert score(as_config("1010"), {0, 1, 2}) == 2

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            score((0, 1), {2})


class TestGraph:
    def test_canonical_edges(self):
        g = Graph.from_edges(4, [(3, 1), (1, 3), (0, 2)])
        assert g.edges == ((0, 2), (1, 3))

    def test_directed_keeps_orientation(self):
        g = Graph.from_edges(3, [(2, 0), (0, 2)], directed=True)
        assert g.edges == ((0, 2), (2, 0))
        assert g.closed_neighborhood(0) == (0, 2)

    @pytest.mark.parametrize("edge", [(1, 1), (0, 5), (-1, 0)])
    def test_rejects_bad_edges(self, edge):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [edge])

    def test_closed_neighborhood_includes_self(self):
        assert PATH.closed_neighborhood(1) == (0, 1, 2)
        assert PATH.closed_neighborhood(0) == (0, 1)


class TestSuccessor:
    def test_zero_thresholds_fire(self):
        s = ThresholdSystem(PATH, (0, 0, 0))
        assert successor(s, as_config("010")) == (1, 1, 1)

    def test_unreachable_thresholds(self):
        s = ThresholdSystem(PATH, tuple(PATH.degree(v) + 2 for v in range(3)))
        assert successor(s, as_config("111")) == (0, 0, 0)

    def test_hand_simulation(self):
        s = ThresholdSystem(PATH, (1, 2, 3))
        assert successor(s, as_config("100")) == (1, 0, 0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            successor(ThresholdSystem(PATH, (1, 1, 1)), (0, 1))

    @given(systems())
    def test_matches_reference(self, s):
        configs = all_configs(s.n)
        batch = successor_many(s, np.array(configs, dtype=np.uint8))
        for c, row in zip(configs, batch):
            assert naive_successor(s, c) == successor(s, c) == tuple(int(b) for b in row)

    @given(systems(), st.data())
    def test_monotone_in_thresholds(self, s, data):
        raised = tuple(t + data.draw(st.integers(0, 2)) for t in s.thresholds)
        s2 = ThresholdSystem(s.graph, raised)
        for c in all_configs(s.n):
            assert all(a >= b for a, b in zip(successor(s, c), successor(s2, c)))

    @given(systems())
    def test_monotone_in_states(self, s):
        configs = all_configs(s.n)
        for c in configs:
            for d in configs:
                if all(x <= y for x, y in zip(c, d)):
                    assert all(a <= b for a, b in zip(successor(s, c), successor(s, d)))

    @given(systems(), st.data())
    def test_canonical_clamp_preserves_dynamics(self, s, data):
        big = tuple(t + data.draw(st.integers(0, 5)) for t in s.thresholds)
        raw = ThresholdSystem(s.graph, big)
        clamped = ThresholdSystem.canonical(s.graph, big)
        assert not validate_system(clamped)
        for c in all_configs(s.n):
            assert successor(raw, c) == successor(clamped, c)

    def test_isolated_vertex_self_inclusion(self):
        g = Graph.empty(1)
        for c in ((0,), (1,)):
            assert successor(ThresholdSystem(g, (1,)), c) == c
            assert successor(ThresholdSystem(g, (0,)), c) == (1,)
            assert successor(ThresholdSystem(g, (2,)), c) == (0,)


class TestTrajectory:
    def test_zero_steps(self):
        s = ThresholdSystem(PATH, (1, 2, 3))
        assert trajectory(s, (1, 1, 0), 0) == [(1, 1, 0)]

    def test_fixed_point_after_one_step(self):
        s = ThresholdSystem(Graph.from_edges(2, [(0, 1)]), (0, 0))
        assert trajectory(s, (0, 0), 2) == [(0, 0), (1, 1), (1, 1)]

    def test_path_fixed_point(self):
        s = ThresholdSystem(PATH, (1, 2, 3))
        assert trajectory(s, (1, 1, 0), 2) == [(1, 1, 0)] * 3

    def test_negative_steps(self):
        with pytest.raises(ValueError):
            trajectory(ThresholdSystem(PATH, (1, 2, 3)), (1, 1, 0), -1)


class TestValidate:
    def test_ok(self):
        assert validate_system(ThresholdSystem(Graph.from_edges(2, [(0, 1)]), (2, 2))) == []

    def test_negative_threshold(self):
        problems = validate_system(ThresholdSystem(Graph.from_edges(2, [(0, 1)]), (-1, 2)))
        assert any("threshold below 0" in p for p in problems)

    def test_self_loop(self):
        problems = validate_system(ThresholdSystem(Graph(4, ((3, 3),)), (1, 1, 1, 1)))
        assert any("self-loop" in p for p in problems)

    def test_zero_vertices(self):
        assert validate_system(ThresholdSystem(Graph(0, ()), ()))

    def test_length_mismatch(self):
        assert validate_system(ThresholdSystem(PATH, (1, 1)))

    def test_above_canonical(self):
        g = Graph.from_edges(2, [(0, 1)])
        assert max_canonical_threshold(g, 0) == 3
        assert validate_system(ThresholdSystem(g, (4, 3)))


class TestTextFormat:
    @given(systems())
    def test_round_trip(self, s):
        assert parse_system(format_system(s)) == s

    def test_example(self):
        text = "syds 3 undirected\ne 0 1\ne 1 2\nt 0 1\nt 1 2\nt 2 3\n"
        assert parse_system(text) == ThresholdSystem(PATH, (1, 2, 3))
        assert format_system(parse_system(text)) == text

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "syds 2 sideways\n",
            "syds 2 undirected\ne 0 0\nt 0 1\nt 1 1\n",
            "syds 2 undirected\ne 0 1\ne 1 0\nt 0 1\nt 1 1\n",
            "syds 2 undirected\nt 0 1\n",
            "syds 2 undirected\nt 0 1\nt 0 1\n",
            "syds 2 undirected\nt 0 -1\nt 1 1\n",
            "syds 2 undirected\nx 1 2\n",
            "syds 0 undirected\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(FormatError):
            parse_system(text)

    def test_graph_without_thresholds(self):
        g, taus = parse_graph("syds 3 undirected\ne 1 2\n")
        assert g.edges == ((1, 2),) and taus == {}

    def test_error_carries_line(self):
        with pytest.raises(FormatError) as info:
            parse_system("syds 2 undirected\n# note\ne 0 9\n")
        assert info.value.lineno == 3
