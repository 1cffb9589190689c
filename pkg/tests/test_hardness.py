import itertools

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threshsyds.bruteforce import brute_force_consistent
from threshsyds.core import FormatError, Graph, ThresholdSystem, successor
from threshsyds.hardness import (
    CnfFormula,
    assignment_from_system,
    format_dimacs,
    format_reduction,
    parse_dimacs,
    parse_reduction,
    reduce_3sat,
    reduce_3sat_tree,
    reduce_3sat_undirected,
    satisfying_assignments,
    witness_from_assignment,
)
from threshsyds.learners import LearnerRefusal
from threshsyds.observations import TrainingSet, is_consistent, observations_deterministic


@st.composite
def formulas(draw, max_vars=4, max_clauses=6):
    nv = draw(st.integers(1, max_vars))
    clauses = []
    for _ in range(draw(st.integers(1, max_clauses))):
        vars_ = draw(st.lists(st.integers(1, nv), min_size=1, max_size=min(3, nv), unique=True))
        clauses.append(tuple(v if draw(st.booleans()) else -v for v in vars_))
    return CnfFormula(nv, tuple(clauses))


def ones(config):
    return {v for v, b in enumerate(config) if b}


class TestDimacs:
    def test_minimal(self):
        f = parse_dimacs("p cnf 2 1\n1 -2 0")
        assert f.num_vars == 2 and f.clauses == ((1, -2),)

    def test_comments(self):
        f = parse_dimacs("c note\np cnf 3 2\n1 2 3 0\n-1 -2 0")
        assert f.num_vars == 3 and f.m == 2

    def test_out_of_range(self):
        with pytest.raises(FormatError, match="literal out of range") as info:
            parse_dimacs("p cnf 1 1\n2 0")
        assert info.value.lineno == 2

    def test_multiline_and_end_marker(self):
        f = parse_dimacs("p cnf 3 2\n1\n 2 0 -3\n 0\n%\n0\n")
        assert f.clauses == ((1, 2), (-3,))

    @pytest.mark.parametrize(
        "text",
        [
            "p cnf 2 2\n1 0\n",
            "p cnf 2 1\n0\n",
            "1 2 0\n",
            "p cnf 2 1\n1 2\n",
            "p cnf 2 1\n1 -1 0\n",
            "p cnf 2 1\n1 x 0\n",
            "p dnf 2 1\n1 0\n",
            "",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(FormatError):
            parse_dimacs(text)

    @given(formulas())
    def test_round_trip(self, f):
        assert parse_dimacs(format_dimacs(f)) == f

    def test_formula_validation(self):
        with pytest.raises(ValueError):
            CnfFormula(2, ((1, -1),))
        with pytest.raises(ValueError):
            CnfFormula(2, ((),))
        with pytest.raises(ValueError):
            CnfFormula(1, ((2,),))


class TestUndirectedReduction:
    F = CnfFormula(3, ((1, 2, 3), (-1, -2)))

    def test_sizes(self):
        red = reduce_3sat_undirected(self.F)
        assert red.num_vertices == 8 and red.observations.q == 7

    def test_first_transition(self):
        red = reduce_3sat_undirected(self.F)
        c, d = red.observations.pairs[0]
        assert ones(c) == {red.vertex("z")} and ones(d) == set()

    def test_clause_transition(self):
        red = reduce_3sat_undirected(self.F)
        c, d = red.observations.pairs[-2]
        assert ones(c) == {red.vertex(r) for r in ("z", "y1", "y2", "y3")}
        assert ones(d) == {red.vertex("z")}

    def test_numbering(self):
        red = reduce_3sat_undirected(self.F)
        assert red.roles == ("y1", "ybar1", "y2", "ybar2", "y3", "ybar3", "z", "z'")

    def test_width_limit(self):
        with pytest.raises(ValueError):
            reduce_3sat_undirected(CnfFormula(4, ((1, 2, 3, 4),)))
        with pytest.raises(ValueError):
            reduce_3sat_undirected(CnfFormula(2, ()))

    def test_witness_example(self):
        f = CnfFormula(3, ((1, 2, 3),))
        s = witness_from_assignment(f, (1, 0, 0), "undirected")
        red = reduce_3sat_undirected(f)
        z = red.vertex("z")
        expected = {(z, red.vertex(r)) for r in ("y1", "ybar2", "ybar3", "z'")}
        assert {tuple(sorted(e)) for e in s.graph.edges} == {tuple(sorted(e)) for e in expected}
        assert s.thresholds[z] == 2
        assert is_consistent(s, red.observations)

    def test_violating_assignment_fails_on_clause(self):
        f = CnfFormula(2, ((1, 2), (-1,)))
        red = reduce_3sat_undirected(f)
        s = witness_from_assignment(f, (0, 0), "undirected")
        bad = [i for i, (c, d) in enumerate(red.observations.pairs) if successor(s, c) != d]
        assert bad == [2 + f.num_vars]

    @given(formulas())
    def test_forward_soundness(self, f):
        red = reduce_3sat_undirected(f)
        assert observations_deterministic(red.observations)
        for alpha in itertools.product((0, 1), repeat=f.num_vars):
            s = witness_from_assignment(f, alpha, "undirected")
            assert is_consistent(s, red.observations) == f.satisfied_by(alpha)
            assert assignment_from_system(f, s, "undirected") == alpha

    def test_edgeless_gives_all_false(self):
        f = CnfFormula(2, ((1,),))
        s = ThresholdSystem(Graph.empty(6), (1,) * 6)
        assert assignment_from_system(f, s, "undirected") == (0, 0)

    def test_wrong_size(self):
        with pytest.raises(ValueError):
            assignment_from_system(CnfFormula(2, ((1,),)), ThresholdSystem(Graph.empty(5), (1,) * 5), "undirected")

    def test_partial_assignment(self):
        with pytest.raises(ValueError):
            witness_from_assignment(CnfFormula(2, ((1,),)), (1,), "undirected")

    @pytest.mark.parametrize(
        "clauses",
        [((1,),), ((1,), (-1,)), ((1, 2), (-1,), (-2,)), ((1, -2), (-1, 2), (1, 2)), ((-1, -2), (1,), (2,))],
    )
    def test_backward_via_oracle(self, clauses):
        f = CnfFormula(2, clauses)
        red = reduce_3sat_undirected(f)
        try:
            s = brute_force_consistent(red.num_vertices, red.observations, "undirected-threshold")
        except LearnerRefusal:
            assert not satisfying_assignments(f)
            return
        assert satisfying_assignments(f)
        assert f.satisfied_by(assignment_from_system(f, s, "undirected"))


class TestTreeReduction:
    F = CnfFormula(2, ((1, -2),))

    def test_sizes(self):
        red = reduce_3sat_tree(self.F)
        assert red.num_vertices == 11 and red.observations.q == 12

    def test_single_non_fixed_point(self):
        red = reduce_3sat_tree(self.F)
        moving = [(c, d) for c, d in red.observations.pairs if c != d]
        assert len(moving) == 1
        c, d = moving[0]
        assert ones(c) == {red.vertex("z")} and ones(d) == set()

    def test_contains_w_pair_fixed_points(self):
        red = reduce_3sat_tree(self.F)
        for i in (1, 2):
            cfg = tuple(1 if v in {red.vertex(f"w{i}"), red.vertex(f"w{i}'")} else 0 for v in range(11))
            assert (cfg, cfg) in red.observations.pairs

    @given(formulas(max_vars=3, max_clauses=4))
    def test_witness_is_spanning_tree(self, f):
        for alpha in itertools.product((0, 1), repeat=f.num_vars):
            s = witness_from_assignment(f, alpha, "tree")
            g = nx.Graph()
            g.add_nodes_from(range(s.n))
            g.add_edges_from(s.graph.edges)
            assert s.n == 4 * f.num_vars + 3 and nx.is_tree(g)
            assert set(s.thresholds) == {2}
            assert assignment_from_system(f, s, "tree") == alpha

    @given(formulas())
    def test_witness_behaviour(self, f):
        # The tree witness reproduces every variable gadget; on a clause
        # transition it holds exactly when every literal of the clause is true.
        red = reduce_3sat_tree(f)
        assert observations_deterministic(red.observations)
        gadget = TrainingSet(red.num_vertices, red.observations.pairs[: 4 * f.num_vars + 3])
        clause_pairs = red.observations.pairs[4 * f.num_vars + 3 :]
        for alpha in itertools.product((0, 1), repeat=f.num_vars):
            s = witness_from_assignment(f, alpha, "tree")
            assert is_consistent(s, gadget)
            for clause, (c, d) in zip(f.clauses, clause_pairs):
                all_true = all((lit > 0) == bool(alpha[abs(lit) - 1]) for lit in clause)
                assert (successor(s, c) == d) == all_true

    def test_satisfiable_formula_without_threshold2_system(self):
        # (x1 or x2) and (not x2) is satisfiable, yet no graph at all with
        # threshold 2 everywhere fits the tree-variant observations.
        f = CnfFormula(2, ((1, 2), (-2,)))
        assert satisfying_assignments(f) == [(1, 0)]
        red = reduce_3sat_tree(f)
        with pytest.raises(LearnerRefusal):
            brute_force_consistent(red.num_vertices, red.observations, "undirected-threshold2", limit=11)

    def test_all_true_clauses_are_realised(self):
        f = CnfFormula(2, ((1,), (1, 2)))
        red = reduce_3sat_tree(f)
        assert is_consistent(witness_from_assignment(f, (1, 1), "tree"), red.observations)


class TestFormat:
    @given(formulas(max_vars=3), st.sampled_from(["undirected", "tree"]))
    def test_round_trip(self, f, variant):
        red = reduce_3sat(f, variant)
        text = format_reduction(red)
        assert parse_reduction(text) == red
        assert "# role 0 y1" in text

    def test_missing_roles(self):
        with pytest.raises(FormatError):
            parse_reduction("obs 2 0\n")

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            reduce_3sat(CnfFormula(1, ((1,),)), "cycle")


def test_truth_table_cap():
    with pytest.raises(ValueError):
        satisfying_assignments(CnfFormula(21, ((1,),)))
