from fractions import Fraction

import pytest

from .._graph import Color, GraphError, IbpGraph, Term, initial_graph, n_phi

R, G = Color.RED, Color.GREEN


class TestIbpGraph:
    def test_initial_graph(self):
        graph = initial_graph(2)
        assert graph.n_vertices == 2
        assert graph.edges == ()
        assert n_phi(graph) == 2

    def test_edges_sorted_and_normalised(self):
        graph = IbpGraph(2, 1, ((2, 0, R), (1, 2, G)))
        assert graph.edges == ((0, 2, R), (1, 2, G))
        assert graph == IbpGraph(2, 1, ((1, 2, G), (0, 2, R)))

    def test_n_phi_examples(self):
        assert n_phi(IbpGraph(2, 0, ((0, 1, G),))) == 0
        # k=4 graph after the first new vertex from u1
        assert n_phi(IbpGraph(4, 1, ((0, 4, R),))) == 6

    def test_insertion_counts(self):
        graph = IbpGraph(2, 1, ((0, 2, R), (1, 2, G)))
        assert graph.insertion_count(0) == 0
        assert graph.insertion_count(2) == 2
        assert graph.is_available(2)
        assert not graph.is_available(1)

    def test_rejects_self_loop(self):
        with pytest.raises(GraphError):
            IbpGraph(1, 1, ((0, 1, R), (1, 1, G)))

    def test_rejects_boundary_degree_two(self):
        with pytest.raises(GraphError):
            IbpGraph(3, 0, ((0, 1, G), (0, 2, G)))

    def test_rejects_interior_degree_five(self):
        edges = ((0, 1, R),) + ((1, 2, G),) * 4
        with pytest.raises(GraphError):
            IbpGraph(1, 2, edges)

    def test_rejects_isolated_interior(self):
        with pytest.raises(GraphError):
            IbpGraph(2, 1, ((0, 1, G),))

    def test_with_new_vertex(self):
        graph, z = initial_graph(2).with_new_vertex(0)
        assert z == 2
        assert graph.edges == ((0, 2, R),)
        assert graph.label(2) == "v1"
        assert graph.label(1) == "u2"

    def test_is_pure(self):
        sunset = IbpGraph(2, 2, ((0, 2, R), (1, 3, R), (2, 3, G), (2, 3, G), (2, 3, G)))
        assert sunset.is_pure()
        assert not initial_graph(2).is_pure()


class TestTerm:
    def test_coefficient_is_exact(self):
        term = Term(1, 0, initial_graph(1))
        assert isinstance(term.coeff, Fraction)
        assert term.scaled(Fraction(1, 3)).coeff == Fraction(1, 3)

    def test_scaled_raises_power(self):
        term = Term(2, 1, initial_graph(1)).scaled(-1, extra_power=1)
        assert term.coeff == -2
        assert term.lambda_power == 2

    def test_negative_power_rejected(self):
        with pytest.raises(GraphError):
            Term(1, -1, initial_graph(1))
