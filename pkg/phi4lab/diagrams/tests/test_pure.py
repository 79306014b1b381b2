import itertools

import numpy as np
import pytest

from .._contraction import default_configurations
from .._pure import DiagramBudgetError, PureEvaluator, eval_pure, loop_count
from phi4lab.graphs import Color, IbpGraph, expand
from phi4lab.lattice import TorusLattice

R, G = Color.RED, Color.GREEN
SUNSET = IbpGraph(2, 2, ((0, 2, R), (1, 3, R), (2, 3, G), (2, 3, G), (2, 3, G)))
STAR = IbpGraph(4, 1, ((0, 4, R), (1, 4, G), (2, 4, G), (3, 4, G)))


def direct_sum(graph, lattice, config):
    """eps^(2l) sum over all interior positions of prod C(x_u - x_v), one loop per position tuple"""
    n = lattice.n
    green = lattice.green_kernel.values
    sites = [(i, j) for i in range(n) for j in range(n)]
    total = 0.0
    for interior in itertools.product(sites, repeat=graph.interior_count):
        position = list(map(tuple, config)) + list(interior)
        product = 1.0
        for u, v, _ in graph.edges:
            product *= green[(position[u][0] - position[v][0]) % n, (position[u][1] - position[v][1]) % n]
        total += product
    return lattice.spacing ** (2 * graph.interior_count) * total


@pytest.fixture
def lattice():
    return TorusLattice(4.0, 1.0, 1.0)


class TestEvalPure:
    def test_single_edge_tensor(self, lattice):
        value = eval_pure(IbpGraph(2, 0, ((0, 1, G),)), lattice)
        green = lattice.green_kernel.values
        assert value.values.shape == (4, 4, 4, 4)
        assert value.values[1, 2, 3, 0] == pytest.approx(green[(1 - 3) % 4, 2])
        assert value.is_deterministic

    def test_sunset_coincident_points(self, lattice):
        value = eval_pure(SUNSET, lattice, [[(0, 0), (0, 0)]])
        assert value.values[0] == pytest.approx(direct_sum(SUNSET, lattice, [(0, 0), (0, 0)]), rel=1e-10)

    def test_sunset_tensor_matches_configurations(self, lattice):
        tensor = eval_pure(SUNSET, lattice).values
        configs = eval_pure(SUNSET, lattice, [[(0, 0), (1, 2)], [(3, 1), (2, 2)]]).values
        assert tensor[0, 0, 1, 2] == pytest.approx(configs[0], rel=1e-12)
        assert tensor[3, 1, 2, 2] == pytest.approx(configs[1], rel=1e-12)

    def test_star(self, lattice):
        configs = default_configurations(lattice, stride=1, max_separation=1)
        values = eval_pure(STAR, lattice, configs).values
        for config, value in zip(configs, values):
            assert value == pytest.approx(direct_sum(STAR, lattice, config), rel=1e-10)

    @pytest.mark.parametrize("k, N", [(2, 2), (4, 2)])
    def test_expansion_graphs_match_direct_sum(self, lattice, k, N):
        configs = [[(0, 0), (1, 0)]] if k == 2 else [[(0, 0), (1, 0), (0, 1), (2, 3)]]
        for terms in expand(k, N).f_terms.values():
            for term in terms:
                value = eval_pure(term.graph, lattice, configs).values[0]
                assert value == pytest.approx(direct_sum(term.graph, lattice, configs[0]), rel=1e-8)

    def test_vacuum_component(self, lattice):
        graph = IbpGraph(2, 2, ((0, 1, G),) + ((2, 3, G),) * 4)
        config = [(0, 0), (2, 1)]
        value = eval_pure(graph, lattice, [config]).values[0]
        assert value == pytest.approx(direct_sum(graph, lattice, config), rel=1e-10)

    def test_rejects_insertions(self, lattice):
        with pytest.raises(ValueError):
            eval_pure(IbpGraph(2, 1, ((0, 2, R),)), lattice)

    def test_four_point_needs_configurations(self, lattice):
        with pytest.raises(ValueError):
            eval_pure(STAR, lattice)

    def test_loop_budget(self, lattice):
        with pytest.raises(DiagramBudgetError):
            eval_pure(SUNSET, lattice, loop_budget=1)

    def test_cost_budget(self, lattice):
        with pytest.raises(DiagramBudgetError):
            eval_pure(STAR, lattice, [[(0, 0)] * 4], cost_budget=10)

    def test_evaluator(self, lattice):
        evaluator = PureEvaluator(lattice)
        assert np.array_equal(evaluator.evaluate(SUNSET).values, eval_pure(SUNSET, lattice).values)


class TestLoopCount:
    def test_counts(self):
        assert loop_count(SUNSET) == 2
        assert loop_count(STAR) == 0
        assert loop_count(IbpGraph(2, 0, ((0, 1, G),))) == 0


class TestDefaultConfigurations:
    def test_layout(self, lattice):
        configs = default_configurations(lattice, stride=1, max_separation=2)
        assert configs.shape == (5, 4, 2)
        assert configs[0].tolist() == [[0, 0]] * 4
        assert configs[1].tolist() == [[0, 0], [1, 0], [0, 1], [1, 1]]
