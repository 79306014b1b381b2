from fractions import Fraction
from unittest.mock import MagicMock

import numpy as np
import pytest

from .._value import DiagramValue, evaluate_terms, term_values_frame
from phi4lab.graphs import Term, initial_graph


class TestDiagramValue:
    def test_default_stderr_is_zero(self):
        value = DiagramValue(np.ones(3))
        assert value.is_deterministic
        assert np.array_equal(value.stderr, np.zeros(3))

    def test_negative_stderr_rejected(self):
        with pytest.raises(ValueError):
            DiagramValue(np.ones(2), -np.ones(2))

    def test_from_batches(self):
        batches = np.array([[1.0], [2.0], [3.0], [4.0]])
        value = DiagramValue.from_batches(batches)
        assert value.values[0] == pytest.approx(2.5)
        assert value.stderr[0] == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
        assert value.n_batches == 4

    def test_scaled(self):
        value = DiagramValue.from_batches(np.array([[1.0], [3.0]])).scaled(-2)
        assert value.values[0] == pytest.approx(-4.0)
        assert value.stderr[0] >= 0
        assert np.array_equal(value.batch_values[:, 0], [-2.0, -6.0])

    def test_correlated_cancellation(self):
        value = DiagramValue.from_batches(np.array([[1.0], [2.0], [4.0]]))
        difference = value - value
        assert np.allclose(difference.values, 0.0)
        assert np.allclose(difference.stderr, 0.0)

    def test_deterministic_shift_keeps_error(self):
        value = DiagramValue.from_batches(np.array([[1.0], [2.0], [4.0]]))
        shifted = value + DiagramValue(np.array([10.0]))
        assert shifted.values[0] == pytest.approx(value.values[0] + 10)
        assert shifted.stderr[0] == pytest.approx(value.stderr[0])

    def test_independent_errors_add_in_quadrature(self):
        total = DiagramValue(np.array([1.0]), np.array([3.0])) + DiagramValue(np.array([1.0]), np.array([4.0]))
        assert total.stderr[0] == pytest.approx(5.0)


class TestEvaluateTerms:
    def test_weighted_sum_with_coupling(self):
        graph = initial_graph(2)
        evaluate = MagicMock(return_value=DiagramValue(np.array([2.0, 4.0])))
        terms = [Term(Fraction(1, 2), 0, graph), Term(-3, 2, graph)]
        total = evaluate_terms(terms, evaluate, coupling=0.1)
        expected = 0.5 * np.array([2.0, 4.0]) - 3 * 0.01 * np.array([2.0, 4.0])
        assert np.allclose(total.values, expected)
        assert evaluate.call_count == 2

    def test_bare_coefficients(self):
        evaluate = MagicMock(return_value=DiagramValue(np.array(1.0)))
        total = evaluate_terms([Term(6, 2, initial_graph(2))], evaluate)
        assert float(total.values) == pytest.approx(6.0)

    def test_empty_list_is_zero(self):
        assert float(evaluate_terms([], MagicMock()).values) == 0.0


class TestTermValuesFrame:
    @pytest.fixture
    def configurations(self):
        return np.array([[(0, 0), (0, 0)], [(1, 2), (3, 1)]])

    def test_columns_and_offsets(self, configurations):
        evaluate = MagicMock(return_value=DiagramValue(np.array([0.5, 0.25]), np.array([0.0, 0.01])))
        terms = [Term(Fraction(-3, 2), 1, initial_graph(2)), Term(6, 2, initial_graph(2))]
        frame = term_values_frame(terms, evaluate, configurations, graph_ids=["F1_0", "F2_0"])
        assert list(frame.columns) == ["graph_id", "lambda_power", "coeff", "config_id", "dx2", "dy2", "value", "stderr"]
        assert list(frame["graph_id"]) == ["F1_0", "F1_0", "F2_0", "F2_0"]
        assert list(frame["coeff"]) == ["-3/2", "-3/2", "6/1", "6/1"]
        assert list(frame["config_id"]) == ["c0", "c1", "c0", "c1"]
        assert (frame["dx2"].iloc[1], frame["dy2"].iloc[1]) == (2, -1)
        assert list(frame["value"]) == [0.5, 0.25, 0.5, 0.25]
        assert frame["stderr"].iloc[1] == pytest.approx(0.01)

    def test_scalar_value_broadcast(self, configurations):
        evaluate = MagicMock(return_value=DiagramValue(np.array(2.0)))
        frame = term_values_frame([Term(1, 0, initial_graph(2))], evaluate, configurations)
        assert list(frame["graph_id"]) == ["G0", "G0"]
        assert list(frame["value"]) == [2.0, 2.0]

    def test_empty_term_list(self, configurations):
        frame = term_values_frame([], MagicMock(), configurations)
        assert frame.empty
        assert "dy2" in frame.columns

    def test_mismatched_ids(self, configurations):
        with pytest.raises(ValueError):
            term_values_frame([Term(1, 0, initial_graph(2))], MagicMock(), configurations, graph_ids=[])
