import math

import numpy as np
import pytest

from .._spec import ExperimentError
from .._toy import log_double_factorial, run_toy, toy_partition_function, toy_series_terms


class TestToySeries:
    def test_partition_function(self):
        assert toy_partition_function(0.01) == pytest.approx(1.7597, abs=1e-4)
        assert toy_partition_function(0.0) == pytest.approx(math.sqrt(math.pi), rel=1e-10)

    def test_first_terms(self):
        terms = toy_series_terms(0.01, 2)
        assert terms["term"].iloc[0] == pytest.approx(1.7725, abs=5e-4)
        assert terms["term"].iloc[1] == pytest.approx(-0.0133, abs=5e-4)
        assert terms["partial_sum"].iloc[1] == pytest.approx(1.7592, abs=5e-4)

    def test_term_seventy(self):
        terms = toy_series_terms(0.01, 71)
        assert 0.8 <= terms["abs_term"].iloc[70] <= 1.0
        assert terms["term"].iloc[70] > 0

    @pytest.mark.parametrize("n", [9, 10, 20, 40, 70])
    def test_terms_match_exact_arithmetic(self, n):
        double_factorial = math.prod(range(1, 4 * n, 2))
        exact = 0.01**n * (double_factorial / math.factorial(n) / 4**n) * math.sqrt(math.pi)
        terms = toy_series_terms(0.01, n + 1)
        assert terms["abs_term"].iloc[n] == pytest.approx(exact, rel=1e-9)
        assert np.sign(terms["term"].iloc[n]) == (-1) ** n

    def test_log_double_factorial_vectorised(self):
        values = log_double_factorial(np.array([39, 79]))
        assert values[0] == pytest.approx(math.log(math.prod(range(1, 40, 2))))
        assert values[1] == pytest.approx(math.log(math.prod(range(1, 80, 2))))

    @pytest.mark.parametrize("m, expected", [(-1, 1), (1, 1), (3, 3), (7, 105)])
    def test_double_factorial(self, m, expected):
        assert log_double_factorial(m) == pytest.approx(math.log(expected))

    def test_zero_coupling(self):
        terms = toy_series_terms(0.0, 5)
        assert np.allclose(terms["term"], [math.sqrt(math.pi), 0, 0, 0, 0])


class TestRunToy:
    def test_report(self):
        report = run_toy(0.01, 100)
        summary = report.summary
        assert report.passed
        assert len(report.table) == 100
        assert summary["partition_function"] == pytest.approx(1.7597, abs=1e-4)
        assert 0 < summary["crossover_index"] < 70
        assert summary["optimal_index"] in (summary["crossover_index"] - 1, summary["crossover_index"])
        assert summary["optimal_error"] < 1e-8
        assert report.table["error"].iloc[99] > 1.0

    @pytest.mark.parametrize("coupling, n_terms", [(-0.1, 10), (0.01, 0), (0.01, 201)])
    def test_invalid_arguments(self, coupling, n_terms):
        with pytest.raises(ExperimentError):
            run_toy(coupling, n_terms)
