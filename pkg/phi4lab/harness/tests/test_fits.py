import numpy as np
import pytest

from .._fits import PowerLawFit, fit_power_law, jackknife


class TestFitPowerLaw:
    def test_exact_power_law(self):
        lambdas = np.array([0.02, 0.05, 0.1, 0.2])
        fit = fit_power_law(lambdas, -3.0 * lambdas**2)
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(np.log(3.0))
        assert fit.n_points == 4
        assert np.allclose(fit.predict(lambdas), 3.0 * lambdas**2)

    def test_weighted_fit_reports_errors(self):
        lambdas = np.array([0.05, 0.1, 0.2])
        values = lambdas**3 * np.array([1.01, 0.99, 1.0])
        fit = fit_power_law(lambdas, values, 0.01 * values)
        assert fit.slope == pytest.approx(3.0, abs=0.05)
        assert fit.slope_stderr > 0

    def test_two_points(self):
        fit = fit_power_law([0.1, 0.2], [0.01, 0.04])
        assert fit.slope == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "lambdas, values",
        [([0.1], [1.0]), ([0.1, 0.2], [1.0]), ([0.0, 0.2], [1.0, 2.0]), ([0.1, 0.2], [0.0, 1.0])],
    )
    def test_invalid_input(self, lambdas, values):
        with pytest.raises(ValueError):
            fit_power_law(lambdas, values)

    def test_as_dict(self):
        row = PowerLawFit(2.0, 1.0, 0.1, 0.2, 3).as_dict("u4_")
        assert row == {"u4_slope": 2.0, "u4_slope_stderr": 0.1, "u4_intercept": 1.0, "u4_intercept_stderr": 0.2, "u4_n_points": 3}


class TestJackknife:
    def test_mean_matches_standard_error(self):
        batches = np.random.default_rng(3).standard_normal(20)
        value, stderr = jackknife(batches, lambda mean: mean)
        assert value == pytest.approx(batches.mean())
        assert stderr == pytest.approx(batches.std(ddof=1) / np.sqrt(20))

    def test_nonlinear_statistic(self):
        batches = np.array([[1.0, 2.0], [1.2, 1.8], [0.8, 2.2], [1.0, 2.0]])
        value, stderr = jackknife(batches, lambda mean: float(np.max(np.abs(mean))))
        assert value == pytest.approx(2.0)
        assert stderr > 0

    def test_single_batch(self):
        with pytest.raises(ValueError):
            jackknife(np.ones(1), np.mean)
