from dataclasses import dataclass
import logging
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from ._base import IPowerLawFitter

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


@dataclass(frozen=True)
class PowerLawFit:
    """|value| ~ exp(intercept) * lambda^slope"""

    slope: float
    intercept: float
    slope_stderr: float
    intercept_stderr: float
    n_points: int

    def predict(self, lambdas) -> np.ndarray:
        return np.exp(self.intercept) * np.asarray(lambdas, dtype=float) ** self.slope

    def as_dict(self, prefix: str = "") -> dict:
        return {
            f"{prefix}slope": self.slope,
            f"{prefix}slope_stderr": self.slope_stderr,
            f"{prefix}intercept": self.intercept,
            f"{prefix}intercept_stderr": self.intercept_stderr,
            f"{prefix}n_points": self.n_points,
        }


def _line(x, slope, intercept):
    return slope * x + intercept


class WeightedLogLogFitter(IPowerLawFitter):
    """Weighted least squares of log|value| against log lambda.

    With errors the log-space sigma is error/|value| and the covariance is taken as absolute;
    without errors it is scaled by the residual variance.
    """

    def fit(self, lambdas: Sequence[float], values: Sequence[float], errors: Optional[Sequence[float]] = None) -> PowerLawFit:
        lambdas, values = np.asarray(lambdas, dtype=float), np.abs(np.asarray(values, dtype=float))
        if len(lambdas) != len(values):
            raise ValueError("lambdas and values differ in length")
        if len(lambdas) < 2:
            raise ValueError(f"a power law fit needs at least 2 points, got {len(lambdas)}")
        if np.any(lambdas <= 0) or np.any(values <= 0):
            raise ValueError("power law fits need positive lambdas and nonzero values")
        x, y = np.log(lambdas), np.log(values)
        sigma = None
        if errors is not None and np.all(np.asarray(errors) > 0):
            sigma = np.asarray(errors, dtype=float) / values
        guess = np.polyfit(x, y, 1)
        if len(x) == 2 and sigma is None:
            return PowerLawFit(float(guess[0]), float(guess[1]), 0.0, 0.0, 2)
        params, covariance = curve_fit(_line, x, y, p0=guess, sigma=sigma, absolute_sigma=sigma is not None)
        stderr = np.sqrt(np.diag(covariance))
        result = PowerLawFit(float(params[0]), float(params[1]), float(stderr[0]), float(stderr[1]), len(x))
        logger.debug(f"power law fit over {len(x)} points: slope {result.slope:.3f} +- {result.slope_stderr:.3f}")
        return result


def fit_power_law(lambdas, values, errors=None) -> PowerLawFit:
    """Fit |value| = A lambda^slope in log-log space, see WeightedLogLogFitter"""
    return WeightedLogLogFitter().fit(lambdas, values, errors)


def jackknife(batch_values: np.ndarray, statistic: Callable[[np.ndarray], float]):
    """Value and jackknife error of a statistic of the batch mean.

    Args:
        batch_values (np.ndarray): per-batch estimates, batches on the first axis
        statistic (Callable): maps a mean over batches to a number

    Returns:
        Tuple[float, float]: statistic of the full mean and its jackknife standard error
    """
    batch_values = np.asarray(batch_values, dtype=float)
    n_batches = len(batch_values)
    if n_batches < 2:
        raise ValueError("jackknife needs at least 2 batches")
    total = batch_values.sum(axis=0)
    estimates = np.array([statistic((total - batch_values[b]) / (n_batches - 1)) for b in range(n_batches)])
    variance = np.sum((estimates - estimates.mean()) ** 2) * ((n_batches - 1) / n_batches)
    return float(statistic(total / n_batches)), float(np.sqrt(variance))
