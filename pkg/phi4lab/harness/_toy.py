import logging
import math

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.special import gammaln

from ._reports import PlotSpec, Report
from ._spec import ExperimentError
from phi4lab.utils import log_decorator

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

MAX_TERMS = 200
QUAD_RELATIVE_TOLERANCE = 1e-10


def toy_partition_function(coupling: float) -> float:
    """Z(lambda) = integral of exp(-x^2 - lambda x^4) over the real line

    Raises:
        ExperimentError: Raised if the adaptive quadrature reports a problem
    """
    result = quad(
        lambda x: math.exp(-x * x - coupling * x**4),
        -np.inf,
        np.inf,
        epsabs=0.0,
        epsrel=QUAD_RELATIVE_TOLERANCE,
        limit=200,
        full_output=1,
    )
    if len(result) > 3:
        raise ExperimentError("toy", f"quadrature failed at lambda={coupling}: {result[3]}")
    return float(result[0])


def log_double_factorial(m):
    """log m!! for odd m >= -1, from (2j - 1)!! = (2j)! / (2^j j!) with j = (m + 1) / 2; accepts arrays"""
    j = (np.asarray(m, dtype=float) + 1) / 2
    return gammaln(2 * j + 1) - j * math.log(2) - gammaln(j + 1)


def toy_series_terms(coupling: float, n_terms: int) -> pd.DataFrame:
    """Terms (-lambda)^n / n! (4n-1)!! sqrt(pi) / 2^(2n), n < n_terms, built in log space"""
    n = np.arange(n_terms)
    log_moment = log_double_factorial(4 * n - 1) + 0.5 * math.log(math.pi) - 2 * n * math.log(2)
    if coupling > 0:
        log_magnitude = n * math.log(coupling) - gammaln(n + 1) + log_moment
        magnitude = np.exp(log_magnitude)
    else:
        magnitude = np.where(n == 0, math.sqrt(math.pi), 0.0)
    terms = np.where(n % 2 == 0, 1.0, -1.0) * magnitude
    return pd.DataFrame({"n": n, "term": terms, "abs_term": magnitude, "partial_sum": np.cumsum(terms)})


@log_decorator
def run_toy(coupling: float, n_terms: int) -> Report:
    """Zero-dimensional Phi^4 integral against its divergent perturbation series.

    Example Use Case:
    ```python
    from phi4lab.harness import run_toy

    report = run_toy(0.01, 100)
    report.summary["partition_function"]  # 1.7597...
    ```

    Args:
        coupling (float): lambda >= 0
        n_terms (int): number of series terms, 1 to 200

    Raises:
        ExperimentError: Raised for invalid arguments or a quadrature failure

    Returns:
        Report: per-term table and a summary with the crossover and optimal truncation
    """
    if coupling < 0:
        raise ExperimentError("toy", f"lambda must be nonnegative, got {coupling}")
    if not 1 <= n_terms <= MAX_TERMS:
        raise ExperimentError("toy", f"n_terms must lie in 1..{MAX_TERMS}, got {n_terms}")
    exact = toy_partition_function(coupling)
    table = toy_series_terms(coupling, n_terms)
    table["error"] = np.abs(table["partial_sum"] - exact)
    magnitude = table["abs_term"].to_numpy()
    growing = np.nonzero((magnitude[1:] > magnitude[:-1]) & (magnitude[:-1] > 0))[0]
    crossover = int(growing[0] + 1) if len(growing) else -1
    nonzero = np.nonzero(magnitude > 0)[0]
    optimal = int(nonzero[np.argmin(magnitude[nonzero])])
    summary = {
        "lambda": coupling,
        "partition_function": exact,
        "n_terms": n_terms,
        "crossover_index": crossover,
        "optimal_index": optimal,
        "optimal_partial_sum": float(table["partial_sum"].iloc[optimal]),
        "optimal_error": float(table["error"].iloc[optimal]),
    }
    logger.debug(f"toy lambda={coupling}: Z={exact:.10g}, terms grow from n={crossover}, optimal n={optimal}")
    plot = PlotSpec(x="n", y="abs_term", logx=False)
    return Report(f"toy_lambda{coupling:g}", table, summary, plot=plot)
