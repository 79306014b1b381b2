from dataclasses import dataclass
import logging
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


@dataclass
class DiagramValue:
    """Value of a diagram integral over boundary configurations.

    `values` is either the full tensor over Lambda^k (shape (n, n) * k) or one entry per stored
    configuration. Monte Carlo values keep their per-batch means in `batch_values` so that linear
    combinations evaluated on the same samples carry correlated errors correctly.
    """

    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    configurations: Optional[np.ndarray] = None
    batch_values: Optional[np.ndarray] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.stderr is None:
            self.stderr = np.zeros_like(self.values)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if np.any(self.stderr < 0):
            raise ValueError("stderr must be nonnegative")

    @property
    def is_deterministic(self) -> bool:
        return self.batch_values is None and not np.any(self.stderr)

    @property
    def n_batches(self) -> int:
        return 0 if self.batch_values is None else len(self.batch_values)

    @staticmethod
    def from_batches(batch_values: np.ndarray, configurations: Optional[np.ndarray] = None) -> "DiagramValue":
        """Mean and batch-means standard error of per-batch estimates (first axis)"""
        batch_values = np.asarray(batch_values, dtype=float)
        n_batches = len(batch_values)
        values = batch_values.mean(axis=0)
        stderr = batch_values.std(axis=0, ddof=1) / np.sqrt(n_batches)
        return DiagramValue(values, stderr, configurations, batch_values)

    def scaled(self, factor: float) -> "DiagramValue":
        batches = None if self.batch_values is None else factor * self.batch_values
        return DiagramValue(factor * self.values, abs(factor) * self.stderr, self.configurations, batches)

    def __add__(self, other: "DiagramValue") -> "DiagramValue":
        configurations = self.configurations if self.configurations is not None else other.configurations
        if self.batch_values is not None and other.batch_values is not None:
            if self.n_batches == other.n_batches:
                return DiagramValue.from_batches(self.batch_values + other.batch_values, configurations)
        elif self.batch_values is not None and other.is_deterministic:
            return DiagramValue.from_batches(self.batch_values + other.values, configurations)
        elif other.batch_values is not None and self.is_deterministic:
            return DiagramValue.from_batches(self.values + other.batch_values, configurations)
        return DiagramValue(self.values + other.values, np.hypot(self.stderr, other.stderr), configurations)

    def __sub__(self, other: "DiagramValue") -> "DiagramValue":
        return self + other.scaled(-1.0)

    def __repr__(self) -> str:
        return f"DiagramValue(shape={self.values.shape}, max|value|={np.max(np.abs(self.values)):.4g})"


def evaluate_terms(terms: Iterable, evaluate: Callable, coupling: Optional[float] = None) -> DiagramValue:
    """Sum of coeff * I_G over a term list, times coupling^lambda_power when a coupling is given.

    Args:
        terms (Iterable[Term]): terms to evaluate
        evaluate (Callable): maps a graph to its DiagramValue
        coupling (float, optional): lambda. Defaults to None (bare coefficients).

    Returns:
        DiagramValue: the weighted sum; a scalar zero for an empty list
    """
    total = DiagramValue(np.zeros(()))
    for term in terms:
        factor = float(term.coeff)
        if coupling is not None:
            factor *= coupling**term.lambda_power
        total = total + evaluate(term.graph).scaled(factor)
    return total


def term_values_frame(
    terms: Sequence,
    evaluate: Callable,
    configurations: np.ndarray,
    graph_ids: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """One row per (term, configuration) with the bare diagram value I_G, before the coefficient.

    Columns are graph_id, lambda_power, coeff (an exact "p/q" string), config_id, the offsets
    dx_i, dy_i of points 2..k from the first point, value and stderr.
    """
    configurations = np.asarray(configurations, dtype=int)
    n_configs, k = configurations.shape[0], configurations.shape[1]
    graph_ids = list(graph_ids) if graph_ids is not None else [f"G{index}" for index in range(len(terms))]
    if len(graph_ids) != len(terms):
        raise ValueError(f"{len(graph_ids)} graph ids for {len(terms)} terms")
    offsets = configurations[:, 1:, :] - configurations[:, :1, :]
    offset_columns = {}
    for i in range(1, k):
        offset_columns[f"dx{i + 1}"] = offsets[:, i - 1, 0]
        offset_columns[f"dy{i + 1}"] = offsets[:, i - 1, 1]
    frames = []
    for graph_id, term in zip(graph_ids, terms):
        value = evaluate(term.graph)
        frame = pd.DataFrame(
            {
                "graph_id": graph_id,
                "lambda_power": term.lambda_power,
                "coeff": f"{term.coeff.numerator}/{term.coeff.denominator}",
                "config_id": [f"c{c}" for c in range(n_configs)],
                **offset_columns,
                "value": np.broadcast_to(value.values, (n_configs,)),
                "stderr": np.broadcast_to(value.stderr, (n_configs,)),
            }
        )
        frames.append(frame)
    columns = ["graph_id", "lambda_power", "coeff", "config_id", *offset_columns, "value", "stderr"]
    if not frames:
        return pd.DataFrame(columns=columns)
    logger.debug(f"tabulated {len(terms)} terms on {n_configs} configurations")
    return pd.concat(frames, ignore_index=True)[columns]
