from functools import partial
import logging
import multiprocessing as mp
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import hermite_e

from ._base import IDiagramEvaluator
from ._contraction import as_configurations, build_einsum, difference_index, pair_kernels, site_indices
from ._value import DiagramValue
from phi4lab.config import GlobalConfig
from phi4lab.graphs import IbpGraph
from phi4lab.lattice import LatticeField, TorusLattice

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


class InsufficientDataError(Exception):
    """
    Raised when there are too few batches to quote a batch-means error bar
    """

    def __init__(self, n_batches: int, min_batches: int):
        self.n_batches = n_batches
        self.min_batches = min_batches
        super().__init__(f"{n_batches} batches < {min_batches}")

    def __str__(self) -> str:
        return "insufficient data: {} batches, at least {} needed".format(self.n_batches, self.min_batches)


def wick_power(phi: np.ndarray, j: int, a: float) -> np.ndarray:
    """:phi^j: = a^(j/2) He_j(phi / sqrt(a)) with He_j the probabilists' Hermite polynomial.

    >>> wick_power(np.array([2.0]), 3, 0.5)  # 8 - 3 * 0.5 * 2
    array([5.])
    """
    if j < 0:
        raise ValueError(f"Wick power needs j >= 0, got {j}")
    if a <= 0:
        raise ValueError(f"Wick constant must be positive, got {a}")
    phi = np.asarray(phi, dtype=float)
    if j == 0:
        return np.ones_like(phi)
    coefficients = np.zeros(j + 1)
    coefficients[j] = 1.0
    return a ** (j / 2) * hermite_e.hermeval(phi / np.sqrt(a), coefficients)


def sample_values(
    graph: IbpGraph,
    fields: np.ndarray,
    a: float,
    lattice: TorusLattice,
    configurations: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Per-sample integrand of I_G: the C-edge contraction against the Wick powers of each field.

    Args:
        fields (np.ndarray): (B, n, n) field samples

    Returns:
        np.ndarray: (B, n_configs) for configurations, else (B,) + (n, n) * k
    """
    batch = len(fields)
    flat = fields.reshape(batch, lattice.n_sites)
    weights = {}
    for vertex in graph.vertices():
        j = graph.insertion_count(vertex)
        if j > 0:
            weights[vertex] = wick_power(flat, j, a)
    kernels = pair_kernels(graph, lattice)
    diff = difference_index(lattice)
    interior = list(graph.interior_vertices())
    boundary = list(range(graph.k))
    measure = lattice.spacing ** (2 * len(interior))

    if configurations is None:
        subscripts, operands, scalar = build_einsum(kernels, interior, {}, boundary, diff, weights or None)
        if weights:
            out = np.einsum(subscripts, *operands, optimize=True)
        else:
            out = np.broadcast_to(np.einsum(subscripts, *operands, optimize=True), (batch,) + (lattice.n_sites,) * graph.k)
        return measure * scalar * np.asarray(out).reshape((batch,) + lattice.shape * graph.k)

    sites = site_indices(configurations, lattice)
    out = np.empty((batch, len(sites)))
    for c, config_sites in enumerate(sites):
        pinned = {v: int(s) for v, s in zip(boundary, config_sites)}
        subscripts, operands, scalar = build_einsum(kernels, interior, pinned, [], diff, weights or None)
        if weights:
            out[:, c] = scalar * np.einsum(subscripts, *operands, optimize=True)
        elif operands:
            out[:, c] = scalar * np.einsum(subscripts, *operands, optimize=True)
        else:
            out[:, c] = scalar
    return measure * out


def _as_array(samples: Union[np.ndarray, Sequence[LatticeField]], lattice: Optional[TorusLattice]):
    if isinstance(samples, np.ndarray):
        if lattice is None:
            raise ValueError("pass the lattice when samples are a plain array")
        return samples.reshape((-1,) + lattice.shape), lattice
    samples = list(samples)
    if not samples:
        raise InsufficientDataError(0, 1)
    lattice = lattice or samples[0].lattice
    return np.stack([s.values for s in samples]), lattice


def _batch_mean(
    bounds: Tuple[int, int],
    graph: IbpGraph,
    fields: np.ndarray,
    a: float,
    lattice: TorusLattice,
    configurations: Optional[np.ndarray],
    chunk_size: int,
) -> np.ndarray:
    start, stop = bounds
    total = 0.0
    for begin in range(start, stop, chunk_size):
        chunk = sample_values(graph, fields[begin : min(begin + chunk_size, stop)], a, lattice, configurations)
        total = total + chunk.sum(axis=0)
    return total / (stop - start)


def eval_mixed(
    graph: IbpGraph,
    samples: Union[np.ndarray, Sequence[LatticeField]],
    a: float,
    lattice: Optional[TorusLattice] = None,
    configurations: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None,
    n_batches: Optional[int] = None,
    min_batches: Optional[int] = None,
    chunk_size: Optional[int] = None,
    n_processes: int = 1,
) -> DiagramValue:
    """Estimate I_G for a graph with Phi insertions by replacing E with an average over samples.

    Unweighted samples are split into contiguous batches (sample i goes to batch i * n_batches // n)
    and the error is the batch-means standard error. Batches are independent and can be reduced in
    worker processes; each batch mean is summed in sample order, so the result does not depend
    on n_processes. Weighted samples (quadrature nodes) give the exact weighted sum with stderr zero.

    Example Use Case:
    ```python
    from phi4lab.diagrams import eval_mixed
    from phi4lab.lattice import wick_constant

    value = eval_mixed(graph, chain_samples, wick_constant(lattice), lattice=lattice)
    value.values, value.stderr
    ```

    Args:
        graph (IbpGraph): any valid graph; pure graphs give a constant per sample
        samples (np.ndarray or list of LatticeField): (S, n, n) draws from the Gibbs measure
        a (float): Wick constant of the lattice
        lattice (TorusLattice, optional): needed when samples is a plain array
        configurations (np.ndarray, optional): (n_configs, k, 2) boundary sites; None for the full tensor
        weights (np.ndarray, optional): normalised quadrature weights, one per sample
        n_batches (int, optional): batch count. Defaults to the global config value.
        min_batches (int, optional): smallest batch count allowed. Defaults to the global config value.
        chunk_size (int, optional): samples contracted at once. Defaults to the global config value.
        n_processes (int, optional): worker processes over batches. Defaults to 1 (in process).

    Raises:
        InsufficientDataError: Raised if fewer than min_batches batches can be formed

    Returns:
        DiagramValue: estimate with batch-means stderr (zero for weighted samples)
    """
    fields, lattice = _as_array(samples, lattice)
    if n_batches is None:
        n_batches = GlobalConfig.get_value_from_config(["simulation", "n_batches"])
    if min_batches is None:
        min_batches = GlobalConfig.get_value_from_config(["diagrams", "min_batches"])
    if chunk_size is None:
        chunk_size = GlobalConfig.get_value_from_config(["diagrams", "chunk_size"])
    if configurations is not None:
        configurations = as_configurations(configurations, graph.k, lattice)
    elif graph.k > 2:
        raise ValueError("full tensors are only stored for k <= 2, pass configurations")
    n_samples = len(fields)

    if weights is not None:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (n_samples,):
            raise ValueError(f"{len(weights)} weights for {n_samples} samples")
        weights = weights / np.sum(weights)
        total = 0.0
        for start in range(0, n_samples, chunk_size):
            chunk = sample_values(graph, fields[start : start + chunk_size], a, lattice, configurations)
            total = total + np.tensordot(weights[start : start + chunk_size], chunk, axes=1)
        return DiagramValue(total, configurations=configurations)

    n_batches = min(n_batches, n_samples)
    if n_batches < min_batches:
        raise InsufficientDataError(n_batches, min_batches)
    batch_ids = np.arange(n_samples) * n_batches // n_samples
    edges = np.concatenate([[0], np.cumsum(np.bincount(batch_ids, minlength=n_batches))])
    bounds = [(int(start), int(stop)) for start, stop in zip(edges[:-1], edges[1:])]
    worker = partial(
        _batch_mean, graph=graph, fields=fields, a=a, lattice=lattice, configurations=configurations, chunk_size=chunk_size
    )
    if n_processes > 1:
        with mp.Pool(processes=n_processes) as working_computation_pool:
            batch_means = np.stack(working_computation_pool.map(worker, bounds))
    else:
        batch_means = np.stack(list(map(worker, bounds)))
    logger.debug(f"eval_mixed k={graph.k} l={graph.interior_count}: {n_samples} samples in {n_batches} batches")
    return DiagramValue.from_batches(batch_means, configurations)


class MixedEvaluator(IDiagramEvaluator):
    """eval_mixed bound to a fixed sample set"""

    def __init__(self, samples, a: float, lattice: Optional[TorusLattice] = None, weights: Optional[np.ndarray] = None, **kwargs):
        self.samples = samples
        self.a = a
        self.lattice = lattice
        self.weights = weights
        self.kwargs = kwargs

    def evaluate(self, graph: IbpGraph, configurations: Optional[np.ndarray] = None) -> DiagramValue:
        return eval_mixed(graph, self.samples, self.a, self.lattice, configurations, self.weights, **self.kwargs)
