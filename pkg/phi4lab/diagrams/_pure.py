import logging
from typing import Dict, Optional, Tuple

import networkx as nx
import numpy as np

from ._base import IDiagramEvaluator
from ._contraction import as_configurations, build_einsum, difference_index, pair_kernels, site_indices
from ._value import DiagramValue
from phi4lab.config import GlobalConfig
from phi4lab.graphs import IbpGraph, n_phi
from phi4lab.lattice import TorusLattice

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


class DiagramBudgetError(Exception):
    """
    Raised when a diagram has more loops than the loop budget or its residual core is too expensive
    """

    def __init__(self, graph_name: str = "diagram", message: str = "over budget"):
        self.graph_name = graph_name
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.graph_name, self.message)


def loop_count(graph: IbpGraph) -> int:
    """Cycle rank E - V + (number of components) of the underlying multigraph"""
    multigraph = nx.MultiGraph()
    multigraph.add_nodes_from(graph.vertices())
    multigraph.add_edges_from((u, v) for u, v, _ in graph.edges)
    return multigraph.number_of_edges() - multigraph.number_of_nodes() + nx.number_connected_components(multigraph)


def _fft_convolve(f: np.ndarray, g: np.ndarray, lattice: TorusLattice) -> np.ndarray:
    return np.real(lattice.inverse_fourier(lattice.fourier(f) * lattice.fourier(g)))


def eliminate_chains(graph: IbpGraph, lattice: TorusLattice) -> Tuple[Dict[Tuple[int, int], np.ndarray], list, float]:
    """Integrate out interior vertices with at most two distinct neighbours.

    Multi-edges become pointwise products of C; a vertex between a and b is replaced by the
    convolution K_aw * K_wb, a leaf contributes the scalar eps^2 sum K. All kernels stay even
    functions of the separation, so orientation never matters.

    Returns:
        (kernels, residual interior vertices, scalar factor)
    """
    kernels = pair_kernels(graph, lattice)
    interior = list(graph.interior_vertices())
    scalar = 1.0

    def neighbours(w):
        return sorted({u if v == w else v for (u, v) in kernels if w in (u, v)})

    def key(u, v):
        return (u, v) if u < v else (v, u)

    eliminated = True
    while eliminated:
        eliminated = False
        for w in interior:
            adjacent = neighbours(w)
            if len(adjacent) > 2:
                continue
            if len(adjacent) == 0:
                scalar *= lattice.side_length**2
            elif len(adjacent) == 1:
                scalar *= lattice.spacing**2 * float(np.sum(kernels.pop(key(w, adjacent[0]))))
            else:
                a, b = adjacent
                merged = _fft_convolve(kernels.pop(key(a, w)), kernels.pop(key(w, b)), lattice)
                kernels[key(a, b)] = kernels[key(a, b)] * merged if key(a, b) in kernels else merged
            interior.remove(w)
            eliminated = True
            break
    return kernels, interior, scalar


def eval_pure(
    graph: IbpGraph,
    lattice: TorusLattice,
    configurations: Optional[np.ndarray] = None,
    loop_budget: Optional[int] = None,
    cost_budget: Optional[float] = None,
) -> DiagramValue:
    """Deterministic value of a pure Feynman diagram: eps^2-sums over the interior positions of
    the product of C over the edges.

    Degree-two chains are removed by FFT convolution first; the residual core is summed by einsum.

    Example Use Case:
    ```python
    from phi4lab.diagrams import eval_pure
    from phi4lab.graphs import expand
    from phi4lab.lattice import TorusLattice

    lattice = TorusLattice(8.0, 1.0, 1.0)
    sunset = expand(2, 2).f_terms[2][0].graph
    value = eval_pure(sunset, lattice).values  # shape (8, 8, 8, 8)
    ```

    Args:
        graph (IbpGraph): graph with n_phi = 0
        lattice (TorusLattice): lattice to evaluate on
        configurations (np.ndarray, optional): (n_configs, k, 2) boundary site indices. Defaults to
            None, the full tensor over Lambda^k (only k <= 2).
        loop_budget (int, optional): largest accepted cycle rank. Defaults to the global config.
        cost_budget (float, optional): largest accepted n_sites^(residual vertices) * n_configs.

    Raises:
        ValueError: Raised for graphs with Phi insertions, or k > 2 without configurations
        DiagramBudgetError: Raised if the loop or cost budget is exceeded

    Returns:
        DiagramValue: deterministic values, stderr zero
    """
    if n_phi(graph) != 0:
        raise ValueError("eval_pure needs a graph without Phi insertions")
    if loop_budget is None:
        loop_budget = GlobalConfig.get_value_from_config(["diagrams", "loop_budget"])
    if cost_budget is None:
        cost_budget = GlobalConfig.get_value_from_config(["diagrams", "cost_budget"])
    loops = loop_count(graph)
    if loops > loop_budget:
        raise DiagramBudgetError(f"graph with {graph.interior_count} vertices", f"{loops} loops > budget {loop_budget}")

    kernels, residual, scalar = eliminate_chains(graph, lattice)
    scalar *= lattice.spacing ** (2 * len(residual))
    configs = None if configurations is None else as_configurations(configurations, graph.k, lattice)
    n_configs = 1 if configs is None else len(configs)
    cost = float(lattice.n_sites) ** len(residual) * n_configs
    if cost > cost_budget:
        raise DiagramBudgetError(f"graph with {graph.interior_count} vertices", f"residual cost {cost:.3g} > {cost_budget:.3g}")
    diff = difference_index(lattice)
    boundary = list(range(graph.k))

    if configs is None:
        if graph.k > 2:
            raise ValueError("full tensors are only stored for k <= 2, pass configurations")
        # translation invariance: pin the last boundary vertex at the origin
        subscripts, operands, pinned_scalar = build_einsum(kernels, residual, {boundary[-1]: 0}, boundary[:-1], diff)
        relative = scalar * pinned_scalar * _contract(subscripts, operands, lattice.n_sites ** (graph.k - 1))
        values = _full_tensor(relative, graph.k, lattice)
        return DiagramValue(values)

    sites = site_indices(configs, lattice)
    values = np.empty(len(configs))
    for c, config_sites in enumerate(sites):
        pinned = {v: int(s) for v, s in zip(boundary, config_sites)}
        subscripts, operands, pinned_scalar = build_einsum(kernels, residual, pinned, [], diff)
        values[c] = scalar * pinned_scalar * float(_contract(subscripts, operands, 1))
    logger.debug(f"eval_pure k={graph.k} l={graph.interior_count}: {len(configs)} configurations, {len(residual)} residual vertices")
    return DiagramValue(values, configurations=configs)


def _contract(subscripts: str, operands: list, size: int) -> np.ndarray:
    if not operands:
        return np.ones(size) if size > 1 else np.ones(())
    return np.einsum(subscripts, *operands, optimize=True)


def _full_tensor(relative: np.ndarray, k: int, lattice: TorusLattice) -> np.ndarray:
    """T(x_1, .., x_k) from g(x_1 - x_k, .., x_(k-1) - x_k)"""
    n = lattice.n
    if k == 1:
        return np.full(lattice.shape, float(relative))
    g = np.asarray(relative).reshape(lattice.shape)
    i_1, j_1, i_2, j_2 = np.indices((n, n, n, n))
    return g[(i_1 - i_2) % n, (j_1 - j_2) % n]


class PureEvaluator(IDiagramEvaluator):
    """eval_pure bound to a lattice and budgets"""

    def __init__(self, lattice: TorusLattice, loop_budget: Optional[int] = None, cost_budget: Optional[float] = None):
        self.lattice = lattice
        self.loop_budget = loop_budget
        self.cost_budget = cost_budget

    def evaluate(self, graph: IbpGraph, configurations: Optional[np.ndarray] = None) -> DiagramValue:
        return eval_pure(graph, self.lattice, configurations, self.loop_budget, self.cost_budget)
