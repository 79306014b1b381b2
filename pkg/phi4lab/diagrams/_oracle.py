from functools import cached_property
import logging
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cholesky
from scipy.special import roots_hermitenorm

from ._base import IOracle
from ._contraction import as_configurations
from ._mixed import sample_values
from ._value import DiagramValue
from phi4lab.config import GlobalConfig
from phi4lab.graphs import IbpGraph
from phi4lab.lattice import TorusLattice, wick_constant
from phi4lab.utils import log_decorator

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


class QuadratureConvergenceError(Exception):
    """
    Raised when refining the quadrature grid moves the reference moments by more than the tolerance
    """

    def __init__(self, quantity: str = "quadrature", message: str = "did not converge"):
        self.quantity = quantity
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.quantity, self.message)


def covariance_matrix(lattice: TorusLattice) -> np.ndarray:
    """Cov[Phi(x_s), Phi(x_t)] = C(x_s - x_t) for the free field, in flat site order"""
    n = lattice.n
    i, j = np.divmod(np.arange(lattice.n_sites), n)
    green = lattice.green_kernel.values
    return green[(i[:, None] - i[None, :]) % n, (j[:, None] - j[None, :]) % n]


class QuadratureOracle(IOracle):
    """Exact expectations under the lattice Gibbs measure on a tiny torus.

    The free Gaussian part is whitened, Phi = L t with L L^T the covariance, and integrated with a
    tensor Gauss-Hermite rule in t; the interaction enters as the residual weight
    exp(-eps^2 sum (lambda/4 Phi^4 - 3/2 lambda a Phi^2)). On construction the partition function
    and <Phi(0)^2> are recomputed on a finer rule and compared.

    Example Use Case:
    ```python
    from phi4lab.diagrams import QuadratureOracle, oracle_moments
    from phi4lab.lattice import TorusLattice

    oracle = QuadratureOracle(TorusLattice(2.0, 1.0, 1.0), coupling=0.1)
    oracle_moments(oracle, [2, 0, 0, 0])  # E[Phi(0)^2]
    ```
    """

    def __init__(
        self,
        lattice: TorusLattice,
        coupling: float,
        nodes: Optional[int] = None,
        check_nodes: Optional[int] = None,
        tolerance: Optional[float] = None,
        chunk_size: int = 65536,
    ):
        """Instantiate a QuadratureOracle

        Args:
            lattice (TorusLattice): lattice with at most `max_sites` sites
            coupling (float): lambda >= 0
            nodes (int, optional): Gauss-Hermite nodes per site. Defaults to the global config value.
            check_nodes (int, optional): nodes of the refinement check, 0 skips it. Defaults to the
                global config value.
            tolerance (float, optional): relative tolerance of the refinement check.
            chunk_size (int, optional): grid points per vectorised block. Defaults to 65536.

        Raises:
            ValueError: Raised for a negative coupling or a lattice/grid above the budget
            QuadratureConvergenceError: Raised if the refinement check fails
        """
        quadrature = GlobalConfig().read()["quadrature"]
        self.lattice = lattice
        self.coupling = float(coupling)
        self.nodes = nodes or quadrature["nodes"]
        self.check_nodes = quadrature["check_nodes"] if check_nodes is None else check_nodes
        self.tolerance = tolerance or quadrature["quadrature_tolerance"]
        self.chunk_size = chunk_size
        if self.coupling < 0:
            raise ValueError(f"coupling must be nonnegative, got {coupling}")
        if lattice.n_sites > quadrature["max_sites"]:
            raise ValueError(f"{lattice.n_sites} sites > {quadrature['max_sites']}: tensor quadrature infeasible")
        largest = max(self.nodes, self.check_nodes or 0)
        if largest**lattice.n_sites > quadrature["max_grid_points"]:
            raise ValueError(f"{largest}^{lattice.n_sites} grid points exceed the budget")
        self.wick_constant = wick_constant(lattice)
        self._factor = cholesky(covariance_matrix(lattice), lower=True)
        if self.check_nodes:
            self.check_convergence()

    @property
    def mass(self) -> float:
        return self.lattice.mass

    def potential(self, phi: np.ndarray) -> np.ndarray:
        """eps^2 sum_x (lambda/4 Phi^4 - 3/2 lambda a Phi^2) per row of flat fields"""
        lam, a = self.coupling, self.wick_constant
        return self.lattice.spacing**2 * np.sum(lam / 4 * phi**4 - 1.5 * lam * a * phi**2, axis=-1)

    def _grid(self, nodes: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yields (flat fields (B, n_sites), unnormalised weights (B,)) over the tensor grid"""
        points, weights = roots_hermitenorm(nodes)
        weights = weights / np.sqrt(2 * np.pi)
        dim = self.lattice.n_sites
        total = nodes**dim
        for start in range(0, total, self.chunk_size):
            digits = np.stack(np.unravel_index(np.arange(start, min(start + self.chunk_size, total)), (nodes,) * dim), axis=1)
            phi = points[digits] @ self._factor.T
            yield phi, np.prod(weights[digits], axis=1) * np.exp(-self.potential(phi))

    def _integrate(self, func: Callable[[np.ndarray], np.ndarray], nodes: int):
        numerator, norm = 0.0, 0.0
        for phi, weight in self._grid(nodes):
            values = np.asarray(func(phi.reshape((-1,) + self.lattice.shape)))
            numerator = numerator + np.tensordot(weight, values, axes=1)
            norm += weight.sum()
        return numerator, norm

    @cached_property
    def partition_function(self) -> float:
        """Z relative to the free Gaussian measure"""
        return float(self._integrate(lambda fields: np.zeros(len(fields)), self.nodes)[1])

    def expectation(self, func: Callable[[np.ndarray], np.ndarray]):
        """Normalised E[func(Phi)] for a function of (B, n, n) field batches returning (B, ...) values"""
        numerator, norm = self._integrate(func, self.nodes)
        return numerator / norm

    @log_decorator
    def check_convergence(self):
        def second_moment(fields):
            return fields[:, 0, 0] ** 2

        coarse, coarse_norm = self._integrate(second_moment, self.nodes)
        fine, fine_norm = self._integrate(second_moment, self.check_nodes)
        for name, a, b in (("partition function", coarse_norm, fine_norm), ("<Phi(0)^2>", coarse / coarse_norm, fine / fine_norm)):
            change = abs(a - b) / abs(b)
            if change > self.tolerance:
                raise QuadratureConvergenceError(name, f"changed by {change:.2e} from {self.nodes} to {self.check_nodes} nodes")
        logger.debug(f"oracle M={self.lattice.side_length} lambda={self.coupling}: converged, Z={coarse_norm:.12g}")

    def evaluate_graph(self, graph: IbpGraph, configurations: Optional[np.ndarray] = None) -> DiagramValue:
        """I_G with the expectation taken exactly; stderr zero"""
        if configurations is not None:
            configurations = as_configurations(configurations, graph.k, self.lattice)
        elif graph.k > 2:
            raise ValueError("full tensors are only stored for k <= 2, pass configurations")

        def integrand(fields):
            return sample_values(graph, fields, self.wick_constant, self.lattice, configurations)

        return DiagramValue(self.expectation(integrand), configurations=configurations)


def oracle_moments(oracle: QuadratureOracle, monomial: Sequence[int]) -> float:
    """E[prod_s Phi(x_s)^(e_s)] for one exponent per site (flat site order)

    Raises:
        ValueError: Raised if the exponent list does not match the sites or an exponent exceeds 8
    """
    exponents = np.asarray(monomial, dtype=int)
    if exponents.shape != (oracle.lattice.n_sites,):
        raise ValueError(f"need {oracle.lattice.n_sites} exponents, got {len(exponents)}")
    if np.any(exponents < 0) or np.any(exponents > 8):
        raise ValueError("exponents must lie in 0..8")

    def monomial_values(fields):
        return np.prod(fields.reshape(len(fields), -1) ** exponents, axis=1)

    return float(oracle.expectation(monomial_values))
