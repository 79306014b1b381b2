from dataclasses import dataclass
import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._oracle import QuadratureOracle
from ._pure import eval_pure
from ._mixed import wick_power
from ._value import evaluate_terms
from phi4lab.graphs import Expansion, expand

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

Site = Tuple[int, int]


@dataclass
class IdentityCheck:
    """One side-by-side comparison of an exact identity, both sides from the oracle"""

    name: str
    coupling: float
    lhs: float
    rhs: float
    tolerance: float

    @property
    def residual(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return abs(self.lhs - self.rhs) / scale if scale > 0 else 0.0

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def as_row(self) -> dict:
        return {
            "identity": self.name,
            "lambda": self.coupling,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _green_batch(fields: np.ndarray, oracle: QuadratureOracle) -> np.ndarray:
    """I(f)(x) = eps^2 sum_z C(x - z) f(z) for a batch of fields"""
    multiplier = oracle.lattice.multiplier.values
    return np.real(np.fft.ifft2(np.fft.fft2(fields, axes=(1, 2)) / (2.0 * multiplier), axes=(1, 2)))


def _cubic(fields: np.ndarray, oracle: QuadratureOracle) -> np.ndarray:
    return _green_batch(wick_power(fields, 3, oracle.wick_constant), oracle)


def check_two_point_ibp(oracle: QuadratureOracle, x: Site, y: Site, tolerance: float) -> IdentityCheck:
    """C(x - y) = E[Phi(x) Phi(y)] + lambda E[Phi(y) I(:Phi^3:)(x)]"""
    lam = oracle.coupling
    green = oracle.lattice.green_kernel(x[0] - y[0], x[1] - y[1])
    rhs = oracle.expectation(
        lambda f: f[:, x[0], x[1]] * f[:, y[0], y[1]] + lam * f[:, y[0], y[1]] * _cubic(f, oracle)[:, x[0], x[1]]
    )
    return IdentityCheck("ibp F=Phi(y)", lam, green, float(rhs), tolerance)


def check_cubic_ibp(oracle: QuadratureOracle, x: Site, tolerance: float) -> IdentityCheck:
    """IBP at x with F = lambda I(:Phi^3:)(x):
    3 lambda eps^2 sum_z C(x - z)^2 E[:Phi(z)^2:] = E[Phi(x) F] + lambda E[F I(:Phi^3:)(x)]
    """
    lam, a, lattice = oracle.coupling, oracle.wick_constant, oracle.lattice
    green = lattice.green_kernel.values
    shifted = np.roll(green[::-1, ::-1], (x[0] + 1, x[1] + 1), axis=(0, 1))  # C(x - z) as a function of z
    wick_square = oracle.expectation(lambda f: wick_power(f, 2, a))
    lhs = 3 * lam * lattice.spacing**2 * np.sum(shifted**2 * wick_square)

    def rhs_integrand(f):
        cubic = _cubic(f, oracle)[:, x[0], x[1]]
        return lam * f[:, x[0], x[1]] * cubic + lam**2 * cubic**2

    return IdentityCheck("ibp F=lambda I(:Phi^3:)(x)", lam, float(lhs), float(oracle.expectation(rhs_integrand)), tolerance)


def check_three_point_ibp(oracle: QuadratureOracle, points: Sequence[Site], tolerance: float) -> IdentityCheck:
    """IBP at x_1 with F = Phi(x_2) Phi(x_3) Phi(x_4):
    sum over pairings C(x_1 - x_i) E[Phi Phi] = E[Phi_1 Phi_2 Phi_3 Phi_4] + lambda E[Phi_2 Phi_3 Phi_4 I(:Phi^3:)(x_1)]
    """
    lam = oracle.coupling
    x_1, x_2, x_3, x_4 = points
    green = oracle.lattice.green_kernel

    def phi(f, p):
        return f[:, p[0], p[1]]

    def c(p, q):
        return green(p[0] - q[0], p[1] - q[1])

    pairs = oracle.expectation(lambda f: np.stack([phi(f, x_3) * phi(f, x_4), phi(f, x_2) * phi(f, x_4), phi(f, x_2) * phi(f, x_3)], axis=1))
    lhs = c(x_1, x_2) * pairs[0] + c(x_1, x_3) * pairs[1] + c(x_1, x_4) * pairs[2]
    rhs = oracle.expectation(
        lambda f: phi(f, x_2) * phi(f, x_3) * phi(f, x_4) * (phi(f, x_1) + lam * _cubic(f, oracle)[:, x_1[0], x_1[1]])
    )
    return IdentityCheck("ibp F=Phi(x2)Phi(x3)Phi(x4)", lam, float(lhs), float(rhs), tolerance)


def check_wick_square(oracle: QuadratureOracle, x: Site, tolerance: float) -> IdentityCheck:
    """0 = E[:Phi^2(x):] + lambda E[Phi(x) I(:Phi^3:)(x)], compared as a = E[Phi^2] + lambda E[Phi I(:Phi^3:)]"""
    lam = oracle.coupling
    rhs = oracle.expectation(lambda f: f[:, x[0], x[1]] ** 2 + lam * f[:, x[0], x[1]] * _cubic(f, oracle)[:, x[0], x[1]])
    return IdentityCheck("wick square", lam, oracle.wick_constant, float(rhs), tolerance)


def two_point_configurations(oracle: QuadratureOracle) -> np.ndarray:
    """(x_1, x_2) with x_1 at the origin and x_2 over every site"""
    n = oracle.lattice.n
    return np.asarray([[(0, 0), (i, j)] for i in range(n) for j in range(n)], dtype=int)


def check_expansion_identity(
    oracle: QuadratureOracle, N: int, tolerance: float, expansion: Optional[Expansion] = None
) -> IdentityCheck:
    """S^2 = sum_(n<=N) lambda^n sum r'_G I_G + lambda^(N+1) sum r_G I_G, at the worst separation"""
    lam = oracle.coupling
    expansion = expansion or expand(2, N)
    configurations = two_point_configurations(oracle)
    two_point = oracle.expectation(lambda f: f[:, 0, 0][:, None] * f.reshape(len(f), -1))

    def evaluate_pure(graph):
        return eval_pure(graph, oracle.lattice, configurations)

    def evaluate_remainder(graph):
        return oracle.evaluate_graph(graph, configurations)

    f_terms = [term for n in range(N + 1) for term in expansion.f_terms.get(n, [])]
    rhs = evaluate_terms(f_terms, evaluate_pure, lam) + evaluate_terms(expansion.remainder_terms, evaluate_remainder, lam)
    rhs_values = np.broadcast_to(rhs.values, two_point.shape)
    worst = int(np.argmax(np.abs(two_point - rhs_values)))
    return IdentityCheck(f"expansion N={N}", lam, float(two_point[worst]), float(rhs_values[worst]), tolerance)


def identity_battery(oracle: QuadratureOracle, tolerance: float, orders: Sequence[int] = (0, 1, 2)) -> List[IdentityCheck]:
    """Every IBP and expansion identity on an oracle lattice with at least 4 sites"""
    n = oracle.lattice.n
    sites = [(i, j) for i in range(n) for j in range(n)]
    if len(sites) < 4:
        raise ValueError("the identity battery needs at least 4 lattice sites")
    checks = [
        check_two_point_ibp(oracle, sites[0], sites[1], tolerance),
        check_two_point_ibp(oracle, sites[0], sites[-1], tolerance),
        check_cubic_ibp(oracle, sites[0], tolerance),
        check_three_point_ibp(oracle, sites[:4], tolerance),
        check_wick_square(oracle, sites[0], tolerance),
    ]
    checks.extend(check_expansion_identity(oracle, N, tolerance) for N in orders)
    for check in checks:
        logger.debug(f"{check.name} lambda={check.coupling}: residual {check.residual:.2e}")
    return checks
