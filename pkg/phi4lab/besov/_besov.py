from dataclasses import dataclass
import logging
from typing import List, Optional

import numpy as np

from ._base import IBlockDecomposition
from phi4lab.lattice import LatticeField, TorusLattice

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

ALLOWED_EXPONENTS = (1.0, 2.0, np.inf)
MIN_POINTS_PER_AXIS = 4


class BesovGridError(Exception):
    """
    Raised when a sampled grid is too coarse to carry a dyadic decomposition
    """

    def __init__(self, step_name: str = "besov", message: str = "grid too coarse"):
        self.step_name = step_name
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.step_name, self.message)


def smooth_cutoff(r: np.ndarray) -> np.ndarray:
    """chi(r): 1 on [0, 2/3], 0 on [4/3, inf), cubic smoothstep in between"""
    t = np.clip((np.asarray(r, dtype=float) - 2.0 / 3.0) / (2.0 / 3.0), 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


def cutoff_index(spacing: float) -> int:
    """Smallest j >= 0 with (8/3) 2^j >= 1/(2 eps)"""
    j = 0
    while (8.0 / 3.0) * 2.0**j < 0.5 / spacing:
        j += 1
    return j


class DyadicPartition(IBlockDecomposition):
    """Littlewood-Paley masks phi_j, j = -1 .. j_eps, on the Fourier grid of a lattice.

    phi_{-1} = chi(|xi|), phi_j = chi(2^-(j+1) |xi|) - chi(2^-j |xi|), and the last block is
    1 - chi(2^-j_eps |xi|) so that it takes every frequency above the cutoff and the masks sum to one.

    Example Use Case:
    ```python
    from phi4lab.besov import dyadic_partition, lp_blocks
    from phi4lab.lattice import TorusLattice

    lattice = TorusLattice(8.0, 0.125, 1.0)
    blocks = lp_blocks(lattice.green_kernel, dyadic_partition(lattice))
    ```
    """

    def __init__(self, lattice: TorusLattice):
        self.lattice = lattice
        self.j_max = cutoff_index(lattice.spacing)
        xi_1, xi_2 = lattice.frequencies
        radius = np.hypot(xi_1, xi_2)
        masks = [smooth_cutoff(radius)]
        for j in range(self.j_max):
            masks.append(smooth_cutoff(radius / 2.0 ** (j + 1)) - smooth_cutoff(radius / 2.0**j))
        masks.append(1.0 - smooth_cutoff(radius / 2.0**self.j_max))
        self.masks = np.stack(masks)
        logger.debug(f"dyadic partition n={lattice.n} eps={lattice.spacing}: blocks -1..{self.j_max}")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-1, self.j_max + 1)

    def blocks(self, values: np.ndarray) -> np.ndarray:
        """Delta_j f for every j, stacked on a new first axis; `values` may carry leading batch axes"""
        spectrum = np.fft.fft2(values)[..., None, :, :]
        return np.real(np.fft.ifft2(self.masks * spectrum))

    def __len__(self) -> int:
        return len(self.masks)


@dataclass(frozen=True)
class WeightSpec:
    """rho(x) = (1 + |h x|^2)^(-delta/2), raised to `exponent` when used as a norm weight"""

    h: float = 0.0
    delta: float = 0.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.h < 0 or self.delta < 0:
            raise ValueError("h and delta must be nonnegative")

    @property
    def is_trivial(self) -> bool:
        return self.h == 0 or self.delta == 0 or self.exponent == 0


def dyadic_partition(lattice: TorusLattice) -> DyadicPartition:
    return DyadicPartition(lattice)


def weight(lattice: TorusLattice, spec: Optional[WeightSpec] = None) -> LatticeField:
    """rho^exponent on the lattice sites, using the centred periodic coordinates"""
    spec = spec or WeightSpec()
    if spec.is_trivial:
        return lattice.constant(1.0)
    coords = lattice.site_coordinates()
    rho = (1.0 + spec.h**2 * np.sum(coords**2, axis=-1)) ** (-spec.delta / 2.0)
    return LatticeField(rho**spec.exponent, lattice)


def lp_blocks(f: LatticeField, part: DyadicPartition) -> List[LatticeField]:
    """Delta_j f = F^-1(phi_j F f) for j = -1 .. j_eps"""
    if f.lattice != part.lattice:
        raise ValueError("field and partition live on different lattices")
    return [LatticeField(block, f.lattice) for block in part.blocks(f.values)]


def _check_exponent(name: str, value: float) -> float:
    value = float(value)
    if value not in ALLOWED_EXPONENTS:
        raise ValueError(f"{name} must be one of 1, 2 or inf, got {value}")
    return value


def _sequence_norm(weighted: np.ndarray, q: float) -> np.ndarray:
    """l^q norm over the first axis"""
    if np.isinf(q):
        return np.max(weighted, axis=0)
    return np.sum(weighted**q, axis=0) ** (1.0 / q)


def _block_norms(blocks: np.ndarray, rho: np.ndarray, spacing: float, p: float) -> np.ndarray:
    """L^{p,eps}(rho) norms over the last two axes"""
    weighted = np.abs(blocks * rho)
    if np.isinf(p):
        return np.max(weighted, axis=(-2, -1))
    return (spacing**2 * np.sum(weighted**p, axis=(-2, -1))) ** (1.0 / p)


def besov_norm(
    f: LatticeField,
    alpha: float,
    p: float = np.inf,
    q: float = np.inf,
    w: Optional[WeightSpec] = None,
    part: Optional[DyadicPartition] = None,
) -> float:
    """Weighted Besov norm (sum_j 2^(alpha j q) ||Delta_j f rho||_{L^p}^q)^(1/q).

    p = q = inf gives the Holder-Besov norm C^alpha.

    Args:
        f (LatticeField): field to measure
        alpha (float): regularity index
        p (float, optional): spatial integrability, 1, 2 or inf. Defaults to inf.
        q (float, optional): summability over blocks, 1, 2 or inf. Defaults to inf.
        w (WeightSpec, optional): weight rho. Defaults to rho = 1.
        part (DyadicPartition, optional): partition to reuse. Defaults to a fresh one for f.lattice.

    Returns:
        float: the norm
    """
    p, q = _check_exponent("p", p), _check_exponent("q", q)
    part = part or DyadicPartition(f.lattice)
    rho = weight(f.lattice, w).values
    norms = _block_norms(part.blocks(f.values), rho, f.lattice.spacing, p)
    return float(_sequence_norm(2.0 ** (alpha * part.indices) * norms, q))


def _diagonal_reduction(values: np.ndarray) -> np.ndarray:
    """g(r) = mean_x f(x, x + r) for f on the full product grid (n, n, n, n)"""
    n = values.shape[0]
    x_1, x_2, r_1, r_2 = np.meshgrid(*(np.arange(n),) * 4, indexing="ij")
    return values[x_1, x_2, (x_1 + r_1) % n, (x_2 + r_2) % n].mean(axis=(0, 1))


def holder_multi(
    values: np.ndarray,
    alpha: float,
    lattice: TorusLattice,
    w: Optional[WeightSpec] = None,
    p: float = np.inf,
    q: float = np.inf,
) -> float:
    """Besov norm of a function of k lattice points, k in {2, 4}, taken in each point separately.

    For k = 2 the function is reduced to one variable by averaging over translations and measured
    with `besov_norm` on `lattice`. For k = 4 the input is a tensor of shape (g, g) * 4 on a coarse
    sub-grid of the torus; the one-variable norm is taken in each component with the other three
    held fixed, and the largest value is returned. This only sees the frequencies of the sub-grid,
    so it bounds the full norm from below.

    Args:
        values (np.ndarray): samples, shape (n, n, n, n) for k = 2 or (g, g) * 4 for k = 4
        alpha (float): regularity index
        lattice (TorusLattice): the lattice the points live on; sets M and the mass
        w (WeightSpec, optional): weight. Defaults to rho = 1.

    Raises:
        BesovGridError: Raised if the grid has fewer than 4 points per axis
        ValueError: Raised if the shape is not (g, g) * k for k in {2, 4}

    Returns:
        float: the norm
    """
    values = np.asarray(values, dtype=float)
    k, remainder = divmod(values.ndim, 2)
    g = values.shape[0] if values.ndim else 0
    if remainder or k not in (2, 4) or any(size != g for size in values.shape):
        raise ValueError(f"expected shape (g, g) * k with k in (2, 4), got {values.shape}")
    if g < MIN_POINTS_PER_AXIS:
        raise BesovGridError("holder_multi", f"{g} points per axis, need at least {MIN_POINTS_PER_AXIS}")
    if k == 2:
        if g != lattice.n:
            raise ValueError(f"two-point input must live on the full lattice, got {g} points per axis")
        return besov_norm(LatticeField(_diagonal_reduction(values), lattice), alpha, p, q, w)
    coarse = TorusLattice(lattice.side_length, lattice.side_length / g, lattice.mass)
    p, q = _check_exponent("p", p), _check_exponent("q", q)
    part = DyadicPartition(coarse)
    rho = weight(coarse, w).values
    scale = 2.0 ** (alpha * part.indices)
    largest = 0.0
    for component in range(k):
        moved = np.moveaxis(values, (2 * component, 2 * component + 1), (-2, -1))
        norms = _block_norms(part.blocks(moved), rho, coarse.spacing, p)
        per_block_axis_first = np.moveaxis(norms, -1, 0)
        scaled = scale.reshape((-1,) + (1,) * (per_block_axis_first.ndim - 1)) * per_block_axis_first
        largest = max(largest, float(np.max(_sequence_norm(scaled, q))))
    logger.debug(f"holder_multi k=4 on a {g}^2 sub-grid: {largest:.4g}")
    return largest
