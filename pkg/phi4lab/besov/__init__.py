"""
Module for discrete Littlewood-Paley blocks and weighted Besov/Holder norms on the lattice torus.

### Types
- DyadicPartition: frequency masks phi_j, j = -1 .. j_eps, summing to one on the Fourier grid
- WeightSpec: polynomial weight (1 + |h x|^2)^(-delta/2) and its exponent

### Operations
- dyadic_partition, weight, lp_blocks
- besov_norm: (sum_j 2^(alpha j q) ||Delta_j f rho||_p^q)^(1/q)
- holder_multi: componentwise norm of two- and four-point functions
"""
from ._besov import (
    BesovGridError,
    DyadicPartition,
    WeightSpec,
    besov_norm,
    cutoff_index,
    dyadic_partition,
    holder_multi,
    lp_blocks,
    smooth_cutoff,
    weight,
)
from ._base import IBlockDecomposition


__all__ = [
    BesovGridError,
    DyadicPartition,
    WeightSpec,
    besov_norm,
    cutoff_index,
    dyadic_partition,
    holder_multi,
    lp_blocks,
    smooth_cutoff,
    weight,
    IBlockDecomposition,
]
