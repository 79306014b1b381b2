"""
Module for the periodic lattice: geometry, the discrete Laplacian, the FFT-based Green function and
convolution, and the Wick constant. Everything here is immutable after construction and safe to share
between workers.

### Types
- TorusLattice: the lattice of side M, spacing eps and mass m; owns the spectral multiplier and Green kernel
- LatticeField: real function on lattice sites with the eps^2-weighted duality
- SpectralMultiplier: mu(xi) = m + l_eps(xi) per Fourier mode

### Operations
- discrete_laplacian, green_function, wick_constant, apply_green, convolve
- duality, lp_norm, massive_operator

### other
- GreenCache: binary disk cache of Green kernels keyed by (M, eps, m)
"""
from ._lattice import (
    TorusLattice,
    LatticeField,
    SpectralMultiplier,
    LatticeError,
    discrete_laplacian,
    green_function,
    wick_constant,
    apply_green,
    convolve,
    duality,
    lp_norm,
    massive_operator,
    spectral_multiplier,
)
from ._green_cache import GreenCache
from ._base import IKernelCache


__all__ = [
    TorusLattice,
    LatticeField,
    SpectralMultiplier,
    LatticeError,
    discrete_laplacian,
    green_function,
    wick_constant,
    apply_green,
    convolve,
    duality,
    lp_norm,
    massive_operator,
    spectral_multiplier,
    GreenCache,
    IKernelCache,
]
