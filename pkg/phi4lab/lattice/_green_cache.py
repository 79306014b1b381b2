import logging
import os
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from ._base import IKernelCache
from ._lattice import LatticeError, LatticeField, TorusLattice, green_function
from phi4lab.utils import CacheManager

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

# M, eps, m as little-endian float64, then n as little-endian uint64
HEADER = struct.Struct("<dddQ")


class GreenCache(IKernelCache):
    """Disk cache of Green kernels keyed by (M, eps, m).

    Each file holds the header (M, eps, m, n) followed by n^2 little-endian float64 values in
    row-major order.

    Example Use Case:
    ```python
    from phi4lab.lattice import GreenCache, TorusLattice

    cache = GreenCache()
    kernel = cache.load_or_compute(TorusLattice(16.0, 1.0, 1.0))
    ```
    """

    def __init__(self, cache_dir: Union[str, Path] = None):
        self.cache_dir = str(cache_dir) if cache_dir is not None else CacheManager().cache_path

    def path_for(self, lattice: TorusLattice) -> str:
        name = f"green_M{lattice.side_length!r}_eps{lattice.spacing!r}_m{lattice.mass!r}.bin"
        return os.path.join(self.cache_dir, name)

    def load_or_compute(self, lattice: TorusLattice) -> LatticeField:
        path = self.path_for(lattice)
        if os.path.exists(path):
            try:
                cached_lattice, values = self.read(path)
                if cached_lattice == lattice:
                    logger.debug(f"Loaded Green kernel from {path}")
                    return LatticeField(values, lattice)
                logger.warning(f"Cache file {path} holds a different lattice, recomputing")
            except LatticeError as e:
                logger.warning(f"Ignoring unreadable cache file {path}: {e}")
        kernel = green_function(lattice)
        CacheManager(self.cache_dir).ensure_exists()
        self.write(lattice, kernel, path)
        return kernel

    def attach(self, lattice: TorusLattice) -> TorusLattice:
        """Serve `lattice.green_kernel` from the cache for the lifetime of this lattice object"""
        kernel = self.load_or_compute(lattice)
        # the slot functools.cached_property reads before computing
        lattice.__dict__["green_kernel"] = kernel
        return lattice

    def write(self, lattice: TorusLattice, kernel: LatticeField, path: Union[str, Path]) -> None:
        with open(path, "wb") as f:
            f.write(HEADER.pack(lattice.side_length, lattice.spacing, lattice.mass, lattice.n))
            f.write(np.ascontiguousarray(kernel.values, dtype="<f8").tobytes())
        logger.debug(f"Wrote Green kernel for n={lattice.n} to {path}")

    def read(self, path: Union[str, Path]) -> Tuple[TorusLattice, np.ndarray]:
        with open(path, "rb") as f:
            header = f.read(HEADER.size)
            if len(header) != HEADER.size:
                raise LatticeError("GreenCache", f"truncated header in {path}")
            side_length, spacing, mass, n = HEADER.unpack(header)
            values = np.frombuffer(f.read(), dtype="<f8")
        if values.size != n * n:
            raise LatticeError("GreenCache", f"expected {n * n} values in {path}, found {values.size}")
        lattice = TorusLattice(side_length, spacing, mass)
        if lattice.n != n:
            raise LatticeError("GreenCache", f"header n={n} inconsistent with M/eps in {path}")
        return lattice, values.reshape(n, n).astype(float)
