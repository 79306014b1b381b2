import string
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from phi4lab.lattice import TorusLattice

LETTERS = string.ascii_letters
BATCH = "Z"


def difference_index(lattice: TorusLattice) -> np.ndarray:
    """D[s, t] = flat index of x_s - x_t, so that K.ravel()[D] is the matrix K(x_s - x_t)"""
    n = lattice.n
    i, j = np.divmod(np.arange(n * n), n)
    di = (i[:, None] - i[None, :]) % n
    dj = (j[:, None] - j[None, :]) % n
    return di * n + dj


def as_configurations(configurations, k: int, lattice: TorusLattice) -> np.ndarray:
    """Normalise boundary configurations to integer site indices of shape (n_configs, k, 2)"""
    configs = np.asarray(configurations, dtype=int)
    if configs.ndim == 2:
        configs = configs[None, ...]
    if configs.ndim != 3 or configs.shape[1:] != (k, 2):
        raise ValueError(f"configurations must have shape (n_configs, {k}, 2), got {configs.shape}")
    return configs % lattice.n


def site_indices(configs: np.ndarray, lattice: TorusLattice) -> np.ndarray:
    return configs[..., 0] * lattice.n + configs[..., 1]


def default_configurations(lattice: TorusLattice, stride: int = 1, max_separation: int = 2) -> np.ndarray:
    """Four-point configurations with x_1 at the origin.

    The coincident configuration, then squares {0, (d, 0), (0, d), (d, d)} and split pairs
    {0, 0, (d, 0), (d, 0)} for d = stride, ..., max_separation * stride.
    """
    configs = [[(0, 0)] * 4]
    for step in range(1, max_separation + 1):
        d = step * stride
        configs.append([(0, 0), (d, 0), (0, d), (d, d)])
        configs.append([(0, 0), (0, 0), (d, 0), (d, 0)])
    return np.asarray(configs, dtype=int) % lattice.n


def pair_kernels(graph, lattice: TorusLattice) -> Dict[Tuple[int, int], np.ndarray]:
    """C^multiplicity per distinct vertex pair, as (n, n) arrays of the separation"""
    green = lattice.green_kernel.values
    kernels = {}
    for (u, v), mult in graph.edge_multiset(ignore_colors=True).items():
        kernels[(u, v)] = green**mult
    return kernels


def build_einsum(
    kernels: Dict[Tuple[int, int], np.ndarray],
    summed: Sequence[int],
    pinned: Dict[int, int],
    free: Sequence[int],
    diff: np.ndarray,
    vertex_weights: Optional[Dict[int, np.ndarray]] = None,
) -> Tuple[str, List[np.ndarray], float]:
    """Einsum subscripts and operands for sum over `summed` vertex positions of the kernel product.

    `pinned` maps boundary vertices to fixed site indices; `free` vertices become output axes.
    `vertex_weights` maps vertices to per-sample site weights of shape (B, V); when given the
    leading batch axis is kept in the output. Kernels between two pinned vertices are folded into
    the returned scalar factor.
    """
    letters = iter(c for c in LETTERS if c != BATCH)
    letter = {v: next(letters) for v in list(summed) + list(free)}
    subscripts, operands, scalar = [], [], 1.0
    for (u, v), kernel in kernels.items():
        flat = kernel.ravel()
        if u in pinned and v in pinned:
            scalar *= float(flat[diff[pinned[u], pinned[v]]])
        elif u in pinned:
            subscripts.append(letter[v])
            operands.append(flat[diff[pinned[u], :]])
        elif v in pinned:
            subscripts.append(letter[u])
            operands.append(flat[diff[:, pinned[v]]])
        else:
            subscripts.append(letter[u] + letter[v])
            operands.append(flat[diff])
    batched = vertex_weights is not None
    for vertex, weight in (vertex_weights or {}).items():
        if vertex in pinned:
            subscripts.append(BATCH)
            operands.append(weight[:, pinned[vertex]])
        else:
            subscripts.append(BATCH + letter[vertex])
            operands.append(weight)
    output = (BATCH if batched else "") + "".join(letter[v] for v in free)
    return ",".join(subscripts) + "->" + output, operands, scalar
