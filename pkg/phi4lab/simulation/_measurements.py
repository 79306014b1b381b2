import logging
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from ._base import IObservableSet
from phi4lab.config import GlobalConfig
from phi4lab.diagrams import DiagramValue, InsufficientDataError, wick_power
from phi4lab.lattice import LatticeField, TorusLattice, wick_constant

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

SCALARS = ("phi", "phi2", "phi3", "phi4", "wick2", "wick3_phi", "energy", "three_point")


def _translation_product(values: np.ndarray, offsets: np.ndarray) -> float:
    """Mean over x of prod_i Phi(x + d_i)"""
    product = np.ones_like(values)
    for d in offsets:
        product = product * np.roll(values, shift=(-int(d[0]), -int(d[1])), axis=(0, 1))
    return float(product.mean())


class MeasurementSet(IObservableSet):
    """Per-batch sums of the chain observables.

    Sample i of n goes to batch i * n_batches // n. The two-point function is averaged over
    translations through the FFT autocorrelation; four-point products are averaged over
    translations of each stored configuration.
    """

    def __init__(
        self,
        lattice: TorusLattice,
        coupling: float,
        n_samples: int,
        n_batches: int = 16,
        configurations: Optional[np.ndarray] = None,
    ):
        self.lattice = lattice
        self.coupling = coupling
        self.n_samples = n_samples
        self.n_batches = min(n_batches, n_samples)
        self.configurations = (
            np.zeros((0, 4, 2), dtype=int) if configurations is None else np.asarray(configurations, dtype=int)
        )
        self.a = wick_constant(lattice)
        self.counts = np.zeros(self.n_batches, dtype=int)
        self.two_point_sums = np.zeros((self.n_batches,) + lattice.shape)
        self.four_point_sums = np.zeros((self.n_batches, len(self.configurations)))
        self.scalar_sums = {name: np.zeros(self.n_batches) for name in SCALARS}
        self.n_added = 0

    def _batch_of(self, index: int) -> int:
        return min(index * self.n_batches // self.n_samples, self.n_batches - 1)

    def add(self, phi: LatticeField) -> None:
        values = phi.values
        batch = self._batch_of(self.n_added)
        lattice = self.lattice
        self.counts[batch] += 1
        spectrum = np.abs(np.fft.fft2(values)) ** 2
        self.two_point_sums[batch] += np.real(np.fft.ifft2(spectrum)) / lattice.n_sites
        for c, config in enumerate(self.configurations):
            self.four_point_sums[batch, c] += _translation_product(values, config - config[0])
        cubic = wick_power(values, 3, self.a)
        laplacian = (
            np.roll(values, 1, 0) + np.roll(values, -1, 0) + np.roll(values, 1, 1) + np.roll(values, -1, 1) - 4 * values
        ) / lattice.spacing**2
        force = 2 * (lattice.mass * values - laplacian) + self.coupling * cubic
        sums = self.scalar_sums
        sums["phi"][batch] += values.mean()
        sums["phi2"][batch] += np.mean(values**2)
        sums["phi3"][batch] += np.mean(values**3)
        sums["phi4"][batch] += np.mean(values**4)
        sums["wick2"][batch] += np.mean(values**2) - self.a
        sums["wick3_phi"][batch] += np.mean(cubic * values)
        sums["energy"][batch] += lattice.spacing**2 * np.mean(values * force)
        sums["three_point"][batch] += _translation_product(values, np.array([(0, 0), (1, 0), (0, 1)]))
        self.n_added += 1

    def _batch_means(self, sums: np.ndarray, min_batches: Optional[int] = None) -> np.ndarray:
        if min_batches is None:
            min_batches = GlobalConfig.get_value_from_config(["diagrams", "min_batches"])
        filled = self.counts > 0
        if filled.sum() < min_batches:
            raise InsufficientDataError(int(filled.sum()), min_batches)
        counts = self.counts[filled].reshape((-1,) + (1,) * (sums.ndim - 1))
        return sums[filled] / counts

    def two_point(self) -> DiagramValue:
        """S^2(r) = E[Phi(x) Phi(x + r)] over separations r, shape (n, n)"""
        return DiagramValue.from_batches(self._batch_means(self.two_point_sums))

    def four_point(self) -> DiagramValue:
        """S^4 on the stored configurations"""
        return DiagramValue.from_batches(self._batch_means(self.four_point_sums), self.configurations)

    def observable(self, name: str) -> DiagramValue:
        if name not in self.scalar_sums:
            raise KeyError(f"Unknown observable {name}, use one of {SCALARS}")
        return DiagramValue.from_batches(self._batch_means(self.scalar_sums[name]))

    def to_frame(self) -> pd.DataFrame:
        """Rows of (observable, config_id, value, stderr, n_batches)"""
        rows = []
        n_batches = int(np.sum(self.counts > 0))
        two_point = self.two_point()
        for (i, j), value in np.ndenumerate(two_point.values):
            rows.append(("S2", f"r={i},{j}", value, two_point.stderr[i, j], n_batches))
        if len(self.configurations):
            four_point = self.four_point()
            connected = connected_4pt(self)
            for c in range(len(self.configurations)):
                rows.append(("S4", f"c{c}", four_point.values[c], four_point.stderr[c], n_batches))
                rows.append(("U4", f"c{c}", connected.values[c], connected.stderr[c], n_batches))
        for name in SCALARS:
            value = self.observable(name)
            rows.append((name, "site", float(value.values), float(value.stderr), n_batches))
        return pd.DataFrame(rows, columns=["observable", "config_id", "value", "stderr", "n_batches"])


def _connected(two_point: np.ndarray, four_point: np.ndarray, configurations: np.ndarray, n: int) -> np.ndarray:
    """U^4 = S^4 - S^2(12) S^2(34) - S^2(13) S^2(24) - S^2(14) S^2(23)"""

    def s2(p, q):
        d = (configurations[:, q] - configurations[:, p]) % n
        return two_point[d[:, 0], d[:, 1]]

    return four_point - s2(0, 1) * s2(2, 3) - s2(0, 2) * s2(1, 3) - s2(0, 3) * s2(1, 2)


def connected_4pt(measurements: MeasurementSet) -> DiagramValue:
    """Connected four-point function on the stored configurations with jackknife errors over batches.

    Raises:
        InsufficientDataError: Raised if fewer than the minimum number of batches are filled
    """
    two_point = measurements._batch_means(measurements.two_point_sums)
    four_point = measurements._batch_means(measurements.four_point_sums)
    configs, n = measurements.configurations, measurements.lattice.n
    n_batches = len(two_point)
    value = _connected(two_point.mean(axis=0), four_point.mean(axis=0), configs, n)
    leave_one_out = np.array(
        [
            _connected(
                (two_point.sum(axis=0) - two_point[b]) / (n_batches - 1),
                (four_point.sum(axis=0) - four_point[b]) / (n_batches - 1),
                configs,
                n,
            )
            for b in range(n_batches)
        ]
    )
    spread = leave_one_out - leave_one_out.mean(axis=0)
    stderr = np.sqrt((n_batches - 1) / n_batches * np.sum(spread**2, axis=0))
    return DiagramValue(value, stderr, configs)


def merge_measurements(measurement_sets: List[MeasurementSet]) -> MeasurementSet:
    """Concatenate the batches of independent chains in list order"""
    if not measurement_sets:
        raise ValueError("nothing to merge")
    first = measurement_sets[0]
    for other in measurement_sets[1:]:
        if other.lattice != first.lattice or other.coupling != first.coupling:
            raise ValueError("can only merge chains on the same lattice and coupling")
        if not np.array_equal(other.configurations, first.configurations):
            raise ValueError("can only merge chains with the same four-point configurations")
    total_batches = sum(m.n_batches for m in measurement_sets)
    merged = MeasurementSet(first.lattice, first.coupling, sum(m.n_samples for m in measurement_sets), total_batches, first.configurations)
    merged.n_batches = total_batches
    merged.counts = np.concatenate([m.counts for m in measurement_sets])
    merged.two_point_sums = np.concatenate([m.two_point_sums for m in measurement_sets])
    merged.four_point_sums = np.concatenate([m.four_point_sums for m in measurement_sets])
    merged.scalar_sums = {name: np.concatenate([m.scalar_sums[name] for m in measurement_sets]) for name in SCALARS}
    merged.n_added = sum(m.n_added for m in measurement_sets)
    logger.debug(f"merged {len(measurement_sets)} chains into {total_batches} batches")
    return merged
