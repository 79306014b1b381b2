from dataclasses import dataclass
from functools import cached_property
import logging
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

IMAGINARY_TOLERANCE = 1e-12


class LatticeError(Exception):
    """
    Error raised for invalid lattice parameters or operations mixing fields from different lattices
    """

    def __init__(self, step_name: str = "lattice", message: str = "lattice error"):
        self.step_name = step_name
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.step_name, self.message)


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _real_part(values: np.ndarray, step_name: str) -> np.ndarray:
    scale = max(np.max(np.abs(values.real)), 1.0)
    residue = np.max(np.abs(values.imag)) if values.size else 0.0
    if residue > IMAGINARY_TOLERANCE * scale:
        raise LatticeError(step_name, f"imaginary residue {residue:.3e} exceeds tolerance")
    return np.ascontiguousarray(values.real)


@dataclass(frozen=True)
class TorusLattice:
    """The periodic lattice of side M and spacing eps carrying the mass m.

    Sites are stored on an n x n grid, n = M/eps, with index (i, j) at the point (i*eps, j*eps)
    modulo M. The lattice is immutable; the spectral multiplier and the Green kernel are computed
    once on first use.

    Example Use Case:
    ```python
    from phi4lab.lattice import TorusLattice, green_function

    lattice = TorusLattice(side_length=8.0, spacing=1.0, mass=1.0)
    kernel = green_function(lattice)
    ```
    """

    side_length: float
    spacing: float
    mass: float

    def __post_init__(self):
        if self.side_length <= 0 or self.spacing <= 0:
            raise LatticeError("TorusLattice", "side_length and spacing must be positive")
        if self.mass <= 0:
            raise LatticeError("TorusLattice", f"mass must be positive, got {self.mass}")
        ratio = self.side_length / self.spacing
        n = int(round(ratio))
        if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
            raise LatticeError("TorusLattice", f"M/eps = {ratio} is not a positive integer")
        if not _is_power_of_two(n):
            logger.warning(f"M/eps = {n} is not a power of two")

    @property
    def n(self) -> int:
        return int(round(self.side_length / self.spacing))

    @property
    def shape(self) -> tuple:
        return (self.n, self.n)

    @property
    def n_sites(self) -> int:
        return self.n * self.n

    @cached_property
    def frequencies(self) -> tuple:
        """Mode grid (xi_1, xi_2) in (M^-1 Z)^2, laid out in numpy FFT order"""
        k = np.fft.fftfreq(self.n, d=self.spacing)
        return tuple(np.meshgrid(k, k, indexing="ij"))

    @cached_property
    def laplacian_symbol(self) -> np.ndarray:
        """l_eps(xi) = 4 [sin^2(eps pi xi_1) + sin^2(eps pi xi_2)] / eps^2"""
        xi_1, xi_2 = self.frequencies
        eps = self.spacing
        return 4.0 * (np.sin(eps * np.pi * xi_1) ** 2 + np.sin(eps * np.pi * xi_2) ** 2) / eps**2

    @cached_property
    def multiplier(self) -> "SpectralMultiplier":
        return SpectralMultiplier(self, self.mass + self.laplacian_symbol)

    @cached_property
    def green_kernel(self) -> "LatticeField":
        green = self.inverse_fourier(1.0 / (2.0 * self.multiplier.values))
        return LatticeField(_real_part(green, "green_function"), self)

    @property
    def stiffness(self) -> float:
        return float(self.mass + np.max(self.laplacian_symbol))

    def fourier(self, values: np.ndarray) -> np.ndarray:
        """Forward transform carrying the eps^2 site weight"""
        return self.spacing**2 * np.fft.fft2(values)

    def inverse_fourier(self, values: np.ndarray) -> np.ndarray:
        """Inverse transform carrying M^-2, the inverse of `fourier`"""
        return np.fft.ifft2(values) / self.spacing**2

    def site_coordinates(self) -> np.ndarray:
        """Periodic representatives in [-M/2, M/2)^2, shape (n, n, 2)"""
        idx = np.arange(self.n)
        idx = np.where(idx < self.n / 2, idx, idx - self.n)
        coords = self.spacing * idx
        x_1, x_2 = np.meshgrid(coords, coords, indexing="ij")
        return np.stack([x_1, x_2], axis=-1)

    def site_index(self, i: int, j: int) -> int:
        return (i % self.n) * self.n + (j % self.n)

    def site_of(self, index: int) -> tuple:
        return divmod(int(index), self.n)

    def zeros(self) -> "LatticeField":
        return LatticeField(np.zeros(self.shape), self)

    def constant(self, value: float) -> "LatticeField":
        return LatticeField(np.full(self.shape, float(value)), self)

    def delta(self) -> "LatticeField":
        """The discrete delta eps^-2 1_{x=0}, the unit of the eps^2 duality"""
        values = np.zeros(self.shape)
        values[0, 0] = self.spacing**-2
        return LatticeField(values, self)

    def field(self, values: Union[np.ndarray, list]) -> "LatticeField":
        return LatticeField(np.asarray(values, dtype=float).reshape(self.shape), self)


@dataclass(frozen=True, eq=False)
class SpectralMultiplier:
    """Per-mode values mu(xi) = m + l_eps(xi) in FFT order"""

    lattice: TorusLattice
    values: np.ndarray

    def __post_init__(self):
        if np.min(self.values) < self.lattice.mass * (1 - 1e-12):
            raise LatticeError("SpectralMultiplier", "mu(xi) < m for some mode")


class LatticeField:
    """A real function on the sites of a TorusLattice.

    The values are held as an (n, n) array; `flat` gives the row-major site vector.
    """

    def __init__(self, values: np.ndarray, lattice: TorusLattice):
        values = np.asarray(values, dtype=float)
        if values.size != lattice.n_sites:
            raise LatticeError(
                "LatticeField", f"{values.size} values for a lattice with {lattice.n_sites} sites"
            )
        self.values = values.reshape(lattice.shape)
        self.lattice = lattice

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def _check_same_lattice(self, other: "LatticeField"):
        if other.lattice != self.lattice:
            raise LatticeError("LatticeField", "fields live on different lattices")

    def _combine(self, other, op) -> "LatticeField":
        if isinstance(other, LatticeField):
            self._check_same_lattice(other)
            return LatticeField(op(self.values, other.values), self.lattice)
        return LatticeField(op(self.values, other), self.lattice)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return LatticeField(-self.values, self.lattice)

    def __call__(self, i: int, j: int) -> float:
        return float(self.values[i % self.lattice.n, j % self.lattice.n])

    def __repr__(self) -> str:
        return f"LatticeField(n={self.lattice.n}, max={np.max(np.abs(self.values)):.4g})"


def duality(f: LatticeField, g: LatticeField) -> float:
    """<f, g>_eps = eps^2 sum_x f(x) g(x)"""
    f._check_same_lattice(g)
    return float(f.lattice.spacing**2 * np.sum(f.values * g.values))


def lp_norm(f: LatticeField, p: float) -> float:
    """(eps^2 sum |f|^p)^(1/p), the maximum for p = inf"""
    if np.isinf(p):
        return float(np.max(np.abs(f.values)))
    return float((f.lattice.spacing**2 * np.sum(np.abs(f.values) ** p)) ** (1.0 / p))


def discrete_laplacian(f: LatticeField) -> LatticeField:
    """Five-point stencil eps^-2 sum_i [f(x + eps e_i) + f(x - eps e_i) - 2 f(x)] with periodic wraparound"""
    v = f.values
    stencil = (
        np.roll(v, 1, axis=0) + np.roll(v, -1, axis=0) + np.roll(v, 1, axis=1) + np.roll(v, -1, axis=1) - 4.0 * v
    )
    return LatticeField(stencil / f.lattice.spacing**2, f.lattice)


def spectral_multiplier(lattice: TorusLattice) -> SpectralMultiplier:
    return lattice.multiplier


def green_function(lattice: TorusLattice) -> LatticeField:
    """The kernel C with 2(m - Delta_eps) C = eps^-2 1_{x=0}"""
    return lattice.green_kernel


def wick_constant(lattice: TorusLattice) -> float:
    """a = C(0), the free-field variance at a site"""
    return float(lattice.green_kernel.values[0, 0])


def apply_green(f: LatticeField) -> LatticeField:
    """C *_eps f, computed as multiplication by 1/(2 mu) in Fourier space"""
    lattice = f.lattice
    result = np.fft.ifft2(np.fft.fft2(f.values) / (2.0 * lattice.multiplier.values))
    return LatticeField(_real_part(result, "apply_green"), lattice)


def convolve(f: LatticeField, g: LatticeField) -> LatticeField:
    """(f *_eps g)(x) = eps^2 sum_y f(x - y) g(y) on the torus"""
    f._check_same_lattice(g)
    lattice = f.lattice
    result = lattice.inverse_fourier(lattice.fourier(f.values) * lattice.fourier(g.values))
    return LatticeField(_real_part(result, "convolve"), lattice)


def massive_operator(f: LatticeField) -> LatticeField:
    """2(m - Delta_eps) f, the inverse of apply_green"""
    return 2.0 * (f.lattice.mass * f - discrete_laplacian(f))
