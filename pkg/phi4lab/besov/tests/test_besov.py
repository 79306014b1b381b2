import numpy as np
import pytest

from .._besov import (
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
from phi4lab.lattice import LatticeField, TorusLattice

FINE = TorusLattice(1.0, 1.0 / 128, 1.0)


def plane_wave(lattice, frequency):
    x = lattice.spacing * np.arange(lattice.n)
    return LatticeField(np.cos(2 * np.pi * frequency * x)[:, None] * np.ones((1, lattice.n)), lattice)


@pytest.fixture(scope="module")
def fine_partition():
    return dyadic_partition(FINE)


@pytest.fixture
def random_field():
    lattice = TorusLattice(4.0, 0.25, 1.0)
    return LatticeField(np.random.default_rng(5).standard_normal(lattice.shape), lattice)


class TestDyadicPartition:
    def test_cutoff(self):
        assert smooth_cutoff(0.0) == 1.0
        assert smooth_cutoff(2.0 / 3.0) == 1.0
        assert smooth_cutoff(1.0) == pytest.approx(0.5)
        assert smooth_cutoff(4.0 / 3.0) == 0.0
        radii = np.linspace(0, 2, 201)
        assert np.all(np.diff(smooth_cutoff(radii)) <= 0)

    @pytest.mark.parametrize("spacing, expected", [(1.0, 0), (0.25, 0), (1.0 / 16, 2), (1.0 / 128, 5)])
    def test_cutoff_index(self, spacing, expected):
        assert cutoff_index(spacing) == expected

    def test_partition_of_unity(self, fine_partition):
        assert np.allclose(fine_partition.masks.sum(axis=0), 1.0, atol=1e-14)
        assert np.all(fine_partition.masks >= -1e-15)

    def test_annulus_support(self, fine_partition):
        radius = np.hypot(*FINE.frequencies)
        for j in range(fine_partition.j_max):
            support = fine_partition.masks[j + 1] > 0
            assert np.all(radius[support] > (2.0 / 3.0) * 2**j)
            assert np.all(radius[support] < (4.0 / 3.0) * 2 ** (j + 1))
        assert np.all(radius[fine_partition.masks[0] > 0] < 4.0 / 3.0)

    def test_indices(self, fine_partition):
        assert list(fine_partition.indices) == [-1, 0, 1, 2, 3, 4, 5]
        assert len(fine_partition) == 7


class TestLpBlocks:
    def test_reconstruction(self, random_field):
        blocks = lp_blocks(random_field, dyadic_partition(random_field.lattice))
        total = sum(block.values for block in blocks)
        assert np.max(np.abs(total - random_field.values)) < 1e-10

    def test_constant_field_in_lowest_block(self, fine_partition):
        blocks = lp_blocks(FINE.constant(3.0), fine_partition)
        assert np.allclose(blocks[0].values, 3.0)
        assert all(np.max(np.abs(block.values)) < 1e-12 for block in blocks[1:])

    @pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
    def test_plane_wave_concentrates_near_its_scale(self, fine_partition, j):
        blocks = lp_blocks(plane_wave(FINE, 2**j), fine_partition)
        energy = np.array([np.sum(block.values**2) for block in blocks])
        near = [index + 1 for index in (j - 1, j, j + 1) if index + 1 < len(blocks)]
        assert energy[near].sum() == pytest.approx(energy.sum(), rel=1e-10)

    def test_mismatched_lattice(self, random_field, fine_partition):
        with pytest.raises(ValueError):
            lp_blocks(random_field, fine_partition)


class TestBesovNorm:
    def test_zero_field(self, random_field):
        assert besov_norm(random_field.lattice.zeros(), 0.5) == 0.0

    @pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.5])
    @pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
    def test_plane_wave_scaling(self, fine_partition, alpha, j):
        norm = besov_norm(plane_wave(FINE, 2**j), alpha, part=fine_partition)
        ratio = norm / 2.0 ** (j * alpha)
        assert 0.25 <= ratio <= 4.0

    def test_monotone_in_alpha(self, fine_partition):
        wave = plane_wave(FINE, 8)
        norms = [besov_norm(wave, alpha, part=fine_partition) for alpha in (-1.0, -0.5, 0.0, 0.5, 1.0)]
        assert norms == sorted(norms)

    @pytest.mark.parametrize("p, q", [(1, 1), (2, 2), (np.inf, np.inf), (2, np.inf), (np.inf, 1)])
    def test_triangle_inequality(self, p, q):
        lattice = TorusLattice(4.0, 0.25, 1.0)
        rng = np.random.default_rng(17)
        for _ in range(5):
            f = LatticeField(rng.standard_normal(lattice.shape), lattice)
            g = LatticeField(rng.standard_normal(lattice.shape), lattice)
            lhs = besov_norm(f + g, 0.3, p, q)
            assert lhs <= besov_norm(f, 0.3, p, q) + besov_norm(g, 0.3, p, q) + 1e-10

    def test_weight_equivalence(self):
        lattice = TorusLattice(8.0, 0.5, 1.0)
        spec = WeightSpec(h=0.1, delta=1.0)
        rho = weight(lattice, spec)
        x = lattice.site_coordinates()
        rng = np.random.default_rng(23)
        for _ in range(5):
            a, b = rng.uniform(-1, 1, size=2)
            f = LatticeField(np.cos(2 * np.pi * (a * x[..., 0] + b * x[..., 1]) / 8.0) + a, lattice)
            for p, q in [(2, 2), (np.inf, np.inf)]:
                ratio = besov_norm(f, -0.5, p, q, spec) / besov_norm(f * rho, -0.5, p, q)
                assert 1 / 8 <= ratio <= 8

    def test_invalid_exponent(self, random_field):
        with pytest.raises(ValueError):
            besov_norm(random_field, 0.5, p=3)

    def test_green_kernel_stable_under_refinement(self):
        norms = [besov_norm(TorusLattice(8.0, eps, 1.0).green_kernel, -0.1) for eps in (1.0, 0.5, 0.25)]
        for coarse, fine in zip(norms, norms[1:]):
            assert 0.5 <= fine / coarse <= 2.0


class TestWeight:
    def test_trivial_weight(self):
        lattice = TorusLattice(4.0, 1.0, 1.0)
        assert np.array_equal(weight(lattice).values, np.ones(lattice.shape))

    def test_range(self):
        lattice = TorusLattice(8.0, 0.5, 1.0)
        rho = weight(lattice, WeightSpec(h=0.5, delta=2.0, exponent=2.0)).values
        assert rho[0, 0] == 1.0
        assert np.all((rho > 0) & (rho <= 1))

    def test_negative_parameters(self):
        with pytest.raises(ValueError):
            WeightSpec(h=-1.0)


class TestHolderMulti:
    def test_translation_invariant_two_point_reduces_to_its_profile(self):
        lattice = TorusLattice(8.0, 1.0, 1.0)
        green = lattice.green_kernel.values
        n = lattice.n
        x_1, x_2, y_1, y_2 = np.meshgrid(*(np.arange(n),) * 4, indexing="ij")
        values = green[(y_1 - x_1) % n, (y_2 - x_2) % n]
        assert holder_multi(values, 1.5, lattice) == pytest.approx(besov_norm(lattice.green_kernel, 1.5))

    def test_constant_two_point(self):
        lattice = TorusLattice(8.0, 1.0, 1.0)
        assert holder_multi(np.ones((8,) * 4), 0.5, lattice) == pytest.approx(besov_norm(lattice.constant(1.0), 0.5))

    def test_constant_four_point(self):
        lattice = TorusLattice(8.0, 1.0, 1.0)
        assert holder_multi(np.ones((4,) * 8), 0.5, lattice) == pytest.approx(2**-0.5)

    def test_four_point_bounds_each_component(self):
        lattice = TorusLattice(4.0, 1.0, 1.0)
        profile = np.random.default_rng(2).standard_normal((4, 4))
        values = np.broadcast_to(profile[:, :, None, None, None, None, None, None], (4,) * 8)
        coarse = TorusLattice(4.0, 1.0, 1.0)
        assert holder_multi(values, 0.5, lattice) >= besov_norm(LatticeField(profile, coarse), 0.5) - 1e-12

    @pytest.mark.parametrize("shape", [(2,) * 4, (2,) * 8])
    def test_coarse_grid_refused(self, shape):
        with pytest.raises(BesovGridError):
            holder_multi(np.ones(shape), 0.5, TorusLattice(2.0, 1.0, 1.0))

    @pytest.mark.parametrize("shape", [(4,) * 3, (4,) * 6, (4, 4, 8, 8)])
    def test_bad_shape(self, shape):
        with pytest.raises(ValueError):
            holder_multi(np.ones(shape), 0.5, TorusLattice(4.0, 1.0, 1.0))
