import os
from unittest.mock import patch

import pytest
import yaml

from .._spec import ExperimentError, ExperimentSpec, ToleranceFailure
from phi4lab.config import RunConfig
from phi4lab.lattice import TorusLattice


@pytest.fixture(autouse=True)
def green_cache_dir(tmp_path):
    with patch("phi4lab.harness._spec.CacheManager") as mock_manager:
        mock_manager.return_value.cache_path = str(tmp_path / "cache")
        yield tmp_path / "cache"


class TestExperimentSpec:
    def test_unknown_kind(self):
        with pytest.raises(ExperimentError):
            ExperimentSpec(kind="six_point")

    @pytest.mark.parametrize("grid", [(0.1, 0.05), (0.1, 0.1), (0.0, 0.1), (-0.1,)])
    def test_grid_must_increase_and_be_positive(self, grid):
        with pytest.raises(ExperimentError):
            ExperimentSpec(kind="two_point", lambda_grid=grid)

    def test_toy_admits_zero(self):
        assert ExperimentSpec(kind="toy", lambda_grid=(0.0,)).lambda_grid == (0.0,)

    def test_sim_for_sets_lattice_and_coupling(self):
        spec = ExperimentSpec.from_run_config("four_point", RunConfig())
        cfg = spec.sim_for(0.2)
        assert cfg.lattice == TorusLattice(8.0, 1.0, 1.0)
        assert cfg.coupling == 0.2
        assert cfg.seed == spec.sim.seed

    def test_sim_required(self):
        with pytest.raises(ExperimentError):
            ExperimentSpec(kind="two_point", lambda_grid=(0.1,)).sim_for(0.1)

    @pytest.mark.parametrize(
        "kind, side_length, grid",
        [
            ("oracle", 2.0, (0.05, 0.1, 0.2)),
            ("asymptoticity", 2.0, (0.02, 0.05, 0.1, 0.2)),
            ("two_point", 16.0, (0.05, 0.1, 0.2)),
            ("four_point", 8.0, (0.05, 0.1, 0.2)),
            ("toy", 8.0, (0.01,)),
            ("simulate", 8.0, (0.1,)),
        ],
    )
    def test_from_defaults(self, kind, side_length, grid):
        spec = ExperimentSpec.from_run_config(kind, RunConfig())
        assert spec.side_length == side_length
        assert spec.lambda_grid == grid

    def test_from_file(self, tmp_path):
        path = tmp_path / "run.yml"
        path.write_text(yaml.dump({"two_point_side_length": 8.0, "two_point_lambdas": [0.1, 0.3], "n_chains": 4}))
        spec = ExperimentSpec.from_run_config("two_point", RunConfig(path), output_dir=str(tmp_path))
        assert spec.lattice.n == 8
        assert spec.lambda_grid == (0.1, 0.3)
        assert spec.n_chains == 4
        assert spec.ratio_band == 1.5

    def test_four_point_band(self):
        assert ExperimentSpec.from_run_config("four_point", RunConfig()).ratio_band == 2.0


class TestToleranceFailure:
    def test_message(self):
        failure = ToleranceFailure("oracle_suite", ["a", "b"])
        assert str(failure) == "oracle_suite: a; b"
        assert failure.failures == ["a", "b"]


class TestGreenCacheWiring:
    def test_lattice_kernel_goes_through_cache(self, green_cache_dir):
        spec = ExperimentSpec.from_run_config("four_point", RunConfig())
        assert spec.green_cache_dir == str(green_cache_dir)
        kernel = spec.lattice.green_kernel
        assert os.listdir(green_cache_dir) == ["green_M8.0_eps1.0_m1.0.bin"]
        assert spec.lattice is spec.lattice
        assert kernel.values.shape == (8, 8)

    def test_cache_can_be_switched_off(self, green_cache_dir):
        spec = ExperimentSpec.from_run_config("four_point", RunConfig(overrides={"use_green_cache": False}))
        assert spec.green_cache_dir is None
        assert spec.lattice.n == 8
        assert not os.path.exists(green_cache_dir)

    def test_direct_spec_skips_cache(self):
        spec = ExperimentSpec(kind="two_point", side_length=4.0, lambda_grid=(0.1,))
        assert "green_kernel" not in spec.lattice.__dict__
