import unittest
from unittest.mock import patch, mock_open

import pytest
import yaml

from .._config import GlobalConfig, RunConfig


class TestGlobalConfig(unittest.TestCase):
    def test_read(self):
        global_config = GlobalConfig()
        expected_config = {"local_cache_dir": "cache"}
        with patch("builtins.open", mock_open(read_data="local_cache_dir: cache")):
            config = global_config.read()
            self.assertEqual(config, expected_config)

    def test_packaged_defaults(self):
        config = GlobalConfig().read()
        self.assertEqual(config["simulation"]["n_batches"], 16)
        self.assertEqual(config["quadrature"]["nodes"], 40)

    def test_flat_has_unique_leaf_keys(self):
        flat = GlobalConfig().flat()
        self.assertEqual(flat["dt"], 0.05)
        self.assertEqual(flat["gamma"], 0.5)
        self.assertEqual(flat["local_cache_dir"], ".phi4_cache")

    def test_get_value_from_config(self):
        self.assertEqual(GlobalConfig.get_value_from_config(["lattice", "mass"]), 1.0)


class TestRunConfig:
    @pytest.fixture
    def config_path(self, tmp_path):
        path = tmp_path / "sim.yml"
        path.write_text(yaml.dump({"side_length": 16.0, "coupling": 0.2, "seed": 11}))
        return path

    def test_defaults_without_file(self):
        config = RunConfig().read()
        assert config["side_length"] == 8.0
        assert config["burn_in"] == 20000

    def test_file_overrides_defaults(self, config_path):
        config = RunConfig(config_path)
        assert config.get("side_length") == 16.0
        assert config.get("coupling") == 0.2
        assert config.get("dt") == 0.05

    def test_overrides_win(self, config_path):
        config = RunConfig(config_path, overrides={"seed": 99, "dt": None})
        assert config.get("seed") == 99
        assert config.get("dt") == 0.05

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            RunConfig(tmp_path / "missing.yml")

    def test_nested_file_rejected(self, tmp_path):
        path = tmp_path / "nested.yml"
        path.write_text(yaml.dump({"simulation": {"dt": 0.1}}))
        with pytest.raises(ValueError):
            RunConfig(path).read()
