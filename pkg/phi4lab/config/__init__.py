"""
This module provides the configuration layers: the packaged global defaults (`GlobalConfig`) and the
user run configuration (`RunConfig`), a flat YAML mapping overlaid on the defaults.
"""
from ._config import GlobalConfig, RunConfig


__all__ = [GlobalConfig, RunConfig]
