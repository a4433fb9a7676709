"""
Unit tests for config_loader.py - Configuration Module

Tests YAML loading, merging, defaults and the run settings built from them.
"""

import os
from dataclasses import asdict

import pytest
import yaml

from modules import config
from modules.command_runner import RunConfig
from modules.error_handler import GeneratorMismatchError
from modules.config_loader import (SECTIONS, AppConfig, ConfigLoader, OutputConfig, RuntimeConfig,
                                   SearchConfig, get_config_loader, reload_config)
from modules.space_interface import SpaceKind
from tests.conftest import PROJECT_ROOT


class TestConfigLoader:
    """Test suite for ConfigLoader."""

    @pytest.fixture
    def config_loader(self, tmp_path):
        """Create config loader with temporary directory."""
        config_file = tmp_path / "config.yaml"
        return ConfigLoader(config_path=str(config_file))

    @pytest.fixture
    def sample_config_file(self, tmp_path):
        """Create a sample config file."""
        config_file = tmp_path / "config.yaml"
        config_data = {
            'search': {
                'fuel': 5000,
                'cover_strategy': 'families'
            },
            'runtime': {
                'workers': 4
            }
        }

        with open(config_file, 'w') as f:
            yaml.dump(config_data, f)

        return config_file

    def test_default_config_loads(self, config_loader):
        """Test that default configuration loads without file."""
        cfg = config_loader.config

        assert isinstance(cfg, AppConfig)
        assert cfg.search.fuel == config.DEFAULT_FUEL
        assert cfg.search.cover_strategy == "refinement"
        assert config_loader.loaded_from is None

    def test_load_config_from_file(self, sample_config_file):
        """Test loading configuration from YAML file."""
        loader = ConfigLoader(config_path=str(sample_config_file))
        cfg = loader.config

        assert cfg.search.fuel == 5000
        assert cfg.search.cover_strategy == "families"
        assert cfg.runtime.workers == 4
        assert loader.loaded_from == str(sample_config_file)

    def test_partial_config_merges_with_defaults(self, tmp_path):
        """Test that partial config merges with defaults."""
        config_file = tmp_path / "partial.yaml"
        with open(config_file, 'w') as f:
            yaml.dump({'runtime': {'workers': 3}}, f)

        cfg = ConfigLoader(config_path=str(config_file)).config

        assert cfg.runtime.workers == 3
        assert cfg.search.max_family_size == config.DEFAULT_MAX_FAMILY_SIZE

    def test_invalid_yaml_falls_back_to_defaults(self, tmp_path):
        """Test that invalid YAML falls back to defaults."""
        config_file = tmp_path / "invalid.yaml"
        config_file.write_text("invalid: yaml: content: [[[")

        loader = ConfigLoader(config_path=str(config_file))

        assert loader.config.search.fuel == config.DEFAULT_FUEL
        assert loader.loaded_from is None

    def test_non_mapping_falls_back_to_defaults(self, tmp_path):
        config_file = tmp_path / "list.yaml"
        config_file.write_text("- search\n- runtime\n")

        loader = ConfigLoader(config_path=str(config_file))

        assert loader.config.runtime.workers == config.DEFAULT_WORKERS

    def test_nonexistent_file_uses_defaults(self, tmp_path):
        """Test that nonexistent file uses defaults."""
        loader = ConfigLoader(config_path=str(tmp_path / "does_not_exist.yaml"))

        assert loader.config.search.fuel == config.DEFAULT_FUEL

    def test_example_config_matches_defaults(self):
        """The shipped example file sets every key to its default"""
        with open(os.path.join(PROJECT_ROOT, "config.example.yaml"), "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)

        defaults = AppConfig()
        assert data == {section: asdict(getattr(defaults, section)) for section in SECTIONS}

    def test_type_validation(self, tmp_path):
        """Values are taken as-is; RunConfig is where they are checked"""
        config_file = tmp_path / "bad_types.yaml"
        with open(config_file, 'w') as f:
            yaml.dump({'search': {'fuel': 0}}, f)

        app = ConfigLoader(config_path=str(config_file)).config
        assert app.search.fuel == 0

        with pytest.raises(ValueError, match="fuel must be at least 1"):
            RunConfig.from_app_config(app)


class TestConfigDataclasses:
    """Test configuration dataclasses."""

    def test_search_config_defaults(self):
        cfg = SearchConfig()

        assert cfg.fuel == 10 ** 6
        assert cfg.max_family_size == 8
        assert cfg.max_generator_index == 3
        assert cfg.max_families == 200_000

    def test_runtime_defaults(self):
        assert RuntimeConfig().workers == 1

    def test_output_defaults(self):
        cfg = OutputConfig()

        assert cfg.json is False
        assert cfg.log_level == "WARNING"
        assert cfg.log_file is None

    def test_app_config_composition(self):
        cfg = AppConfig()

        assert isinstance(cfg.search, SearchConfig)
        assert isinstance(cfg.runtime, RuntimeConfig)
        assert isinstance(cfg.output, OutputConfig)


class TestRunConfig:
    """Run settings layered over the config file"""

    def test_overrides_win(self):
        app = AppConfig()
        app.search.fuel = 500
        run = RunConfig.from_app_config(app, fuel=None, space="interval", workers=2)

        assert run.fuel == 500
        assert run.space is SpaceKind.UNIT_INTERVAL
        assert run.workers == 2

    @pytest.mark.parametrize("overrides, message", [
        ({"fuel": 0}, "fuel"),
        ({"max_family_size": -1}, "max_family_size"),
        ({"strategy": "greedy"}, "unknown cover strategy"),
        ({"workers": 0}, "workers"),
        ({"depth": -2}, "depth"),
        ({"fuel": "10"}, "fuel must be an integer"),
        ({"workers": True}, "workers must be an integer"),
        ({"max_families": 1.5}, "max_families must be an integer"),
    ])
    def test_validation(self, overrides, message):
        with pytest.raises(ValueError, match=message):
            RunConfig(**overrides)

    def test_unknown_space(self):
        with pytest.raises(GeneratorMismatchError, match="unknown space"):
            RunConfig(space="reals")


class TestConfigLoaderSingleton:
    """Test singleton pattern for config loader."""

    @pytest.fixture(autouse=True)
    def fresh_loader(self):
        reload_config()
        yield
        reload_config()

    def test_get_config_loader_singleton(self):
        assert get_config_loader() is get_config_loader()

    def test_singleton_config_persists(self):
        get_config_loader().config.search.fuel = 999

        assert get_config_loader().config.search.fuel == 999

    def test_reload_replaces_instance(self, tmp_path):
        before = get_config_loader()
        after = reload_config(str(tmp_path / "missing.yaml"))

        assert after is not before
        assert get_config_loader() is after


class TestConfigLoaderEdgeCases:
    """Edge case tests for ConfigLoader."""

    def test_empty_config_file(self, tmp_path):
        config_file = tmp_path / "empty.yaml"
        config_file.write_text("")

        loader = ConfigLoader(config_path=str(config_file))

        assert loader.config.search.fuel == config.DEFAULT_FUEL

    def test_config_with_extra_keys(self, tmp_path):
        """Test that extra unknown keys are ignored."""
        config_file = tmp_path / "extra_keys.yaml"
        config_data = {
            'search': {
                'fuel': 100,
                'unknown_key': 'value'
            },
            'completely_unknown_section': {
                'key': 'value'
            }
        }

        with open(config_file, 'w') as f:
            yaml.dump(config_data, f)

        cfg = ConfigLoader(config_path=str(config_file)).config

        assert cfg.search.fuel == 100
        assert not hasattr(cfg.search, 'unknown_key')

    def test_unicode_in_config(self, tmp_path):
        config_file = tmp_path / "unicode.yaml"
        config_file.write_text("# Réglages spéciaux: éàü\nsearch:\n  fuel: 60\n", encoding='utf-8')

        cfg = ConfigLoader(config_path=str(config_file)).config

        assert cfg.search.fuel == 60
