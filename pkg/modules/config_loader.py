# modules/config_loader.py
"""
User-configurable settings loader with YAML support.
Provides runtime configuration separate from the constants in config.py.
"""
import os
import yaml
from typing import Dict, Any, Optional
from dataclasses import dataclass
from loguru import logger

from modules import config


@dataclass
class SearchConfig:
    """Quantifier search settings"""
    fuel: int = config.DEFAULT_FUEL
    max_family_size: int = config.DEFAULT_MAX_FAMILY_SIZE
    max_generator_index: int = config.DEFAULT_MAX_GENERATOR_INDEX
    cover_strategy: str = "refinement"
    max_families: int = config.DEFAULT_MAX_FAMILIES


@dataclass
class RuntimeConfig:
    """Scheduler settings"""
    workers: int = config.DEFAULT_WORKERS


@dataclass
class OutputConfig:
    """CLI output and logging"""
    json: bool = False
    log_level: str = "WARNING"
    log_file: Optional[str] = None


@dataclass
class AppConfig:
    """
    Complete application configuration.
    Combines all configuration sections.
    """
    search: SearchConfig = None
    runtime: RuntimeConfig = None
    output: OutputConfig = None

    def __post_init__(self):
        if self.search is None:
            self.search = SearchConfig()
        if self.runtime is None:
            self.runtime = RuntimeConfig()
        if self.output is None:
            self.output = OutputConfig()


SECTIONS = ('search', 'runtime', 'output')


class ConfigLoader:
    """
    Loads and manages user configuration from YAML files.

    Provides a layered configuration system:
    1. Default values (from dataclasses)
    2. User config file (optional, overrides defaults)
    3. Runtime overrides (optional, overrides everything)
    """

    DEFAULT_CONFIG_PATH = config.CONFIG_FILE
    USER_CONFIG_PATH = os.path.expanduser("~/.machine_space/config.yaml")

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize config loader.

        Args:
            config_path: Path to config file. If None, uses default locations.
        """
        self.config_path = config_path
        self.loaded_from: Optional[str] = None
        self.config = self._load_config()

    def _load_config(self) -> AppConfig:
        """Load configuration from file or use defaults"""
        cfg = AppConfig()

        config_file = self._find_config_file()
        if config_file:
            try:
                with open(config_file, 'r', encoding='utf-8') as f:
                    data = yaml.safe_load(f)
                if data:
                    if not isinstance(data, dict):
                        raise ValueError("top level must be a mapping")
                    cfg = self._merge_config(cfg, data)
                self.loaded_from = config_file
                logger.info(f"Loaded configuration from: {config_file}")
            except Exception as e:
                logger.warning(f"Failed to load config from {config_file}: {e}")
                logger.info("Using default configuration")
                cfg = AppConfig()

        return cfg

    def _find_config_file(self) -> Optional[str]:
        """Find config file in order of precedence"""
        # 1. Explicitly specified path
        if self.config_path and os.path.exists(self.config_path):
            return self.config_path

        # 2. Current directory
        if os.path.exists(self.DEFAULT_CONFIG_PATH):
            return self.DEFAULT_CONFIG_PATH

        # 3. User home directory
        if os.path.exists(self.USER_CONFIG_PATH):
            return self.USER_CONFIG_PATH

        return None

    def _merge_config(self, base: AppConfig, overrides: Dict[str, Any]) -> AppConfig:
        """Merge override values into base config; unknown keys are ignored"""
        for section in SECTIONS:
            values = overrides.get(section)
            if not isinstance(values, dict):
                continue
            section_obj = getattr(base, section)
            for key, value in values.items():
                if hasattr(section_obj, key):
                    setattr(section_obj, key, value)
                else:
                    logger.warning(f"Unknown config key ignored: {section}.{key}")
        return base


# Global config loader instance
_config_loader: Optional[ConfigLoader] = None


def get_config_loader() -> ConfigLoader:
    """Get the global config loader instance (singleton)"""
    global _config_loader
    if _config_loader is None:
        _config_loader = ConfigLoader()
    return _config_loader


def reload_config(config_path: Optional[str] = None):
    """Reload configuration from file"""
    global _config_loader
    _config_loader = ConfigLoader(config_path)
    return _config_loader
