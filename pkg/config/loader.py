"""Configuration loader for application settings and run configs."""
import os
from typing import Any, Dict

import yaml
from pydantic_settings import BaseSettings, SettingsConfigDict

from utils.exceptions import ConfigError


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Development Settings
    log_level: str = "INFO"

    # Directory Paths
    out_dir: str = "runs"
    configs_dir: str = "configs"

    # Run Defaults
    default_seed: int = 0
    max_workers: int = 4

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", env_prefix="ADHESIVE_")


def load_run_config(config_path: str) -> Dict[str, Any]:
    """Load a run or study configuration from a YAML (or JSON) file.

    Args:
        config_path: Path to config file; a bare file name that does not
            exist is looked up in settings.configs_dir

    Returns:
        dict: Raw configuration mapping

    Raises:
        FileNotFoundError: If config file doesn't exist
        ConfigError: If the document is not a mapping or cannot be parsed
    """
    config_path = str(config_path)
    if not os.path.exists(config_path) and os.path.dirname(config_path) == '':
        candidate = os.path.join(settings.configs_dir, config_path)
        if os.path.exists(candidate):
            config_path = candidate
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Run config not found: {config_path}")

    with open(config_path, 'r') as f:
        try:
            config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {config_path}: {e}")

    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ConfigError(f"Run config must be a mapping (got {type(config).__name__})")

    return config


# Global settings instance
settings = Settings()
