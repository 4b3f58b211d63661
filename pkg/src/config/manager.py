"""
Configuration management for the spectral enclosure toolkit.

This module handles loading, validating, and merging configuration: the
numerical tolerances of the solvers, internal parallelism and logging.
"""

import os
import copy
import yaml
import logging
from typing import Dict, Any, Optional
from pathlib import Path
from dotenv import load_dotenv

from src.core.errors import ConfigurationError


logger = logging.getLogger(__name__)

SHIPPED_CONFIG = Path(__file__).resolve().parents[2] / "config" / "config.yaml"

_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR"}


class ConfigManager:
    """
    Manages configuration for the toolkit.

    Configuration priority (highest first):
    1. Environment variables (HS_THREADS, HS_LOG_LEVEL, HS_LOG_FORMAT)
    2. User config file ($HS_CONFIG or <config_dir>/config.yaml)
    3. Shipped config/config.yaml
    4. Built-in defaults
    """

    def __init__(self, config_dir: Optional[Path] = None,
                 config_file: Optional[Path] = None,
                 environ: Optional[Dict[str, str]] = None):
        """
        Initialize configuration manager.

        Args:
            config_dir: Optional directory holding a user config.yaml
            config_file: Optional explicit user config file (overrides config_dir)
            environ: Environment mapping, os.environ by default
        """
        if environ is None:
            load_dotenv()
            environ = dict(os.environ)
        self.environ = environ

        if config_file is None and "HS_CONFIG" in environ:
            config_file = Path(environ["HS_CONFIG"])
        if config_file is None and config_dir is not None:
            config_file = Path(config_dir) / "config.yaml"
        self.config_file = config_file

        self._config_cache: Optional[Dict[str, Any]] = None

    def load_config(self) -> Dict[str, Any]:
        """
        Load configuration from all sources.

        Returns:
            Merged configuration dictionary
        """
        if self._config_cache is not None:
            return self._config_cache

        config = self._load_default_config()

        if SHIPPED_CONFIG.exists():
            config = self._deep_merge(config, self._read_yaml(SHIPPED_CONFIG))

        if self.config_file is not None:
            if not self.config_file.exists():
                raise ConfigurationError(
                    f"Config file not found: {self.config_file}",
                    {"path": str(self.config_file)},
                )
            config = self._deep_merge(config, self._read_yaml(self.config_file))

        config = self._apply_env_overrides(config)
        self._validate(config)

        self._config_cache = config
        return config

    def section(self, name: str) -> Dict[str, Any]:
        """Return one top-level section of the merged configuration."""
        return copy.deepcopy(self.load_config().get(name, {}))

    @property
    def threads(self) -> int:
        return int(self.load_config()["runtime"]["threads"])

    def _read_yaml(self, path: Path) -> Dict[str, Any]:
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigurationError(f"Failed to parse {path}: {e}", {"path": str(path)})

        if not isinstance(data, dict):
            raise ConfigurationError(f"{path} must hold a mapping", {"path": str(path)})
        return data

    def _load_default_config(self) -> Dict[str, Any]:
        """Load default configuration."""
        return {
            "runtime": {
                "threads": max(1, min(8, os.cpu_count() or 1)),
            },
            "gfun": {
                "scan_points": 4096,
                "xatol": 1e-14,
            },
            "roots": {
                "max_depth": 20,
                "edge_points": 256,
                "max_phase_step": 0.3,
            },
            "birman_schwinger": {
                "power_tol": 1e-10,
                "power_max_iter": 10000,
                "nodes": 600,
            },
            "shooting": {
                "rtol": 1e-10,
                "atol": 1e-12,
                "method": "DOP853",
                "newton_tol": 1e-10,
                "max_newton": 50,
                "fd_step": 1e-7,
                "dedup_tol": 1e-8,
            },
            "logging": {
                "level": "WARNING",
                "console_format": "human",
            },
        }

    def _deep_merge(self, base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        """Deep merge two dictionaries."""
        result = copy.deepcopy(base)

        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result

    def _apply_env_overrides(self, config: Dict[str, Any]) -> Dict[str, Any]:
        """Apply environment variable overrides."""
        if "HS_THREADS" in self.environ:
            try:
                config["runtime"]["threads"] = int(self.environ["HS_THREADS"])
            except ValueError:
                raise ConfigurationError(
                    "HS_THREADS must be an integer",
                    {"HS_THREADS": self.environ["HS_THREADS"]},
                )

        if "HS_LOG_LEVEL" in self.environ:
            config["logging"]["level"] = self.environ["HS_LOG_LEVEL"].upper()

        if "HS_LOG_FORMAT" in self.environ:
            config["logging"]["console_format"] = self.environ["HS_LOG_FORMAT"]

        return config

    def _validate(self, config: Dict[str, Any]):
        if int(config["runtime"]["threads"]) < 1:
            raise ConfigurationError(
                "runtime.threads must be >= 1",
                {"threads": config["runtime"]["threads"]},
            )

        if config["logging"]["level"] not in _LOG_LEVELS:
            raise ConfigurationError(
                f"Unknown log level {config['logging']['level']}",
                {"allowed": sorted(_LOG_LEVELS)},
            )

        if config["logging"].get("console_format", "human") not in ("human", "json"):
            raise ConfigurationError(
                "logging.console_format must be 'human' or 'json'",
                {"console_format": config["logging"]["console_format"]},
            )

        for key in ("rtol", "atol", "newton_tol", "fd_step", "dedup_tol"):
            if float(config["shooting"][key]) <= 0:
                raise ConfigurationError(
                    f"shooting.{key} must be positive",
                    {key: config["shooting"][key]},
                )
