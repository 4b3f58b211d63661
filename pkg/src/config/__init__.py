"""Configuration management for the toolkit."""

from src.config.manager import ConfigManager

__all__ = ["ConfigManager"]
