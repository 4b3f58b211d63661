"""
Runner - command-line scenarios over the spectral modules.
"""

from src.runner.base import BaseCommand, CommandOutput, Scenario, Table
from src.runner.commands import COMMAND_CLASSES

__all__ = [
    "BaseCommand",
    "CommandOutput",
    "Scenario",
    "Table",
    "COMMAND_CLASSES",
]
