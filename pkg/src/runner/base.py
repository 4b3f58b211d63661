"""
Base classes for runner commands.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.config.manager import ConfigManager
from src.core.errors import ScenarioValidationError


COMMANDS = ("curve", "gfun", "extremal", "delta-eigs", "verify-bs", "shoot", "audit", "keller")


class CommandParams(BaseModel):
    """Base parameter model; unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")


class Table(BaseModel):
    """A rectangular result: column names and rows."""
    header: List[str]
    rows: List[List[Any]] = Field(default_factory=list)

    def records(self) -> List[Dict[str, Any]]:
        return [dict(zip(self.header, row)) for row in self.rows]


class CommandOutput(BaseModel):
    """Standardized output of every command."""
    status: str = Field(..., description="success|failed")
    content: str = Field(..., description="One-line human summary")
    table: Table = Field(..., description="Primary result table")
    companions: Dict[str, Table] = Field(
        default_factory=dict,
        description="Extra tables keyed by file-name suffix, e.g. '_line'",
    )
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == "success"


class Scenario(BaseModel):
    """One CLI invocation: a command, its parameters and where results go."""
    model_config = ConfigDict(extra="forbid")

    command: Literal["curve", "gfun", "extremal", "delta-eigs", "verify-bs", "shoot", "audit", "keller"]
    parameters: Dict[str, Any] = Field(default_factory=dict)
    output_path: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None

    def resolved_format(self) -> str:
        """Explicit format, else the output suffix, else CSV."""
        if self.format is not None:
            return self.format
        if self.output_path and Path(self.output_path).suffix.lower() == ".json":
            return "json"
        return "csv"

    @classmethod
    def from_mapping(cls, data: Dict[str, Any]) -> "Scenario":
        """Validate a decoded scenario document."""
        command = str(data.get("command", "?")) if isinstance(data, dict) else "?"
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ScenarioValidationError(command, _describe(e))


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    where = ".".join(str(p) for p in first.get("loc", ())) or "scenario"
    return f"{where}: {first.get('msg', 'invalid value')}"


class BaseCommand(ABC):
    """Abstract base class for runner commands."""

    params_model: Type[CommandParams] = CommandParams

    def __init__(self, config: Optional[ConfigManager] = None):
        """Initialize with the configuration manager."""
        self.config = config or ConfigManager()

    @abstractmethod
    def get_name(self) -> str:
        """Return command name."""
        pass

    @abstractmethod
    def get_description(self) -> str:
        """Return command description."""
        pass

    def get_input_schema(self) -> Dict[str, Any]:
        """Return JSON schema for command parameters."""
        return self.params_model.model_json_schema()

    def validate(self, parameters: Dict[str, Any]) -> CommandParams:
        """
        Validate raw parameters against the command's model.

        Args:
            parameters: Parameter mapping from flags or a scenario file

        Returns:
            Parsed parameters

        Raises:
            ScenarioValidationError: on unknown keys or bad values
        """
        try:
            return self.params_model.model_validate(parameters)
        except ValidationError as e:
            raise ScenarioValidationError(self.get_name(), _describe(e))

    @abstractmethod
    def execute(self, params: CommandParams) -> CommandOutput:
        """Execute the command with validated parameters."""
        pass
