"""
Error handling and custom exceptions for the spectral enclosure toolkit.

This module defines the exception hierarchy shared by the numerical modules
and the mapping from exceptions to CLI exit statuses.
"""

from typing import Optional, Dict, Any
import logging


logger = logging.getLogger(__name__)


class EnclosureError(Exception):
    """Base exception for all toolkit errors."""

    log_level = logging.ERROR

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize toolkit error.

        Args:
            message: Error message
            details: Optional dictionary with additional error details
        """
        super().__init__(message)
        self.details = details or {}

        logger.log(
            self.log_level,
            f"{self.__class__.__name__}: {message}",
            extra={"details": self.details},
        )


class ConfigurationError(EnclosureError):
    """Raised when there's a configuration issue."""
    pass


class ScenarioValidationError(ConfigurationError):
    """Raised when a scenario or its command parameters fail validation."""

    def __init__(self, command: str, reason: str):
        """
        Initialize scenario validation error.

        Args:
            command: CLI command the scenario targets
            reason: Why validation failed
        """
        super().__init__(
            f"Invalid scenario for '{command}': {reason}",
            {"command": command, "reason": reason},
        )


class DomainError(EnclosureError, ValueError):
    """Raised when an input lies outside the domain of an operation."""

    # precondition checks fire often in sweeps; keep them out of the error log
    log_level = logging.DEBUG

    def __init__(self, operation: str, reason: str, **values: Any):
        """
        Initialize domain error.

        Args:
            operation: Name of the operation whose precondition failed
            reason: Human-readable description of the violated precondition
            **values: Offending input values
        """
        super().__init__(
            f"{operation}: {reason}",
            {"operation": operation, "reason": reason, **_plain(values)},
        )


class NumericalError(EnclosureError):
    """Raised when a numerical procedure fails to deliver its guarantee."""
    pass


class ConvergenceError(NumericalError):
    """Raised when an iterative method exceeds its iteration budget."""

    def __init__(self, method: str, iterations: int, residual: Optional[float] = None):
        """
        Initialize convergence error.

        Args:
            method: Iterative method that failed
            iterations: Iterations performed before giving up
            residual: Last residual or change measure, if known
        """
        message = f"{method} did not converge after {iterations} iterations"
        if residual is not None:
            message += f" (last residual {residual:.3e})"

        super().__init__(
            message,
            {"method": method, "iterations": iterations, "residual": residual},
        )


class RootCountMismatchError(NumericalError):
    """Raised when the winding count and the polished roots disagree."""

    def __init__(self, winding: int, found: int, depth: int):
        """
        Initialize root count mismatch error.

        Args:
            winding: Root count from the argument principle
            found: Number of distinct polished roots
            depth: Subdivision depth reached
        """
        super().__init__(
            f"Argument principle counted {winding} roots but {found} were "
            f"polished (subdivision depth {depth})",
            {"winding": winding, "found": found, "depth": depth},
        )


class IntegrationError(NumericalError):
    """Raised when the inward ODE integration breaks down."""

    def __init__(self, reason: str, x: Optional[float] = None, lam: Optional[complex] = None):
        """
        Initialize integration error.

        Args:
            reason: Solver message or overflow description
            x: Position where integration stopped
            lam: Spectral parameter being integrated
        """
        message = f"Inward integration failed: {reason}"
        if x is not None:
            message += f" at x={x:.6g}"

        super().__init__(message, {"reason": reason, "x": x, **_plain({"lambda": lam})})


class AuditFailure(NumericalError):
    """Raised when an eigenvalue escapes its enclosure or is not certified."""

    def __init__(self, lam: complex, margin: float, certificate: float):
        """
        Initialize audit failure.

        Args:
            lam: Offending eigenvalue
            margin: Enclosure margin (negative means outside)
            certificate: Birman-Schwinger certificate |nu - 1|
        """
        super().__init__(
            f"Eigenvalue {lam:.10g} failed the enclosure audit "
            f"(margin {margin:.3e}, certificate {certificate:.3e})",
            {**_plain({"lambda": lam}), "margin": margin, "certificate": certificate},
        )
        self.lam = lam
        self.margin = margin
        self.certificate = certificate


def _plain(values: Dict[str, Any]) -> Dict[str, Any]:
    """Split complex values into re/im pairs so details stay JSON friendly."""
    out: Dict[str, Any] = {}
    for key, value in values.items():
        if isinstance(value, complex):
            out[key] = {"re": value.real, "im": value.imag}
        else:
            out[key] = value
    return out


class ErrorHandler:
    """
    Centralized error handling for the CLI.

    Maps exceptions to exit statuses and user-facing diagnostics.
    """

    EXIT_OK = 0
    EXIT_VALIDATION = 1
    EXIT_NUMERICAL = 2

    def __init__(self):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def exit_code_for(self, error: Exception) -> int:
        """
        Determine the exit status for an error.

        Args:
            error: The exception to classify

        Returns:
            1 for validation, configuration and domain errors, 2 for numerical
            failures and for anything raised outside the toolkit
        """
        if isinstance(error, (ConfigurationError, DomainError)):
            return self.EXIT_VALIDATION

        if not isinstance(error, NumericalError):
            self.logger.error(
                f"Unexpected {type(error).__name__}: {error}",
                exc_info=(type(error), error, error.__traceback__),
            )
        return self.EXIT_NUMERICAL

    def format_user_error(self, error: Exception) -> str:
        """
        Format an error message for standard error.

        Args:
            error: The exception to format

        Returns:
            Single-line diagnostic
        """
        if isinstance(error, ScenarioValidationError):
            return f"invalid scenario: {error.details['reason']}"

        elif isinstance(error, ConfigurationError):
            return f"configuration error: {error}"

        elif isinstance(error, DomainError):
            return f"domain error: {error}"

        elif isinstance(error, AuditFailure):
            return (
                f"audit failed at lambda={error.lam:.10g}: "
                f"margin={error.margin:.3e}, certificate={error.certificate:.3e}"
            )

        elif isinstance(error, NumericalError):
            return f"numerical failure: {error}"

        else:
            return f"unexpected error: {error}"
