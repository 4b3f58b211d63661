"""
Shared domain types for the spectral enclosure toolkit.

Boundary conditions, spectral points and delta potentials are used by every
numerical module, so they live here rather than in any one of them.
"""

from enum import Enum
from dataclasses import dataclass, field
from typing import Optional
import cmath
import math

from src.core.errors import DomainError


TWO_PI = 2.0 * math.pi


class BoundaryKind(Enum):
    """Boundary condition at x = 0 (or none, on the whole line)."""
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"
    WHOLE_LINE = "whole-line"


@dataclass(frozen=True)
class BoundaryCondition:
    """
    Boundary condition of the operator -d^2/dx^2 - V.

    Attributes:
        kind: Which condition is imposed
        sigma: Robin parameter in psi'(0) = sigma psi(0); only for ROBIN
    """
    kind: BoundaryKind
    sigma: Optional[float] = None

    def __post_init__(self):
        """Validate the Robin parameter."""
        if self.kind is BoundaryKind.ROBIN:
            if self.sigma is None or not math.isfinite(self.sigma):
                raise DomainError("BoundaryCondition", "Robin requires a finite sigma")
            if self.sigma < 0:
                raise DomainError(
                    "BoundaryCondition",
                    "Robin requires sigma >= 0; for sigma < 0 no bound of this form holds",
                    sigma=self.sigma,
                )
        elif self.sigma is not None:
            raise DomainError(
                "BoundaryCondition",
                f"sigma is only meaningful for Robin, got kind={self.kind.value}",
                sigma=self.sigma,
            )

    @classmethod
    def dirichlet(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.DIRICHLET)

    @classmethod
    def neumann(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.NEUMANN)

    @classmethod
    def robin(cls, sigma: float) -> "BoundaryCondition":
        return cls(BoundaryKind.ROBIN, float(sigma))

    @classmethod
    def whole_line(cls) -> "BoundaryCondition":
        return cls(BoundaryKind.WHOLE_LINE)

    @classmethod
    def parse(cls, name: str, sigma: Optional[float] = None) -> "BoundaryCondition":
        """
        Build a boundary condition from its CLI name.

        Args:
            name: dirichlet, neumann, robin or whole-line
            sigma: Robin parameter, required for robin

        Returns:
            The boundary condition
        """
        try:
            kind = BoundaryKind(name.lower().replace("_", "-"))
        except ValueError:
            raise DomainError("BoundaryCondition", f"unknown boundary condition '{name}'")

        if kind is BoundaryKind.ROBIN:
            return cls.robin(0.0 if sigma is None else sigma)
        return cls(kind)

    @property
    def robin_sigma(self) -> float:
        """Effective Robin parameter; Neumann is Robin with sigma = 0."""
        if self.kind is BoundaryKind.ROBIN:
            return float(self.sigma)
        if self.kind is BoundaryKind.NEUMANN:
            return 0.0
        raise DomainError("BoundaryCondition", f"{self.kind.value} has no Robin parameter")

    @property
    def is_halfline(self) -> bool:
        return self.kind is not BoundaryKind.WHOLE_LINE

    def label(self) -> str:
        if self.kind is BoundaryKind.ROBIN:
            return f"robin(sigma={self.sigma:g})"
        return self.kind.value


@dataclass(frozen=True)
class SpectralPoint:
    """
    A candidate eigenvalue lambda = |lambda| e^{i theta}, theta in (0, 2 pi).

    Attributes:
        lam: The eigenvalue
        modulus: |lambda|
        theta: Argument normalised to (0, 2 pi)
    """
    lam: complex
    modulus: float = field(init=False)
    theta: float = field(init=False)

    def __post_init__(self):
        lam = complex(self.lam)
        if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
            raise DomainError("SpectralPoint", "lambda must be finite", lam=lam)

        theta = cmath.phase(lam) % TWO_PI
        if lam == 0 or theta == 0.0:
            raise DomainError("SpectralPoint", "lambda must lie off [0, inf)", lam=lam)

        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "modulus", abs(lam))
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_polar(cls, modulus: float, theta: float) -> "SpectralPoint":
        return cls(modulus * cmath.exp(1j * theta))

    @property
    def mu(self) -> complex:
        """Spectral parameter mu = -lambda of the resolvent."""
        return -self.lam


@dataclass(frozen=True)
class DeltaPotential:
    """
    The measure V = c delta(x - b).

    Attributes:
        c: Complex strength; its modulus is the L1 norm of V
        b: Location, b >= 0
    """
    c: complex
    b: float

    def __post_init__(self):
        if self.b < 0 or not math.isfinite(self.b):
            raise DomainError("DeltaPotential", "location b must be finite and >= 0", b=self.b)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "b", float(self.b))

    @property
    def l1_norm(self) -> float:
        return abs(self.c)


def decaying_root(mu: complex, operation: str) -> complex:
    """
    Principal square root of mu, required to lie in Re s > 0.

    Args:
        mu: Spectral parameter
        operation: Caller name for the error message

    Returns:
        s = sqrt(mu) with Re s > 0

    Raises:
        DomainError: if Re sqrt(mu) <= 0, i.e. mu on (-inf, 0]
    """
    s = cmath.sqrt(complex(mu))
    if not s.real > 0:
        raise DomainError(operation, "requires Re sqrt(mu) > 0", mu=complex(mu))
    return s


def check_theta(theta: float, operation: str) -> float:
    """Validate an angle in the open interval (0, 2 pi)."""
    if not (0.0 < theta < TWO_PI):
        raise DomainError(operation, "theta must lie in the open interval (0, 2 pi)", theta=theta)
    return float(theta)


def lambda_distance_to_positive_axis(lam: complex) -> float:
    """Distance from lambda to the half-axis [0, inf)."""
    if lam.real >= 0:
        return abs(lam.imag)
    return abs(lam)
