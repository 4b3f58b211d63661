"""
Enclosure regions for eigenvalues of -d^2/dx^2 - V.

Each boundary condition gives a polar region |lambda| <= R(theta) that only
depends on the L1 norm of V:

* Dirichlet:       |lambda|^{1/2} <= g(cot(theta/2)) ||V||_1 / 2
* Neumann, Robin:  |lambda|^{1/2} <= ||V||_1
* whole line:      |lambda|^{1/2} <= ||V||_1 / 2

The module also samples the boundary curve of the Dirichlet region at unit
norm and compares the self-adjoint Keller constant with the sech^2 family.
"""

from dataclasses import dataclass
from typing import List, Tuple
import cmath
import math

import numpy as np
from scipy.special import gammaln

from src.core.errors import DomainError
from src.core.logging import get_logger
from src.core.types import (
    BoundaryCondition,
    BoundaryKind,
    SpectralPoint,
    TWO_PI,
    check_theta,
)
from src.spectral.gfun import g_of_angle


logger = get_logger("region")


@dataclass(frozen=True)
class CurvePoint:
    """
    One point of the boundary curve {|z| = g(cot(theta/2))^2}.

    Attributes:
        theta: Argument in (0, 2 pi)
        radius4: Maximal 4|lambda| at ||V||_1 = 1
        z: Cartesian point radius4 e^{i theta}
    """
    theta: float
    radius4: float
    z: complex


@dataclass(frozen=True)
class Containment:
    """Result of an enclosure test; margin < 0 means outside."""
    inside: bool
    margin: float
    radius: float


def _check_norm(v_norm: float, operation: str) -> float:
    if not (v_norm >= 0 and math.isfinite(v_norm)):
        raise DomainError(operation, "requires a finite L1 norm >= 0", v_norm=v_norm)
    return float(v_norm)


def bound_radius(theta: float, v_norm: float, bc: BoundaryCondition) -> float:
    """
    Maximal admissible |lambda| at argument theta.

    Args:
        theta: Argument of lambda, in (0, 2 pi)
        v_norm: L1 norm of V
        bc: Boundary condition

    Returns:
        The largest |lambda| an eigenvalue with this argument can have
    """
    check_theta(theta, "bound_radius")
    v_norm = _check_norm(v_norm, "bound_radius")

    if bc.kind is BoundaryKind.DIRICHLET:
        return (0.5 * v_norm * g_of_angle(theta).value) ** 2
    if bc.kind is BoundaryKind.WHOLE_LINE:
        return (0.5 * v_norm) ** 2
    return v_norm ** 2


def uniform_radius(v_norm: float, bc: BoundaryCondition) -> float:
    """
    Angle-free bound valid for every theta.

    On the halfline g < 2 collapses all three boundary conditions to
    |lambda|^{1/2} <= ||V||_1; the whole line keeps the factor 1/2.
    """
    v_norm = _check_norm(v_norm, "uniform_radius")
    if bc.kind is BoundaryKind.WHOLE_LINE:
        return (0.5 * v_norm) ** 2
    return v_norm ** 2


def self_adjoint_radius(v_norm: float) -> float:
    """
    Bound on negative eigenvalues for real V on the halfline (any condition
    the variational principle compares to the whole line): |lambda|^{1/2} <= ||V||_1 / 2.
    """
    v_norm = _check_norm(v_norm, "self_adjoint_radius")
    return (0.5 * v_norm) ** 2


def contains(point: SpectralPoint, v_norm: float, bc: BoundaryCondition) -> Containment:
    """
    Test whether an eigenvalue lies in the enclosure region.

    Boundary points count as inside; the Dirichlet extremizers attain equality.

    Args:
        point: Candidate eigenvalue
        v_norm: L1 norm of V
        bc: Boundary condition

    Returns:
        Containment with margin = bound_radius - |lambda|
    """
    radius = bound_radius(point.theta, v_norm, bc)
    margin = radius - point.modulus
    return Containment(inside=margin >= 0, margin=margin, radius=radius)


def curve_point(theta: float) -> CurvePoint:
    """Boundary of the Dirichlet region at ||V||_1 = 1, scaled to 4|lambda|."""
    check_theta(theta, "curve_point")
    radius4 = g_of_angle(theta).value ** 2
    return CurvePoint(theta=theta, radius4=radius4, z=radius4 * cmath.exp(1j * theta))


def curve_sample(n: int) -> List[CurvePoint]:
    """
    Sample the Dirichlet boundary curve at theta_k = 2 pi k / (n + 1).

    Args:
        n: Number of points, n >= 2

    Returns:
        CurvePoints ordered by theta, endpoints excluded
    """
    if n < 2:
        raise DomainError("curve_sample", "requires n >= 2", n=n)
    points = [curve_point(TWO_PI * k / (n + 1)) for k in range(1, n + 1)]
    logger.debug("curve sampled", extra={"points": n})
    return points


def whole_line_circle(n: int) -> List[CurvePoint]:
    """The whole-line reference bound 4|lambda| = 1, on the same theta grid."""
    if n < 2:
        raise DomainError("whole_line_circle", "requires n >= 2", n=n)
    thetas = TWO_PI * np.arange(1, n + 1) / (n + 1)
    return [CurvePoint(theta=float(t), radius4=1.0, z=cmath.exp(1j * float(t))) for t in thetas]


def keller_constant(gamma: float) -> float:
    """
    Sharp self-adjoint constant in |lambda|^gamma <= C int |V|^{gamma + 1/2}.

    Args:
        gamma: Exponent, gamma > 1/2

    Returns:
        Gamma(gamma+1) / (sqrt(pi) Gamma(gamma+3/2)) ((gamma-1/2)/(gamma+1/2))^{gamma-1/2}
    """
    if not gamma > 0.5:
        raise DomainError("keller_constant", "requires gamma > 1/2", gamma=gamma)
    prefactor = math.exp(gammaln(gamma + 1.0) - gammaln(gamma + 1.5)) / math.sqrt(math.pi)
    p = gamma - 0.5
    # x^x -> 1 as x -> 0+, evaluated in log form
    power = math.exp(p * (math.log(p) - math.log(gamma + 0.5)))
    return prefactor * power


def _cosh_ratio_objective(gamma: float, t):
    return 0.5 * np.power(t, gamma - 0.5) / np.power(1.0 + t * t, 0.5 * (gamma + 0.5))


def cosh_ratio_sup(gamma: float, grid_points: int = 20001) -> Tuple[float, float]:
    """
    Supremum of |lambda|^gamma / int |V|^{gamma+1/2} over the sech^2 family on
    the imaginary axis alpha = i t.

    Args:
        gamma: Exponent, gamma > 1/2
        grid_points: Points of the log-spaced cross-check grid

    Returns:
        (supremum, maximizer t_star = sqrt(gamma - 1/2))
    """
    if not gamma > 0.5:
        raise DomainError("cosh_ratio_sup", "requires gamma > 1/2", gamma=gamma)

    t_star = math.sqrt(gamma - 0.5)
    sup = float(_cosh_ratio_objective(gamma, t_star))

    ts = np.logspace(-8, 4, grid_points)
    grid_sup = float(np.max(_cosh_ratio_objective(gamma, ts)))
    if grid_sup > sup * (1.0 + 1e-9):
        logger.warning(
            "cosh ratio grid search exceeds the stationary point",
            extra={"gamma": gamma, "grid_sup": grid_sup, "closed_form": sup},
        )
    return sup, t_star
