"""
Exact rank-one models V = c delta(x - b).

For a delta potential the Birman-Schwinger operator is a number, so the
eigenvalue condition becomes a scalar equation in s = sqrt(mu), mu = -lambda:

* Dirichlet:   c (1 - e^{-2sb}) / (2s) = 1
* Robin(sigma) at b = 0:  c / (s + sigma) = 1
* whole line:  c / (2s) = 1

The module also builds the potentials that make the enclosure bounds sharp.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence
import cmath
import math

import numpy as np

from src.core.errors import DomainError
from src.core.logging import get_logger
from src.core.types import DeltaPotential, check_theta, decaying_root
from src.spectral.gfun import g, cot_half
from src.spectral.roots import SearchBox, find_roots_in_box


logger = get_logger("delta")

NEWTON_TOL_FACTOR = 1e-12
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class ExtremalResult:
    """
    A Dirichlet delta potential whose eigenvalue sits on the enclosure boundary.

    Attributes:
        delta: The potential, |c| = m
        lam: Its eigenvalue (m^2/4) g^2 e^{i theta}
        g_value: g(cot(theta/2))
        bs_residual: |Birman-Schwinger number - 1|
    """
    delta: DeltaPotential
    lam: complex
    g_value: float
    bs_residual: float


@dataclass(frozen=True)
class RobinStep:
    """One member of the Robin sharpness sequence."""
    k: float
    lam: complex
    ratio: float


def dirichlet_bs_number(delta: DeltaPotential, mu: complex) -> complex:
    """
    Birman-Schwinger number c (1 - e^{-2 sqrt(mu) b}) / (2 sqrt(mu)).

    Args:
        delta: The potential
        mu: Spectral parameter with Re sqrt(mu) > 0

    Returns:
        The scalar Birman-Schwinger operator
    """
    s = decaying_root(mu, "dirichlet_bs_number")
    return delta.c * (-np.expm1(-2.0 * s * delta.b)) / (2.0 * s)


def default_box(delta: DeltaPotential) -> SearchBox:
    """
    Search region for Dirichlet delta eigenvalues in the s-halfplane.

    Any zero of c(1 - e^{-2sb}) - 2s has |s| < |c| because |1 - e^{-2sb}| < 2,
    so the box of half-width 2|c| holds them all.
    """
    r = 2.0 * max(abs(delta.c), 1e-300)
    return SearchBox(1e-6, r, -r, r)


def dirichlet_delta_eigenvalues(delta: DeltaPotential, box: Optional[SearchBox] = None,
                                max_depth: int = 20, edge_points: int = 256,
                                max_phase_step: float = 0.3) -> List[complex]:
    """
    All Dirichlet eigenvalues of V = c delta(x - b) whose root s lies in box.

    Args:
        delta: The potential
        box: Rectangle inside Re s > 0; default_box(delta) when omitted
        max_depth: Maximum subdivision depth
        edge_points: Initial boundary samples per edge
        max_phase_step: Phase resolution of the winding count

    Returns:
        Eigenvalues lambda = -s^2 sorted by real then imaginary part
    """
    if box is None:
        if delta.c == 0:
            return []
        box = default_box(delta)
    if box.re_min <= 0:
        raise DomainError("dirichlet_delta_eigenvalues", "box must lie inside Re s > 0",
                          re_min=box.re_min)

    c, b = delta.c, delta.b

    def h(s):
        return c * (-np.expm1(-2.0 * s * b)) - 2.0 * s

    def dh(s):
        return 2.0 * c * b * np.exp(-2.0 * s * b) - 2.0

    roots = find_roots_in_box(
        h, dh, box,
        tol=NEWTON_TOL_FACTOR * (1.0 + abs(c)),
        max_depth=max_depth,
        edge_points=edge_points,
        max_phase_step=max_phase_step,
        merge_tol=MERGE_TOL,
    )

    eigenvalues = _dedupe([-s * s for s in roots])
    logger.debug("dirichlet delta eigenvalues", extra={"count": len(eigenvalues), "b": b})
    return eigenvalues


def _dedupe(values: Sequence[complex]) -> List[complex]:
    out: List[complex] = []
    for v in values:
        if all(abs(v - w) > MERGE_TOL for w in out):
            out.append(complex(v))
    return sorted(out, key=lambda z: (z.real, z.imag))


def extremal_delta(m: float, theta: float) -> ExtremalResult:
    """
    Delta potential attaining equality in the Dirichlet bound.

    Args:
        m: Prescribed L1 norm, m > 0
        theta: Prescribed eigenvalue argument in (0, 2 pi), theta != pi

    Returns:
        ExtremalResult with |c| = m and lambda = (m^2/4) g(cot(theta/2))^2 e^{i theta}
    """
    if not (m > 0 and math.isfinite(m)):
        raise DomainError("extremal_delta", "requires m > 0", m=m)
    check_theta(theta, "extremal_delta")

    a = cot_half(theta)
    res = g(a)
    if not res.attained:
        raise DomainError(
            "extremal_delta",
            "at theta = pi the supremum g(0) = 1 is not attained; no extremal delta exists",
            theta=theta,
        )

    modulus = 0.25 * m * m * res.value ** 2
    root_mod = math.sqrt(modulus)
    s = root_mod * cmath.exp(0.5j * (theta - math.pi))
    b = res.argmax / (2.0 * root_mod * math.sin(0.5 * theta))
    c = 2.0 * s / (-cmath.exp(-2.0 * s * b) + 1.0)

    delta = DeltaPotential(c=c, b=b)
    lam = modulus * cmath.exp(1j * theta)
    residual = abs(dirichlet_bs_number(delta, -lam) - 1.0)

    logger.debug(
        "extremal delta constructed",
        extra={"m": m, "theta": theta, "b": b, "bs_residual": residual},
    )
    return ExtremalResult(delta=delta, lam=lam, g_value=res.value, bs_residual=residual)


def neumann_delta_eigenvalue(c: complex) -> complex:
    """
    Eigenvalue of V = c delta(x) with Neumann condition: lambda = -c^2.

    Args:
        c: Strength with Re c > 0

    Returns:
        The unique eigenvalue, |lambda|^{1/2} = |c| = ||V||_1
    """
    c = complex(c)
    if not c.real > 0:
        raise DomainError("neumann_delta_eigenvalue", "requires Re c > 0", c=c)
    return -c * c


def robin_delta_eigenvalue(c: complex, sigma: float) -> complex:
    """
    Eigenvalue of V = c delta(x) with psi'(0) = sigma psi(0): lambda = -(c - sigma)^2.

    Args:
        c: Strength with Re(c - sigma) > 0
        sigma: Robin parameter, sigma >= 0

    Returns:
        The unique eigenvalue
    """
    c = complex(c)
    if not sigma >= 0:
        raise DomainError("robin_delta_eigenvalue", "requires sigma >= 0", sigma=sigma)
    s = c - sigma
    if not s.real > 0:
        raise DomainError("robin_delta_eigenvalue", "requires Re(c - sigma) > 0",
                          c=c, sigma=sigma)
    return -s * s


def whole_line_delta_eigenvalue(c: complex) -> complex:
    """
    Eigenvalue of V = c delta(x - b) on the whole line: lambda = -c^2/4.

    Equality case of the whole-line bound, independent of b.
    """
    c = complex(c)
    if not c.real > 0:
        raise DomainError("whole_line_delta_eigenvalue", "requires Re c > 0", c=c)
    return -0.25 * c * c


def robin_sharpness_sequence(theta: float, sigma: float,
                             k_values: Sequence[float]) -> List[RobinStep]:
    """
    Delta potentials c_k = -i k e^{i theta/2} at the origin whose Robin
    eigenvalues approach the Neumann/Robin bound as k grows.

    Args:
        theta: Target argument in (0, 2 pi)
        sigma: Robin parameter, sigma >= 0
        k_values: Strength moduli k > 0

    Returns:
        (k, lambda_k, |lambda_k|^{1/2}/k) for every admissible k, in input order
    """
    check_theta(theta, "robin_sharpness_sequence")
    if not sigma >= 0:
        raise DomainError("robin_sharpness_sequence", "requires sigma >= 0", sigma=sigma)

    steps: List[RobinStep] = []
    phase = -1j * cmath.exp(0.5j * theta)
    for k in k_values:
        c_k = k * phase
        if not (k > 0 and (c_k - sigma).real > 0):
            logger.warning(
                "skipping Robin sharpness step",
                extra={"k": k, "sigma": sigma, "reason": "Re(c_k - sigma) <= 0"},
            )
            continue
        lam = robin_delta_eigenvalue(c_k, sigma)
        steps.append(RobinStep(k=float(k), lam=lam, ratio=math.sqrt(abs(lam)) / k))
    return steps
