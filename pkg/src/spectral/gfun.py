"""
The extremal function g(a) = sup_{y >= 0} |e^{iay} - e^{-y}|.

g controls the sharp Dirichlet constant through g(cot(theta/2)). For a != 0
the supremum is attained at some y0 with pi/3 < |a| y0 <= pi, so the search
runs over that bracket only: a dense scan locates the peak, a bounded scalar
minimization refines it.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple
import math

import numpy as np
from scipy.optimize import minimize_scalar

from src.core.errors import DomainError
from src.core.logging import get_logger


logger = get_logger("gfun")

SCAN_POINTS = 4096
XATOL = 1e-14


@dataclass(frozen=True)
class GResult:
    """
    Value of g at one argument.

    Attributes:
        a: Argument as given (sign kept)
        value: The supremum, in [1, 2)
        argmax: Maximizer y0, None when the supremum is not attained (a = 0)
        attained: Whether argmax is a true maximizer
    """
    a: float
    value: float
    argmax: Optional[float]
    attained: bool


def _objective_sq(a: float, y):
    """|e^{iay} - e^{-y}|^2, vectorised over y."""
    e = np.exp(-y)
    return 1.0 - 2.0 * e * np.cos(a * y) + e * e


def g_objective(a: float, y: float) -> float:
    """
    Evaluate |e^{iay} - e^{-y}|.

    Args:
        a: Real parameter
        y: Point y >= 0

    Returns:
        sqrt(1 - 2 e^{-y} cos(ay) + e^{-2y}), in [0, 2)
    """
    if y < 0:
        raise DomainError("g_objective", "requires y >= 0", y=y)
    return math.sqrt(max(float(_objective_sq(a, y)), 0.0))


def g(a: float, scan_points: int = SCAN_POINTS, xatol: float = XATOL) -> GResult:
    """
    Compute g(a) and its maximizer.

    Args:
        a: Finite real argument; g is even, so |a| is used
        scan_points: Points of the dense pre-scan over (pi/(3|a|), pi/|a|]
        xatol: Bracket width at which refinement stops

    Returns:
        GResult; for a = 0 the value is 1 and the supremum is not attained
    """
    if not math.isfinite(a):
        raise DomainError("g", "requires a finite argument", a=a)
    return _g_abs(abs(float(a)), int(scan_points), float(xatol), float(a))


@lru_cache(maxsize=4096)
def _g_abs(abs_a: float, scan_points: int, xatol: float, a: float) -> GResult:
    if abs_a == 0.0:
        # supremum approached only as y -> inf
        return GResult(a=a, value=1.0, argmax=None, attained=False)

    lo = math.pi / (3.0 * abs_a)
    hi = math.pi / abs_a

    ys = np.linspace(lo, hi, scan_points + 1)[1:]
    vals = _objective_sq(abs_a, ys)
    k = int(np.argmax(vals))
    best_y, best_val = float(ys[k]), float(vals[k])

    left = float(ys[k - 1]) if k > 0 else lo
    right = float(ys[min(k + 1, scan_points - 1)])
    if right > left:
        res = minimize_scalar(
            lambda y: -_objective_sq(abs_a, y),
            bounds=(left, right),
            method="bounded",
            options={"xatol": max(xatol, 4.0 * np.finfo(float).eps * right)},
        )
        y_ref = float(res.x)
        val_ref = float(_objective_sq(abs_a, y_ref))
        if val_ref > best_val and lo < y_ref <= hi:
            best_y, best_val = y_ref, val_ref

    logger.debug("g evaluated", extra={"a": a, "argmax": best_y, "value_sq": best_val})
    return GResult(a=a, value=min(math.sqrt(best_val), 2.0), argmax=best_y, attained=True)


def g_envelopes(a: float) -> Tuple[float, float]:
    """
    Validated lower and upper envelopes of g.

    Args:
        a: Argument, a > 0

    Returns:
        (1 + e^{-pi/a}, min(2, 1 + e^{-pi/(3a)}))
    """
    if not a > 0:
        raise DomainError("g_envelopes", "requires a > 0", a=a)
    lower = 1.0 + math.exp(-math.pi / a)
    upper = min(2.0, 1.0 + math.exp(-math.pi / (3.0 * a)))
    return lower, upper


def g_large_a(a: float) -> float:
    """Two-term expansion 2 - pi/a of g for large |a|."""
    if a == 0:
        raise DomainError("g_large_a", "requires a != 0", a=a)
    return 2.0 - math.pi / abs(a)


def g_of_angle(theta: float) -> GResult:
    """g(cot(theta/2)), the Dirichlet factor at eigenvalue argument theta."""
    return g(cot_half(theta))


def cot_half(theta: float) -> float:
    """cot(theta/2), exact zero at theta = pi."""
    if theta == math.pi:
        return 0.0
    half = 0.5 * theta
    return math.cos(half) / math.sin(half)
