"""
Complex root tools shared by the delta and shooting solvers.

* ``winding_number`` counts zeros of an analytic function inside a box by
  accumulating principal phase increments of f along the boundary, bisecting
  any boundary segment whose increment is not resolved.
* ``find_roots_in_box`` subdivides until every cell holds at most one zero and
  polishes each zero with complex Newton.
* ``polish_root`` is the Newton iteration itself.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple
import math

import numpy as np

from src.core.errors import DomainError, NumericalError, RootCountMismatchError
from src.core.logging import get_logger


logger = get_logger("roots")

ComplexFn = Callable[[np.ndarray], np.ndarray]

# off-centre split so that a zero on a bisector is unlikely
_SPLIT = 0.4973
_MAX_EDGE_BISECTIONS = 48


@dataclass(frozen=True)
class SearchBox:
    """Axis-aligned rectangle [re_min, re_max] x [im_min, im_max] in the complex plane."""
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise DomainError("SearchBox", "box must have positive width and height",
                              re=(self.re_min, self.re_max), im=(self.im_min, self.im_max))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    def corners(self) -> Tuple[complex, complex, complex, complex]:
        """Corners in counter-clockwise order starting bottom-left."""
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return (self.re_min - slack <= z.real <= self.re_max + slack
                and self.im_min - slack <= z.imag <= self.im_max + slack)

    def split(self) -> List["SearchBox"]:
        """Quarter the box, cutting slightly off centre."""
        xm = self.re_min + _SPLIT * (self.re_max - self.re_min)
        ym = self.im_min + _SPLIT * (self.im_max - self.im_min)
        return [
            SearchBox(self.re_min, xm, self.im_min, ym),
            SearchBox(xm, self.re_max, self.im_min, ym),
            SearchBox(xm, self.re_max, ym, self.im_max),
            SearchBox(self.re_min, xm, ym, self.im_max),
        ]


def _edge_phase(f: ComplexFn, a: complex, b: complex, n: int, max_step: float) -> float:
    """Total phase change of f along the segment a -> b."""
    ts = np.linspace(0.0, 1.0, n + 1)
    zs = a + (b - a) * ts
    vals = f(zs)
    if np.any(vals == 0):
        raise NumericalError("function vanishes on the search contour", {"segment": [str(a), str(b)]})

    total = 0.0
    # explicit stack keeps bisection depth bounded and order deterministic
    stack = [(zs[i], zs[i + 1], vals[i], vals[i + 1], 0) for i in range(n - 1, -1, -1)]
    while stack:
        z0, z1, f0, f1, depth = stack.pop()
        step = float(np.angle(f1 / f0))
        if abs(step) <= max_step or depth >= _MAX_EDGE_BISECTIONS:
            total += step
            continue
        zm = 0.5 * (z0 + z1)
        fm = complex(f(np.array([zm]))[0])
        if fm == 0:
            raise NumericalError("function vanishes on the search contour", {"point": str(zm)})
        stack.append((zm, z1, fm, f1, depth + 1))
        stack.append((z0, zm, f0, fm, depth + 1))
    return total


def winding_number(f: ComplexFn, box: SearchBox, edge_points: int = 256,
                   max_phase_step: float = 0.3) -> int:
    """
    Number of zeros of f inside box by the argument principle.

    Args:
        f: Vectorised analytic function
        box: Contour
        edge_points: Initial samples per edge
        max_phase_step: Largest accepted phase increment between samples

    Returns:
        Winding number of f(boundary) around the origin
    """
    corners = box.corners()
    total = 0.0
    for i in range(4):
        total += _edge_phase(f, corners[i], corners[(i + 1) % 4], edge_points, max_phase_step)
    return int(round(total / (2.0 * math.pi)))


def polish_root(f: Callable[[complex], complex], df: Callable[[complex], complex],
                z0: complex, tol: float, max_iter: int = 60) -> Optional[complex]:
    """
    Complex Newton iteration.

    Args:
        f: Function
        df: Its derivative
        z0: Starting point
        tol: Stop once |f(z)| <= tol
        max_iter: Iteration cap

    Returns:
        The root, or None when Newton stalls or diverges
    """
    z = complex(z0)
    for _ in range(max_iter):
        fz = f(z)
        if abs(fz) <= tol:
            return z
        dfz = df(z)
        if dfz == 0 or not np.isfinite(dfz):
            return None
        z = z - fz / dfz
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return None
    return z if abs(f(z)) <= tol else None


def _merge(roots: List[complex], tol: float) -> List[complex]:
    merged: List[complex] = []
    for r in roots:
        if all(abs(r - m) > tol for m in merged):
            merged.append(r)
    return merged


def find_roots_in_box(f: ComplexFn, df: ComplexFn, box: SearchBox, tol: float,
                      max_depth: int = 20, edge_points: int = 256,
                      max_phase_step: float = 0.3, merge_tol: float = 1e-9) -> List[complex]:
    """
    All zeros of an analytic function inside a box.

    Args:
        f: Vectorised analytic function
        df: Vectorised derivative of f
        box: Search region
        tol: Newton stopping tolerance on |f|
        max_depth: Maximum subdivision depth
        edge_points: Initial samples per edge for the winding count
        max_phase_step: Phase resolution of the winding count
        merge_tol: Roots closer than this are merged

    Returns:
        Distinct roots inside the box

    Raises:
        RootCountMismatchError: if the polished roots do not match the winding count
    """
    f1 = lambda z: complex(f(np.array([z]))[0])
    df1 = lambda z: complex(df(np.array([z]))[0])

    expected = winding_number(f, box, edge_points, max_phase_step)
    roots: List[complex] = []
    deepest = 0

    # explicit work list instead of recursion; cells carry their own count
    pending = [(box, expected, 0)]
    while pending:
        cell, count, depth = pending.pop()
        deepest = max(deepest, depth)
        if count <= 0:
            continue

        if count == 1:
            root = polish_root(f1, df1, cell.center, tol)
            slack = 1e-12 * (1.0 + abs(cell.center))
            if root is not None and cell.contains(root, slack):
                roots.append(root)
                continue

        if depth >= max_depth:
            # last resort: Newton from the centre of an unresolved cell
            root = polish_root(f1, df1, cell.center, tol)
            if root is not None and cell.contains(root, merge_tol):
                roots.append(root)
            continue

        for child in cell.split():
            pending.append((child, winding_number(f, child, edge_points, max_phase_step), depth + 1))

    distinct = _merge(roots, merge_tol)
    logger.debug(
        "box search finished",
        extra={"winding": expected, "found": len(distinct), "depth": deepest},
    )
    if len(distinct) != expected:
        raise RootCountMismatchError(winding=expected, found=len(distinct), depth=deepest)

    return sorted(distinct, key=lambda z: (z.real, z.imag))
