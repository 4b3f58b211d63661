"""
Halfline Schrödinger spectral enclosures.

Numerical toolkit for eigenvalue bounds of -d^2/dx^2 - V with complex V on
the halfline (Dirichlet, Neumann, Robin) and the whole line: the extremal
function g, enclosure regions, exact delta models, Birman-Schwinger
discretizations, a shooting eigensolver and a CLI runner.
"""

__version__ = "1.0.0"

from src.core.types import BoundaryCondition, BoundaryKind, DeltaPotential, SpectralPoint

__all__ = [
    "BoundaryCondition",
    "BoundaryKind",
    "DeltaPotential",
    "SpectralPoint",
]
