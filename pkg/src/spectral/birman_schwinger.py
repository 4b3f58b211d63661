"""
Birman-Schwinger operators V^{1/2} (-d^2/dx^2 + mu)^{-1} |V|^{1/2}.

lambda = -mu is an eigenvalue of -d^2/dx^2 - V exactly when this operator has
eigenvalue 1, so its norm is at least 1 there. The resolvent kernels are
explicit for every boundary condition; bounding them uniformly gives the
enclosure bounds, and a Nystrom discretization lets us check both the norm
inequality and individual eigenvalues numerically.
"""

from dataclasses import dataclass, field
from typing import Optional
import math

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import ArpackNoConvergence, eigs

from src.core.errors import ConvergenceError, DomainError
from src.core.logging import get_logger
from src.core.types import (
    BoundaryCondition,
    BoundaryKind,
    TWO_PI,
    decaying_root,
)
from src.spectral.gfun import g, cot_half


logger = get_logger("birman_schwinger")

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000
POWER_SEED = 20100604
NORM_REL_SLACK = 1e-8
QUADRATURE_ALLOWANCE = 1e-6
DENSE_CERTIFICATE_SIZE = 64


@dataclass(frozen=True)
class SampledPotential:
    """
    A potential on a quadrature grid.

    Attributes:
        nodes: Increasing positions x_i
        values: Complex values V(x_i)
        weights: Positive quadrature weights w_i
    """
    nodes: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        weights = np.asarray(self.weights, dtype=float)

        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.shape != weights.shape:
            raise DomainError("SampledPotential", "nodes, values and weights must be 1-D of equal length",
                              shapes=[nodes.shape, values.shape, weights.shape])
        if nodes.size == 0:
            raise DomainError("SampledPotential", "at least one node is required")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("SampledPotential", "nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise DomainError("SampledPotential", "weights must be positive")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise DomainError("SampledPotential", "nodes and values must be finite")

        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def trapezoid(cls, nodes, values) -> "SampledPotential":
        """Composite trapezoid weights from the node spacing."""
        nodes = np.asarray(nodes, dtype=float)
        if nodes.size < 2:
            raise DomainError("SampledPotential.trapezoid", "needs at least two nodes")
        h = np.diff(nodes)
        weights = np.zeros_like(nodes)
        weights[:-1] += 0.5 * h
        weights[1:] += 0.5 * h
        return cls(nodes=nodes, values=values, weights=weights)

    @classmethod
    def zero(cls, length: float = 1.0, n: int = 16) -> "SampledPotential":
        nodes = np.linspace(0.0, length, n)
        return cls.trapezoid(nodes, np.zeros(n, dtype=complex))

    @property
    def l1_norm(self) -> float:
        """Discrete L1 norm sum w_i |V(x_i)|."""
        return float(np.sum(self.weights * np.abs(self.values)))

    @property
    def size(self) -> int:
        return int(self.nodes.size)


@dataclass(frozen=True)
class BSMatrix:
    """
    Nystrom matrix A_ij = sqrt(w_i) V_i^{1/2} K(x_i, x_j; mu) |V_j|^{1/2} sqrt(w_j).
    """
    entries: np.ndarray
    mu: complex
    bc: BoundaryCondition = field(default_factory=BoundaryCondition.dirichlet)


@dataclass(frozen=True)
class NormBoundReport:
    """Discrete operator norm against the analytic upper bound."""
    norm: float
    rhs: float
    ok: bool

    @property
    def ratio(self) -> float:
        return self.norm / self.rhs if self.rhs > 0 else 0.0


def _check_nodes(x, bc: BoundaryCondition, operation: str):
    if bc.is_halfline and np.any(np.asarray(x) < 0):
        raise DomainError(operation, "halfline kernels need x, y >= 0")


def _kernel(x, y, s: complex, bc: BoundaryCondition):
    direct = np.exp(-s * np.abs(x - y))
    if bc.kind is BoundaryKind.WHOLE_LINE:
        return direct / (2.0 * s)
    image = np.exp(-s * (x + y))
    if bc.kind is BoundaryKind.DIRICHLET:
        return (direct - image) / (2.0 * s)
    sigma = bc.robin_sigma
    r = (s - sigma) / (s + sigma)
    return (direct + r * image) / (2.0 * s)


def kernel(x, y, mu: complex, bc: BoundaryCondition):
    """
    Resolvent kernel of -d^2/dx^2 + mu under the given boundary condition.

    Args:
        x: Position(s), >= 0 on the halfline
        y: Position(s), broadcast against x
        mu: Spectral parameter with Re sqrt(mu) > 0
        bc: Boundary condition

    Returns:
        Dirichlet: (e^{-s|x-y|} - e^{-s(x+y)}) / 2s
        Robin:     (e^{-s|x-y|} + r e^{-s(x+y)}) / 2s, r = (s - sigma)/(s + sigma)
        whole line: e^{-s|x-y|} / 2s
    """
    s = decaying_root(mu, "kernel")
    _check_nodes(x, bc, "kernel")
    _check_nodes(y, bc, "kernel")
    out = _kernel(np.asarray(x, dtype=float), np.asarray(y, dtype=float), s, bc)
    return complex(out) if np.ndim(out) == 0 else out


def _theta_of_mu(mu: complex) -> float:
    theta = math.atan2((-mu).imag, (-mu).real) % TWO_PI
    return theta


def dirichlet_kernel_sup(mu: complex) -> float:
    """
    sup_{x, y >= 0} |2 sqrt(mu) K_D(x, y; mu)| = g(cot(theta/2)), theta = arg(-mu).

    Args:
        mu: Spectral parameter with Re sqrt(mu) > 0

    Returns:
        The supremum, in [1, 2)
    """
    decaying_root(mu, "dirichlet_kernel_sup")
    return g(cot_half(_theta_of_mu(complex(mu)))).value


def robin_sup_factor(mu: complex, sigma: float, scan_points: int = 4096) -> float:
    """
    sup_{y >= 0} |1 + r e^{-2 sqrt(mu) y}| with r = (sqrt(mu) - sigma)/(sqrt(mu) + sigma).

    Args:
        mu: Spectral parameter with Re sqrt(mu) > 0
        sigma: Robin parameter, sigma >= 0
        scan_points: Dense scan size before refinement

    Returns:
        The supremum; never above 2 since |r| <= 1
    """
    s = decaying_root(mu, "robin_sup_factor")
    if not sigma >= 0:
        raise DomainError("robin_sup_factor", "requires sigma >= 0", sigma=sigma)
    r = (s - sigma) / (s + sigma)

    def modulus(y):
        return np.abs(1.0 + r * np.exp(-2.0 * s * y))

    # e^{-2 Re(s) y} < 1e-17 beyond this
    y_max = 20.0 / s.real
    ys = np.linspace(0.0, y_max, scan_points)
    vals = modulus(ys)
    k = int(np.argmax(vals))
    best = max(float(vals[k]), float(abs(1.0 + r)), 1.0)

    if 0 < k < scan_points - 1:
        res = minimize_scalar(
            lambda y: -float(modulus(y)),
            bounds=(float(ys[k - 1]), float(ys[k + 1])),
            method="bounded",
            options={"xatol": 1e-14 * max(1.0, y_max)},
        )
        best = max(best, -float(res.fun))

    return best


def _sqrt_factors(potential: SampledPotential):
    """Split V = V^{1/2} |V|^{1/2} with sgn V = V/|V| and 0 at zeros."""
    modulus = np.abs(potential.values)
    root = np.sqrt(modulus)
    phase = np.zeros_like(potential.values)
    nz = modulus > 0
    phase[nz] = potential.values[nz] / modulus[nz]
    sw = np.sqrt(potential.weights)
    return sw * phase * root, root * sw


def assemble(potential: SampledPotential, mu: complex, bc: BoundaryCondition) -> BSMatrix:
    """
    Nystrom discretization of the Birman-Schwinger operator.

    Args:
        potential: Sampled potential
        mu: Spectral parameter with Re sqrt(mu) > 0
        bc: Boundary condition

    Returns:
        BSMatrix with symmetric sqrt(w) weighting
    """
    s = decaying_root(mu, "assemble")
    _check_nodes(potential.nodes, bc, "assemble")

    left, right = _sqrt_factors(potential)
    x = potential.nodes
    K = _kernel(x[:, None], x[None, :], s, bc)
    entries = left[:, None] * K * right[None, :]
    return BSMatrix(entries=entries, mu=complex(mu), bc=bc)


def operator_norm(matrix: BSMatrix, tol: float = POWER_TOL,
                  max_iter: int = POWER_MAX_ITER, seed: int = POWER_SEED) -> float:
    """
    Largest singular value by power iteration on A^H A.

    The iteration stops once v is an eigenvector of A^H A to relative
    accuracy tol, i.e. ||A^H A v|| and the Rayleigh quotient v^H A^H A v
    agree. A clustered top of the spectrum can keep that from happening
    within max_iter; the dense singular values are used then.

    Args:
        matrix: The Birman-Schwinger matrix
        tol: Relative gap between ||A^H A v|| and the Rayleigh quotient
        max_iter: Iteration cap
        seed: Seed of the random start vector

    Returns:
        ||A||_2
    """
    A = matrix.entries
    if not np.all(np.isfinite(A)):
        raise DomainError("operator_norm", "matrix has non-finite entries")
    if not np.any(A):
        return 0.0

    rng = np.random.default_rng(seed)
    n = A.shape[1]
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    AH = A.conj().T

    residual = math.inf
    for iteration in range(1, int(max_iter) + 1):
        w = AH @ (A @ v)
        rho = float(np.real(np.vdot(v, w)))
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0:
            return 0.0
        # ||w|| >= rho for unit v, with equality on eigenvectors
        residual = (norm_w - rho) / norm_w
        if residual <= tol:
            logger.debug("power iteration converged", extra={"iterations": iteration})
            return math.sqrt(max(rho, 0.0))
        v = w / norm_w

    logger.warning(
        "power iteration hit its cap; using dense singular values",
        extra={"iterations": int(max_iter), "residual": residual, "size": n},
    )
    try:
        return float(scipy.linalg.svdvals(A, check_finite=False)[0])
    except np.linalg.LinAlgError:
        raise ConvergenceError("power iteration", int(max_iter), residual=residual)


def _bound_factor(mu: complex, bc: BoundaryCondition) -> float:
    if bc.kind is BoundaryKind.DIRICHLET:
        return dirichlet_kernel_sup(mu)
    if bc.kind is BoundaryKind.WHOLE_LINE:
        return 1.0
    return robin_sup_factor(mu, bc.robin_sigma)


def verify_norm_bound(potential: SampledPotential, mu: complex,
                      bc: BoundaryCondition, tol: float = POWER_TOL,
                      max_iter: int = POWER_MAX_ITER) -> NormBoundReport:
    """
    Check ||A|| <= ||V||_1 * sup-factor / (2 sqrt|mu|).

    Args:
        potential: Sampled potential
        mu: Spectral parameter with Re sqrt(mu) > 0
        bc: Boundary condition
        tol: Power-iteration tolerance
        max_iter: Power-iteration cap

    Returns:
        NormBoundReport
    """
    norm = operator_norm(assemble(potential, mu, bc), tol=tol, max_iter=max_iter)
    rhs = potential.l1_norm * _bound_factor(mu, bc) / (2.0 * math.sqrt(abs(mu)))
    ok = norm <= rhs * (1.0 + NORM_REL_SLACK) + QUADRATURE_ALLOWANCE
    logger.debug("norm bound checked", extra={"norm": norm, "rhs": rhs, "ok": ok})
    return NormBoundReport(norm=norm, rhs=rhs, ok=ok)


def eigenvalue_certificate(potential: SampledPotential, lam: complex,
                           bc: BoundaryCondition) -> float:
    """
    Distance from 1 to the Birman-Schwinger spectrum at mu = -lambda.

    Args:
        potential: Sampled potential
        lam: Candidate eigenvalue off [0, inf)
        bc: Boundary condition

    Returns:
        min |nu - 1| over eigenvalues nu; small values certify lambda
    """
    matrix = assemble(potential, -complex(lam), bc)
    A = matrix.entries
    if not np.any(A):
        return 1.0

    n = A.shape[0]
    if n > DENSE_CERTIFICATE_SIZE:
        # shift-invert around 1 returns the eigenvalue nearest to it
        try:
            nu = eigs(A, k=1, sigma=1.0, v0=np.ones(n, dtype=complex), return_eigenvectors=False)
            return float(abs(nu[0] - 1.0))
        except (ArpackNoConvergence, RuntimeError, ValueError) as e:
            logger.debug("shift-invert eigensolver failed; using dense spectrum",
                          extra={"reason": str(e), "size": n})

    try:
        nus = scipy.linalg.eigvals(A, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(f"dense eigensolver ({e})", 0)
    return float(np.min(np.abs(nus - 1.0)))
