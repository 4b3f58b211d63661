"""
Shooting eigensolver for -psi'' - V psi = lambda psi with decaying complex V.

The decaying solution is started at x = L from the free asymptotics
psi = e^{-sL}, psi' = -s e^{-sL} (s = sqrt(-lambda), Re s > 0) and integrated
inward to x = 0 with an embedded Runge-Kutta method. A boundary functional of
the result (the "miss") vanishes exactly at eigenvalues; Newton iteration on
the miss from a lattice of seeds finds them. Every eigenvalue found can be
audited against the enclosure region and the Birman-Schwinger certificate.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple
import cmath
import logging
import math

import numpy as np
from scipy.integrate import quad, solve_ivp

from src.core.errors import AuditFailure, DomainError, IntegrationError
from src.core.logging import get_logger, log_structured
from src.core.types import (
    BoundaryCondition,
    BoundaryKind,
    SpectralPoint,
    decaying_root,
    lambda_distance_to_positive_axis,
)
from src.spectral import region
from src.spectral.birman_schwinger import SampledPotential, eigenvalue_certificate


logger = get_logger("shooting")

# log-growth allowed across one integration segment before renormalising
SEGMENT_GROWTH = 40.0
FEATURE_SPAN = 10.0
POSITIVE_AXIS_REJECT = 1e-6
AUDIT_MARGIN_TOL = 1e-6
AUDIT_CERTIFICATE_TOL = 1e-3
# Newton line search: step fractions tried per round and the Armijo factor
LINE_SEARCH_STEPS = (1.0, 0.5, 0.25, 0.125, 0.0625)
ARMIJO = 0.25
# a converged Newton correction is applied when within this many fd steps
NEWTON_POLISH = 1e3
SEEDS_PER_BATCH = 16


class Domain(Enum):
    """Where a potential is defined."""
    HALFLINE = "halfline"
    WHOLE_LINE = "whole-line"


@dataclass(frozen=True)
class Feature:
    """A narrow structure of a potential the integrator must not step over."""
    center: float
    width: float


@dataclass
class PotentialFn:
    """
    A decaying potential given as a vectorised function.

    Attributes:
        evaluate: Map from positions to complex V(x)
        support_radius: L; |V| is negligible beyond L (beyond [-L, L] on the whole line)
        domain: Halfline or whole line
        name: Family name for reports
        features: Narrow bumps needing small steps and refined sampling
        tail_bound: Bound on int_{|x|>L} |V|
        scalar: Optional fast V(x) for a single float, used by the integrator
    """
    evaluate: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    domain: Domain = Domain.HALFLINE
    name: str = "custom"
    features: Tuple[Feature, ...] = ()
    tail_bound: float = 0.0
    scalar: Optional[Callable[[float], complex]] = field(default=None, repr=False, compare=False)
    _l1_cache: Optional[float] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.support_radius > 0:
            raise DomainError("PotentialFn", "support radius must be positive",
                              support_radius=self.support_radius)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.evaluate(np.asarray(x, dtype=float)), dtype=complex)

    def at(self, x: float) -> complex:
        """V at one position."""
        if self.scalar is not None:
            return complex(self.scalar(x))
        return complex(self.evaluate(np.array([x], dtype=float))[0])

    @property
    def lower(self) -> float:
        return -self.support_radius if self.domain is Domain.WHOLE_LINE else 0.0

    def l1_norm(self, tol: float = 1e-10) -> float:
        """int |V| over the support by adaptive quadrature, split at features."""
        if self._l1_cache is not None:
            return self._l1_cache

        breaks = {self.lower, self.support_radius}
        for feat in self.features:
            for p in (feat.center - FEATURE_SPAN * feat.width, feat.center,
                      feat.center + FEATURE_SPAN * feat.width):
                if self.lower < p < self.support_radius:
                    breaks.add(p)
        edges = sorted(breaks)

        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            value, _ = quad(lambda x: float(np.abs(self(np.array([x]))[0])), a, b,
                            epsabs=tol, epsrel=tol, limit=500)
            total += value
        self._l1_cache = total
        return total

    def sample(self, n: int = 600, feature_points: int = 161) -> SampledPotential:
        """
        Trapezoid sampling on the support with local refinement around features.

        Args:
            n: Uniform nodes over the support
            feature_points: Extra nodes across each feature (+-10 widths)

        Returns:
            SampledPotential
        """
        grids = [np.linspace(self.lower, self.support_radius, n)]
        for feat in self.features:
            lo = max(self.lower, feat.center - FEATURE_SPAN * feat.width)
            hi = min(self.support_radius, feat.center + FEATURE_SPAN * feat.width)
            if hi > lo:
                grids.append(np.linspace(lo, hi, feature_points))
        nodes = np.unique(np.concatenate(grids))
        return SampledPotential.trapezoid(nodes, self(nodes))

    def even_extension(self) -> "PotentialFn":
        """V(|x|) on the whole line."""
        if self.domain is Domain.WHOLE_LINE:
            return self
        mirrored = tuple(Feature(-f.center, f.width) for f in self.features)
        return PotentialFn(
            evaluate=lambda x: self.evaluate(np.abs(x)),
            support_radius=self.support_radius,
            domain=Domain.WHOLE_LINE,
            name=f"{self.name}(|x|)",
            features=self.features + mirrored,
            tail_bound=2.0 * self.tail_bound,
            scalar=lambda x: self.at(abs(x)),
        )

    def reflected(self) -> "PotentialFn":
        """x -> V(-x), used to integrate the left half of a whole-line problem."""
        return PotentialFn(
            evaluate=lambda x: self.evaluate(-x),
            support_radius=self.support_radius,
            domain=self.domain,
            name=f"{self.name}(-x)",
            features=tuple(Feature(-f.center, f.width) for f in self.features),
            tail_bound=self.tail_bound,
            scalar=lambda x: self.at(-x),
        )


@dataclass(frozen=True)
class ShootingConfig:
    """Tolerances of the shooting solver."""
    rtol: float = 1e-10
    atol: float = 1e-12
    method: str = "DOP853"
    newton_tol: float = 1e-10
    max_newton: int = 50
    fd_step: float = 1e-7
    dedup_tol: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        for key in ("rtol", "atol", "newton_tol", "fd_step", "dedup_tol"):
            if not getattr(self, key) > 0:
                raise DomainError("ShootingConfig", f"{key} must be positive",
                                  value=getattr(self, key))
        if self.max_newton < 1 or self.threads < 1:
            raise DomainError("ShootingConfig", "max_newton and threads must be >= 1")

    @classmethod
    def from_config(cls, section: Dict[str, Any], threads: int = 1) -> "ShootingConfig":
        """Build from the ``shooting`` section of the loaded configuration."""
        known = {k: section[k] for k in
                 ("rtol", "atol", "method", "newton_tol", "max_newton", "fd_step", "dedup_tol")
                 if k in section}
        return cls(threads=threads, **known)


@dataclass(frozen=True)
class BoundaryData:
    """
    Decaying solution at x = 0, up to a tracked scale.

    The true boundary values are (psi0, dpsi0) * exp(log_scale) for the
    solution normalised as psi(L) = e^{-sL}.
    """
    psi0: complex
    dpsi0: complex
    log_scale: complex
    renormalizations: int = 0


@dataclass
class EigenSearchResult:
    """Eigenvalues found from a seed lattice, plus the seeds that failed."""
    eigenvalues: List[complex]
    failed_seeds: List[complex] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)


@dataclass(frozen=True)
class AuditEntry:
    lam: complex
    margin: float
    certificate: float
    self_adjoint_margin: Optional[float] = None

    @property
    def passed(self) -> bool:
        ok = self.margin >= -AUDIT_MARGIN_TOL and self.certificate <= AUDIT_CERTIFICATE_TOL
        if self.self_adjoint_margin is not None:
            ok = ok and self.self_adjoint_margin >= -AUDIT_MARGIN_TOL
        return ok


@dataclass
class AuditReport:
    """Enclosure audit of one potential."""
    potential: str
    bc: BoundaryCondition
    v_norm: float
    entries: List[AuditEntry]
    failed_seeds: int = 0

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def first_failure(self) -> Optional[AuditEntry]:
        return next((e for e in self.entries if not e.passed), None)

    def raise_for_failure(self):
        entry = self.first_failure()
        if entry is not None:
            raise AuditFailure(entry.lam, entry.margin, entry.certificate)


# ---------------------------------------------------------------------------
# potential families
# ---------------------------------------------------------------------------

def zero_potential(support_radius: float = 1.0, domain: Domain = Domain.HALFLINE) -> PotentialFn:
    return PotentialFn(
        evaluate=lambda x: np.zeros(np.shape(x), dtype=complex),
        support_radius=support_radius,
        domain=domain,
        name="zero",
        scalar=lambda x: 0j,
    )


def gaussian_bumps(centers: Sequence[float], widths: Sequence[float],
                   amplitudes: Sequence[complex], support_radius: Optional[float] = None,
                   domain: Domain = Domain.HALFLINE, name: str = "gaussian-bumps") -> PotentialFn:
    """
    Sum of a_j exp(-(x - x_j)^2 / (2 w_j^2)).

    Args:
        centers: Bump centres x_j
        widths: Standard deviations w_j > 0
        amplitudes: Complex peak values a_j
        support_radius: L; defaults to max(x_j + 10 w_j)

    Returns:
        PotentialFn
    """
    c = np.asarray(centers, dtype=float)
    w = np.asarray(widths, dtype=float)
    a = np.asarray(amplitudes, dtype=complex)
    if not (c.shape == w.shape == a.shape):
        raise DomainError("gaussian_bumps", "centers, widths and amplitudes must match")
    if np.any(w <= 0):
        raise DomainError("gaussian_bumps", "widths must be positive")

    if support_radius is None:
        support_radius = float(np.max(np.abs(c) + FEATURE_SPAN * w)) if c.size else 1.0

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for cj, wj, aj in zip(c, w, a):
            out += aj * np.exp(-0.5 * ((x - cj) / wj) ** 2)
        return out

    bumps = [(float(cj), float(wj), complex(aj)) for cj, wj, aj in zip(c, w, a)]

    def at(x):
        total = 0j
        for cj, wj, aj in bumps:
            t = (x - cj) / wj
            total += aj * math.exp(-0.5 * t * t)
        return total

    narrow = tuple(Feature(float(cj), float(wj)) for cj, wj in zip(c, w)
                   if wj < 0.05 * support_radius)
    return PotentialFn(evaluate=evaluate, support_radius=support_radius, domain=domain,
                       name=name, features=narrow, scalar=at)


def mollified_delta(c: complex, b: float, width: float,
                    support_radius: Optional[float] = None) -> PotentialFn:
    """
    Gaussian of total mass c centred at b approximating c delta(x - b).

    Args:
        c: Mass (complex)
        b: Centre, b >= FEATURE_SPAN * width on the halfline
        width: Standard deviation
        support_radius: L; defaults to b + max(10, 10 width)
    """
    if not width > 0:
        raise DomainError("mollified_delta", "requires width > 0", width=width)
    if b < FEATURE_SPAN * width:
        raise DomainError("mollified_delta", "bump must sit inside the halfline", b=b, width=width)
    peak = complex(c) / (width * math.sqrt(2.0 * math.pi))
    L = support_radius if support_radius is not None else b + max(10.0, FEATURE_SPAN * width)
    pot = gaussian_bumps([b], [width], [peak], support_radius=L, name="mollified-delta")
    pot.features = (Feature(b, width),)
    return pot


def sech2_potential(alpha: complex, support_radius: Optional[float] = None) -> PotentialFn:
    """
    V(x) = alpha(alpha+1)/cosh^2 x on the whole line.

    With Re alpha > 0, lambda = -alpha^2 is an eigenvalue with eigenfunction
    (cosh x)^{-alpha}. The default L makes sech^2 L <= 1e-14.
    """
    alpha = complex(alpha)
    coupling = alpha * (alpha + 1.0)
    L = support_radius if support_radius is not None else 18.0
    tail = 2.0 * abs(coupling) * 2.0 * math.exp(-2.0 * L)
    return PotentialFn(
        evaluate=lambda x: coupling / np.cosh(np.asarray(x, dtype=float)) ** 2,
        support_radius=L,
        domain=Domain.WHOLE_LINE,
        name=f"sech2(alpha={alpha})",
        tail_bound=tail,
        scalar=lambda x: coupling / math.cosh(x) ** 2,
    )


def sech2_eigenvalue(alpha: complex) -> complex:
    """Exact eigenvalue -alpha^2 of the sech^2 potential, Re alpha > 0."""
    alpha = complex(alpha)
    if not alpha.real > 0:
        raise DomainError("sech2_eigenvalue", "requires Re alpha > 0", alpha=alpha)
    return -alpha * alpha


def from_samples(samples: SampledPotential, domain: Domain = Domain.HALFLINE,
                 name: str = "csv") -> PotentialFn:
    """Piecewise-linear interpolation of sampled values, zero outside the grid."""
    x = samples.nodes.copy()
    re = samples.values.real.copy()
    im = samples.values.imag.copy()

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        return np.interp(t, x, re, left=0.0, right=0.0) + 1j * np.interp(t, x, im, left=0.0, right=0.0)

    if domain is Domain.HALFLINE and x[0] < 0:
        raise DomainError("from_samples", "halfline samples need x >= 0")
    L = float(max(abs(x[0]), abs(x[-1])))
    return PotentialFn(evaluate=evaluate, support_radius=L, domain=domain, name=name)


@dataclass(frozen=True)
class RandomPotentialSpec:
    """Parameters of a random Gaussian-bump potential."""
    n_bumps: int = 3
    amplitude_scale: float = 1.0
    support: float = 5.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_bumps < 0 or not self.support > 0 or not self.amplitude_scale >= 0:
            raise DomainError("RandomPotentialSpec", "n_bumps >= 0, support > 0, amplitude_scale >= 0")


def random_potential(spec: RandomPotentialSpec, domain: Domain = Domain.HALFLINE) -> PotentialFn:
    """
    Sum of Gaussian bumps with complex amplitudes and random centres/widths in [0, L].

    Deterministic for a fixed rng_seed; amplitudes scale linearly with
    amplitude_scale so the L1 norm does too.
    """
    if spec.n_bumps == 0:
        return zero_potential(spec.support, domain)

    rng = np.random.default_rng(spec.rng_seed)
    L = spec.support
    widths = rng.uniform(0.04 * L, 0.15 * L, spec.n_bumps)
    centers = rng.uniform(0.0, L, spec.n_bumps)
    if domain is Domain.HALFLINE:
        # keep every bump inside the halfline so the sampled norm is exact
        centers = np.clip(centers, 4.0 * widths, None)
    amplitudes = spec.amplitude_scale * (rng.standard_normal(spec.n_bumps)
                                         + 1j * rng.standard_normal(spec.n_bumps)) / math.sqrt(2.0)
    support = float(np.max(np.abs(centers) + 8.0 * widths))
    return gaussian_bumps(centers, widths, amplitudes, support_radius=support, domain=domain,
                          name=f"gaussian-bumps(seed={spec.rng_seed})")


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def _segments(potential: PotentialFn, s: np.ndarray) -> List[Tuple[float, float, float]]:
    """Integration pieces (start, stop, max_step) running from L down to 0."""
    L = potential.support_radius
    cuts = {0.0, L}
    fine: List[Tuple[float, float, float]] = []
    for feat in potential.features:
        lo = max(0.0, feat.center - FEATURE_SPAN * feat.width)
        hi = min(L, feat.center + FEATURE_SPAN * feat.width)
        if hi > lo:
            cuts.update((lo, hi))
            fine.append((lo, hi, 0.5 * feat.width))

    v_max = float(np.max(np.abs(potential(np.linspace(0.0, L, 512)))))
    rate = float(np.max(np.abs(s.real))) + math.sqrt(v_max + float(np.max(np.abs(s))) ** 2)
    n_growth = max(1, int(math.ceil(rate * L / SEGMENT_GROWTH)))
    cuts.update(np.linspace(0.0, L, n_growth + 1).tolist())

    edges = sorted(cuts, reverse=True)
    pieces = []
    for start, stop in zip(edges[:-1], edges[1:]):
        max_step = np.inf
        for lo, hi, step in fine:
            if lo <= stop and start <= hi:
                max_step = min(max_step, step)
        pieces.append((start, stop, max_step))
    return pieces


def _integrate_batch(potential: PotentialFn, lams: np.ndarray,
                     config: ShootingConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """
    Decaying solutions for many lambda in one solve_ivp system.

    The state holds psi for every lambda followed by psi'. Each column is
    rescaled to unit size after every segment and the factor moved into its
    complex log scale, so psi * exp(log_scale) stays the solution with
    psi(L) = e^{-sL}.

    Returns:
        (psi0, dpsi0, log_scale, segments)
    """
    lams = np.asarray(lams, dtype=complex)
    m = lams.size
    s = np.sqrt(-lams)
    L = potential.support_radius
    at = potential.at

    def rhs(x, y):
        return np.concatenate((y[m:], -(at(x) + lams) * y[:m]))

    y = np.concatenate((np.ones(m, dtype=complex), -s))
    log_scale = -s * L
    pieces = _segments(potential, s)

    for start, stop, max_step in pieces:
        sol = solve_ivp(rhs, (start, stop), y, method=config.method,
                        rtol=config.rtol, atol=config.atol, max_step=max_step)
        if not sol.success:
            raise IntegrationError(sol.message, x=float(sol.t[-1]) if sol.t.size else start,
                                   lam=complex(lams[0]))
        y = sol.y[:, -1]
        if not np.all(np.isfinite(y)):
            raise IntegrationError("overflow despite renormalization", x=stop, lam=complex(lams[0]))

        size = np.maximum(np.abs(y[:m]), np.abs(y[m:]))
        if np.any(size == 0):
            raise IntegrationError("solution collapsed to zero", x=stop, lam=complex(lams[0]))
        y = y / np.concatenate((size, size))
        log_scale = log_scale + np.log(size)

    return y[:m].copy(), y[m:].copy(), log_scale, len(pieces)


def integrate_inward(potential: PotentialFn, lam: complex,
                     config: Optional[ShootingConfig] = None) -> BoundaryData:
    """
    Integrate the decaying solution from x = L to x = 0.

    Args:
        potential: Potential; only x in [0, L] is used
        lam: Spectral parameter off [0, inf)
        config: Solver tolerances

    Returns:
        BoundaryData at x = 0
    """
    config = config or ShootingConfig()
    lam = complex(lam)
    decaying_root(-lam, "integrate_inward")
    psi, dpsi, log_scale, segments = _integrate_batch(potential, np.array([lam]), config)
    return BoundaryData(psi0=complex(psi[0]), dpsi0=complex(dpsi[0]),
                        log_scale=complex(log_scale[0]), renormalizations=segments)


def _miss_parts(potential: PotentialFn, lams: np.ndarray, bc: BoundaryCondition,
                config: ShootingConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Miss at each lambda as mantissa and complex log scale."""
    lams = np.asarray(lams, dtype=complex)
    s = np.sqrt(-lams)

    if bc.kind is BoundaryKind.WHOLE_LINE:
        if potential.domain is not Domain.WHOLE_LINE:
            raise DomainError("miss", "whole-line problems need a whole-line potential; "
                                      "use even_extension() for V(|x|)")
        psi_r, dpsi_r, log_r, _ = _integrate_batch(potential, lams, config)
        psi_l, dpsi_l, log_l, _ = _integrate_batch(potential.reflected(), lams, config)
        # psi_-(x) = phi(-x) so psi_-'(0) = -phi'(0)
        wronskian = psi_r * (-dpsi_l) - dpsi_r * psi_l
        return wronskian / (2.0 * s), log_r + log_l

    psi, dpsi, log_scale, _ = _integrate_batch(potential, lams, config)
    if bc.kind is BoundaryKind.DIRICHLET:
        return psi, log_scale
    sigma = bc.robin_sigma
    return (dpsi - sigma * psi) / (-(s + sigma)), log_scale


def _log_modulus(mant: complex, log_scale: complex) -> float:
    if mant == 0:
        return -math.inf
    return math.log(abs(mant)) + log_scale.real


def miss(potential: PotentialFn, lam: complex, bc: BoundaryCondition,
         config: Optional[ShootingConfig] = None) -> complex:
    """
    Boundary functional of the decaying solution; zero exactly at eigenvalues.

    Dirichlet: psi(0); Neumann/Robin: (psi'(0) - sigma psi(0)) / -(s + sigma);
    whole line: the Wronskian at 0 of the solutions decaying at +L and -L,
    divided by 2s. The decaying solutions are normalised as e^{-s|x|} at
    |x| = L, so the miss is holomorphic in lambda off [0, inf) and equals 1
    for V = 0.

    Args:
        potential: Potential
        lam: Spectral parameter off [0, inf)
        bc: Boundary condition
        config: Solver tolerances

    Returns:
        The miss; infinite when it overflows a float
    """
    config = config or ShootingConfig()
    lam = complex(lam)
    decaying_root(-lam, "miss")
    mant, log_scale = _miss_parts(potential, np.array([lam]), bc, config)
    mant0, log0 = complex(mant[0]), complex(log_scale[0])
    if mant0 == 0:
        return 0j
    try:
        return cmath.exp(cmath.log(mant0) + log0)
    except OverflowError:
        return complex(math.inf, 0.0)


# ---------------------------------------------------------------------------
# eigenvalue search
# ---------------------------------------------------------------------------

def default_seed_grid(v_norm: float, angles: int = 16) -> List[complex]:
    """
    Log-polar lattice in mu = -lambda: |mu| in {0.01, 0.1, 1, 10} ||V||^2,
    arg mu at ``angles`` interior angles of (-pi, pi).
    """
    if v_norm <= 0:
        return []
    seeds = []
    for scale in (0.01, 0.1, 1.0, 10.0):
        r = scale * v_norm ** 2
        for k in range(angles):
            phi = -math.pi + 2.0 * math.pi * (k + 0.5) / angles
            seeds.append(-r * cmath.exp(1j * phi))
    return seeds


def _admissible(lam: complex) -> bool:
    if not (math.isfinite(lam.real) and math.isfinite(lam.imag)):
        return False
    if lambda_distance_to_positive_axis(lam) < POSITIVE_AXIS_REJECT * (1.0 + abs(lam)):
        return False
    return cmath.sqrt(-lam).real > 0


@dataclass
class _Iterate:
    """Newton state of one seed; the miss is mant * exp(log_scale)."""
    seed: complex
    lam: complex
    mant: complex = 0j
    log_scale: complex = 0j
    slope: complex = 0j
    steps: int = 0
    started: bool = False
    root: Optional[complex] = None
    active: bool = True
    # candidate lambdas with their fraction of the Newton step
    trials: List[Tuple[complex, float]] = field(default_factory=list)

    @property
    def log_modulus(self) -> float:
        return _log_modulus(self.mant, self.log_scale)


class _NewtonBatch:
    """
    Damped Newton iteration for a chunk of seeds.

    Every round integrates, in one system, each live seed's candidate points
    together with their finite-difference neighbours. A seed accepts the
    longest candidate step that lowers |miss| by the Armijo fraction and
    fails when none does, when it leaves the admissible region, or after
    max_newton steps.
    """

    def __init__(self, potential: PotentialFn, bc: BoundaryCondition,
                 config: ShootingConfig, escape_radius: float):
        self.potential = potential
        self.bc = bc
        self.config = config
        self.escape_radius = escape_radius
        self.noise_floor = math.log(config.newton_tol)

    def _h(self, lam: complex) -> float:
        return self.config.fd_step * (1.0 + abs(lam))

    def _settle_tol(self, lam: complex) -> float:
        return NEWTON_POLISH * self.config.newton_tol * (1.0 + abs(lam))

    def _usable(self, lam: complex) -> bool:
        h = self._h(lam)
        return (_admissible(lam) and abs(lam) <= self.escape_radius
                and _admissible(lam + h) and _admissible(lam - h))

    def _evaluate(self, iterates: List[_Iterate]) -> List[Optional[Tuple[np.ndarray, np.ndarray]]]:
        """Miss at every trial point and its neighbours, grouped per iterate."""
        points = []
        for it in iterates:
            for lam, _ in it.trials:
                h = self._h(lam)
                points.extend((lam, lam + h, lam - h))
        try:
            mant, log_scale = _miss_parts(self.potential, np.array(points), self.bc, self.config)
        except IntegrationError:
            if len(iterates) == 1:
                return [None]
            return [part for it in iterates for part in self._evaluate([it])]

        parts, k = [], 0
        for it in iterates:
            n = 3 * len(it.trials)
            parts.append((mant[k:k + n], log_scale[k:k + n]))
            k += n
        return parts

    def _accept(self, it: _Iterate, mant: np.ndarray, log_scale: np.ndarray) -> bool:
        base = it.log_modulus if it.started else math.inf
        for j, (lam, fraction) in enumerate(it.trials):
            m0, l0 = complex(mant[3 * j]), complex(log_scale[3 * j])
            mp, lp = complex(mant[3 * j + 1]), complex(log_scale[3 * j + 1])
            mm, lm = complex(mant[3 * j + 2]), complex(log_scale[3 * j + 2])
            if not all(cmath.isfinite(z) for z in (m0, l0, mp, lp, mm, lm)):
                continue
            level = _log_modulus(m0, l0)
            if math.isfinite(base) and not level <= base + math.log1p(-ARMIJO * fraction):
                continue
            try:
                slope = (mp * cmath.exp(lp - l0) - mm * cmath.exp(lm - l0)) / (2.0 * self._h(lam))
            except OverflowError:
                continue
            it.lam, it.mant, it.log_scale, it.slope = lam, m0, l0, slope
            return True
        return False

    def _plan(self, it: _Iterate):
        """Check convergence at the current point, else queue the next trials."""
        it.trials = []
        if it.slope == 0 or not cmath.isfinite(it.slope):
            it.active = False
            return

        step = it.mant / it.slope
        scale = 1.0 + abs(it.lam)
        if it.log_modulus <= self.noise_floor or abs(step) <= self.config.newton_tol * scale:
            refined = it.lam - step
            it.root = refined if _admissible(refined) and abs(step) <= NEWTON_POLISH * self._h(it.lam) else it.lam
            it.active = False
            return
        if it.steps >= self.config.max_newton:
            it.active = False
            return

        limit = 0.5 * scale
        fraction = 1.0
        if abs(step) > limit:
            fraction = limit / abs(step)
            step *= fraction
        for t in LINE_SEARCH_STEPS:
            lam = it.lam - t * step
            if self._usable(lam):
                it.trials.append((lam, t * fraction))
        if not it.trials:
            it.active = False

    def run(self, seeds: Sequence[complex]) -> List[Optional[complex]]:
        iterates = [_Iterate(seed=z, lam=z) for z in seeds]
        for it in iterates:
            if self._usable(it.lam):
                it.trials = [(it.lam, 0.0)]
            else:
                it.active = False

        while True:
            live = [it for it in iterates if it.active]
            if not live:
                break
            for it, part in zip(live, self._evaluate(live)):
                if part is None or not self._accept(it, *part):
                    # no trial lowered |miss|: settle only when already at the noise floor
                    if it.started and abs(it.mant / it.slope) <= self._settle_tol(it.lam):
                        it.root = it.lam
                    it.active = False
                    continue
                if it.started:
                    it.steps += 1
                it.started = True
                self._plan(it)

        return [it.root for it in iterates]


def find_eigenvalues(potential: PotentialFn, bc: BoundaryCondition,
                     seed_grid: Optional[Sequence[complex]] = None,
                     config: Optional[ShootingConfig] = None) -> EigenSearchResult:
    """
    Eigenvalues of -d^2/dx^2 - V by damped Newton iteration on the miss.

    Seeds are split into fixed chunks of SEEDS_PER_BATCH, which run on
    ``config.threads`` workers; the result does not depend on the thread
    count.

    Args:
        potential: Potential
        bc: Boundary condition
        seed_grid: Starting points off [0, inf); default_seed_grid when omitted
        config: Solver tolerances and thread count

    Returns:
        EigenSearchResult with deduplicated eigenvalues sorted by (re, im)
    """
    config = config or ShootingConfig()
    v_norm = potential.l1_norm()
    if seed_grid is None:
        seed_grid = default_seed_grid(v_norm)
    seeds = [complex(z) for z in seed_grid]
    if not seeds:
        return EigenSearchResult(eigenvalues=[])

    # no eigenvalue lies outside the uniform radius; iterates far beyond it are lost
    escape = 4.0 * max(region.uniform_radius(v_norm, bc), max(abs(z) for z in seeds)) + 1.0
    solver = _NewtonBatch(potential, bc, config, escape)
    chunks = [seeds[i:i + SEEDS_PER_BATCH] for i in range(0, len(seeds), SEEDS_PER_BATCH)]

    if config.threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            parts = list(pool.map(solver.run, chunks))
    else:
        parts = [solver.run(chunk) for chunk in chunks]
    results = [root for part in parts for root in part]

    found: List[complex] = []
    failed: List[complex] = []
    for seed, root in zip(seeds, results):
        if root is None:
            failed.append(seed)
            continue
        if all(abs(root - r) > config.dedup_tol * (1.0 + abs(root)) for r in found):
            found.append(root)

    found.sort(key=lambda z: (z.real, z.imag))
    log_structured(logger, logging.INFO if found else logging.DEBUG, "eigenvalue search finished",
                   potential=potential.name, found=len(found), failed=len(failed),
                   seeds=len(seeds))
    return EigenSearchResult(eigenvalues=found, failed_seeds=failed)


def enclosure_audit(potential: PotentialFn, bc: BoundaryCondition,
                    seed_grid: Optional[Sequence[complex]] = None,
                    config: Optional[ShootingConfig] = None,
                    nodes: int = 600) -> AuditReport:
    """
    Find eigenvalues and check each against the enclosure region and the
    Birman-Schwinger certificate.

    Args:
        potential: Potential
        bc: Boundary condition
        seed_grid: Seeds for find_eigenvalues
        config: Solver configuration
        nodes: Uniform nodes of the sampled potential for certificates

    Returns:
        AuditReport; passed iff every margin >= -1e-6 and certificate <= 1e-3
    """
    result = find_eigenvalues(potential, bc, seed_grid, config)
    v_norm = potential.l1_norm()
    samples = potential.sample(nodes) if result.eigenvalues else None
    real_valued = samples is not None and bool(np.all(np.abs(samples.values.imag) == 0))

    entries = []
    for lam in result.eigenvalues:
        margin = region.contains(SpectralPoint(lam), v_norm, bc).margin
        certificate = eigenvalue_certificate(samples, lam, bc)
        sa_margin = None
        if real_valued and bc.kind is BoundaryKind.DIRICHLET and lam.real < 0 and abs(lam.imag) <= 1e-8 * abs(lam):
            sa_margin = region.self_adjoint_radius(v_norm) - abs(lam)
        entries.append(AuditEntry(lam=lam, margin=margin, certificate=certificate,
                                  self_adjoint_margin=sa_margin))

    report = AuditReport(potential=potential.name, bc=bc, v_norm=v_norm,
                         entries=entries, failed_seeds=len(result.failed_seeds))
    if not report.passed:
        bad = report.first_failure()
        logger.warning(
            "enclosure audit failed",
            extra={"potential": potential.name, "bc": bc.label(),
                   "margin": bad.margin, "certificate": bad.certificate},
        )
    return report
