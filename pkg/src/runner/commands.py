"""
Runner commands, one class per CLI verb.

Each command validates its parameters, calls into ``src.spectral`` and
returns a CommandOutput whose table the CLI writes as CSV or JSON.
"""

import dataclasses
import math
from typing import Dict, List, Literal, Optional, Tuple, Type

import numpy as np
from pydantic import Field

from src.core.errors import ScenarioValidationError
from src.core.logging import get_logger
from src.core.types import BoundaryCondition, BoundaryKind, DeltaPotential, SpectralPoint
from src.runner.base import BaseCommand, CommandOutput, CommandParams, Table
from src.spectral import birman_schwinger, delta, gfun, region, shooting
from src.utils.file_utils import read_potential_csv


logger = get_logger("runner")

DEFAULT_GAMMAS = [0.75, 1.0, 1.5, 2.0, 3.0]


# ---------------------------------------------------------------------------
# parameter models
# ---------------------------------------------------------------------------

class CurveParams(CommandParams):
    n: int = Field(720, ge=2, description="Number of curve points")


class GFunParams(CommandParams):
    a: Optional[List[float]] = Field(None, description="Explicit arguments; overrides the grid")
    a_min: float = Field(1e-3, gt=0)
    a_max: float = Field(1e3, gt=0)
    points: int = Field(200, ge=1)


class ExtremalParams(CommandParams):
    m: float = Field(..., gt=0, description="L1 norm of the delta potential")
    theta: float = Field(..., gt=0, lt=2 * math.pi, description="Eigenvalue argument (radians)")


class BoundaryParams(CommandParams):
    bc: Literal["dirichlet", "neumann", "robin", "whole-line"] = "dirichlet"
    sigma: Optional[float] = Field(None, ge=0, description="Robin parameter")

    def boundary(self) -> BoundaryCondition:
        return BoundaryCondition.parse(self.bc, self.sigma)


class DeltaEigsParams(BoundaryParams):
    c_re: float
    c_im: float = 0.0
    b: float = Field(0.0, ge=0)


class PotentialParams(BoundaryParams):
    """Selects a potential family and its parameters."""
    potential: Literal["gaussian-bumps", "sech2", "mollified-delta", "zero", "csv"] = "gaussian-bumps"
    seed: int = 0
    n_bumps: int = Field(3, ge=0)
    amplitude: float = Field(1.0, ge=0)
    support: float = Field(5.0, gt=0)
    alpha_re: float = 1.0
    alpha_im: float = 0.0
    c_re: float = 1.0
    c_im: float = 0.0
    b: float = Field(1.0, ge=0)
    width: float = Field(1e-2, gt=0)
    potential_file: Optional[str] = None
    nodes: Optional[int] = Field(None, ge=2, description="Nodes of the sampled potential")


class VerifyBSParams(PotentialParams):
    mu: List[Tuple[float, float]] = Field(default_factory=lambda: [(1.0, 1.0)],
                                          description="Spectral parameters mu as (re, im)")


class ShootParams(PotentialParams):
    seeds: Optional[List[Tuple[float, float]]] = Field(
        None, description="Starting lambdas as (re, im); log-polar lattice when omitted")


class KellerParams(CommandParams):
    gamma: List[float] = Field(default_factory=lambda: list(DEFAULT_GAMMAS))


def build_potential(params: PotentialParams, bc: BoundaryCondition) -> shooting.PotentialFn:
    """
    Construct the potential a scenario names.

    Halfline families are read as whole-line potentials with the same formula
    when the boundary condition is whole-line.
    """
    domain = shooting.Domain.HALFLINE if bc.is_halfline else shooting.Domain.WHOLE_LINE
    kind = params.potential

    if kind == "sech2":
        if bc.is_halfline:
            raise ScenarioValidationError("potential", "sech2 is a whole-line potential; use --bc whole-line")
        return shooting.sech2_potential(complex(params.alpha_re, params.alpha_im))

    if kind == "csv":
        if not params.potential_file:
            raise ScenarioValidationError("potential", "csv potentials need potential_file")
        samples = read_potential_csv(params.potential_file)
        return shooting.from_samples(samples, domain=domain, name=params.potential_file)

    if kind == "zero":
        pot = shooting.zero_potential(params.support)
    elif kind == "mollified-delta":
        pot = shooting.mollified_delta(complex(params.c_re, params.c_im), params.b, params.width)
    else:
        spec = shooting.RandomPotentialSpec(
            n_bumps=params.n_bumps,
            amplitude_scale=params.amplitude,
            support=params.support,
            rng_seed=params.seed,
        )
        pot = shooting.random_potential(spec)

    if domain is shooting.Domain.WHOLE_LINE:
        pot = dataclasses.replace(pot, domain=domain)
    return pot


def _seed_list(seeds: Optional[List[Tuple[float, float]]]) -> Optional[List[complex]]:
    if seeds is None:
        return None
    return [complex(re, im) for re, im in seeds]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

class CurveCommand(BaseCommand):
    """Dirichlet enclosure curve at unit norm, plus the whole-line circle."""

    params_model = CurveParams

    def get_name(self) -> str:
        return "curve"

    def get_description(self) -> str:
        return "Sample the boundary 4|lambda| = g(cot(theta/2))^2 of the Dirichlet region"

    def execute(self, params: CurveParams) -> CommandOutput:
        header = ["theta", "radius4", "re", "im"]
        points = region.curve_sample(params.n)
        line = region.whole_line_circle(params.n)

        def rows(pts):
            return [[p.theta, p.radius4, p.z.real, p.z.imag] for p in pts]

        top = max(p.radius4 for p in points)
        return CommandOutput(
            status="success",
            content=f"{params.n} curve points, max radius4 {top:.6f}",
            table=Table(header=header, rows=rows(points)),
            companions={"_line": Table(header=header, rows=rows(line))},
            metadata={"points": params.n, "max_radius4": top},
        )


class GFunCommand(BaseCommand):
    """Tabulate g with its envelopes and large-a expansion."""

    params_model = GFunParams

    def get_name(self) -> str:
        return "gfun"

    def get_description(self) -> str:
        return "Evaluate g(a) = sup |e^{iay} - e^{-y}| on a grid"

    def execute(self, params: GFunParams) -> CommandOutput:
        if params.a is not None:
            grid = [float(a) for a in params.a]
        else:
            if params.a_max < params.a_min:
                raise ScenarioValidationError(self.get_name(), "a_max must be >= a_min")
            grid = np.geomspace(params.a_min, params.a_max, params.points).tolist()

        settings = self.config.section("gfun")
        rows = []
        for a in grid:
            res = gfun.g(a, scan_points=int(settings.get("scan_points", gfun.SCAN_POINTS)),
                         xatol=float(settings.get("xatol", gfun.XATOL)))
            lower, upper = gfun.g_envelopes(abs(a)) if a != 0 else (1.0, 1.0)
            large = gfun.g_large_a(a) if a != 0 else None
            rows.append([a, res.value, res.argmax, res.attained, lower, upper, large])

        return CommandOutput(
            status="success",
            content=f"g evaluated at {len(rows)} points",
            table=Table(header=["a", "g", "argmax", "attained", "lower", "upper", "large_a"], rows=rows),
        )


class ExtremalCommand(BaseCommand):
    """Delta potential attaining the Dirichlet bound."""

    params_model = ExtremalParams

    def get_name(self) -> str:
        return "extremal"

    def get_description(self) -> str:
        return "Construct c delta(x - b) with ||V|| = m whose eigenvalue lies on the enclosure boundary"

    def execute(self, params: ExtremalParams) -> CommandOutput:
        res = delta.extremal_delta(params.m, params.theta)
        record = {
            "m": params.m,
            "theta": params.theta,
            "c_re": res.delta.c.real,
            "c_im": res.delta.c.imag,
            "b": res.delta.b,
            "lambda_re": res.lam.real,
            "lambda_im": res.lam.imag,
            "g_value": res.g_value,
            "bs_residual": res.bs_residual,
        }
        return CommandOutput(
            status="success",
            content=f"extremal delta b={res.delta.b:.10g}, lambda={res.lam:.10g}",
            table=Table(header=list(record), rows=[list(record.values())]),
            metadata=record,
        )


class DeltaEigsCommand(BaseCommand):
    """Eigenvalues of a single delta potential."""

    params_model = DeltaEigsParams

    def get_name(self) -> str:
        return "delta-eigs"

    def get_description(self) -> str:
        return "All eigenvalues of c delta(x - b) for the chosen boundary condition"

    def execute(self, params: DeltaEigsParams) -> CommandOutput:
        bc = params.boundary()
        c = complex(params.c_re, params.c_im)

        if bc.kind is BoundaryKind.DIRICHLET:
            settings = self.config.section("roots")
            eigenvalues = delta.dirichlet_delta_eigenvalues(
                DeltaPotential(c=c, b=params.b),
                max_depth=int(settings.get("max_depth", 20)),
                edge_points=int(settings.get("edge_points", 256)),
                max_phase_step=float(settings.get("max_phase_step", 0.3)),
            )
        elif bc.kind is BoundaryKind.WHOLE_LINE:
            eigenvalues = [delta.whole_line_delta_eigenvalue(c)] if c.real > 0 else []
        else:
            if params.b != 0:
                raise ScenarioValidationError(self.get_name(), "Neumann/Robin delta models need b = 0")
            sigma = bc.robin_sigma
            eigenvalues = [delta.robin_delta_eigenvalue(c, sigma)] if (c - sigma).real > 0 else []

        rows = []
        for k, lam in enumerate(eigenvalues):
            point = SpectralPoint(lam)
            margin = region.contains(point, abs(c), bc).margin
            rows.append([k, lam.real, lam.imag, point.modulus, point.theta, margin])

        return CommandOutput(
            status="success",
            content=f"{len(rows)} eigenvalue(s) for {bc.label()}",
            table=Table(header=["index", "lambda_re", "lambda_im", "modulus", "theta", "margin"],
                        rows=rows),
            metadata={"bc": bc.label(), "l1_norm": abs(c)},
        )


class VerifyBSCommand(BaseCommand):
    """Check the Birman-Schwinger norm inequality for one potential."""

    params_model = VerifyBSParams

    def get_name(self) -> str:
        return "verify-bs"

    def get_description(self) -> str:
        return "Compare the discrete Birman-Schwinger norm with its analytic bound"

    def execute(self, params: VerifyBSParams) -> CommandOutput:
        bc = params.boundary()
        pot = build_potential(params, bc)
        settings = self.config.section("birman_schwinger")
        samples = pot.sample(params.nodes or int(settings.get("nodes", 600)))
        tol = float(settings.get("power_tol", birman_schwinger.POWER_TOL))
        max_iter = int(settings.get("power_max_iter", birman_schwinger.POWER_MAX_ITER))

        rows = []
        for re, im in params.mu:
            mu = complex(re, im)
            report = birman_schwinger.verify_norm_bound(samples, mu, bc, tol=tol, max_iter=max_iter)
            rows.append([mu.real, mu.imag, report.norm, report.rhs, report.ratio, report.ok])

        failed = sum(1 for r in rows if not r[-1])
        return CommandOutput(
            status="success" if failed == 0 else "failed",
            content=(f"norm bound holds at {len(rows)} mu value(s)" if failed == 0
                     else f"norm bound violated at {failed} of {len(rows)} mu value(s)"),
            table=Table(header=["mu_re", "mu_im", "norm", "rhs", "ratio", "ok"], rows=rows),
            metadata={"potential": pot.name, "bc": bc.label(), "l1_norm": samples.l1_norm},
        )


class ShootCommand(BaseCommand):
    """Eigenvalues of a general potential by shooting."""

    params_model = ShootParams

    def get_name(self) -> str:
        return "shoot"

    def get_description(self) -> str:
        return "Find eigenvalues by Newton iteration on the shooting miss functional"

    def execute(self, params: ShootParams) -> CommandOutput:
        bc = params.boundary()
        pot = build_potential(params, bc)
        config = shooting.ShootingConfig.from_config(self.config.section("shooting"),
                                                     threads=self.config.threads)
        result = shooting.find_eigenvalues(pot, bc, _seed_list(params.seeds), config)

        rows = []
        for lam in result.eigenvalues:
            point = SpectralPoint(lam)
            rows.append([lam.real, lam.imag, point.modulus, point.theta])

        if result.failed_seeds:
            logger.warning("some seeds did not converge",
                           extra={"failed": len(result.failed_seeds), "potential": pot.name})
        return CommandOutput(
            status="success",
            content=f"{len(rows)} eigenvalue(s) of {pot.name} ({bc.label()})",
            table=Table(header=["lambda_re", "lambda_im", "modulus", "theta"], rows=rows),
            metadata={"potential": pot.name, "bc": bc.label(), "l1_norm": pot.l1_norm(),
                      "failed_seeds": len(result.failed_seeds)},
        )


class AuditCommand(BaseCommand):
    """Enclosure audit of one potential."""

    params_model = ShootParams

    def get_name(self) -> str:
        return "audit"

    def get_description(self) -> str:
        return "Check every shooting eigenvalue against its enclosure and certificate"

    def execute(self, params: ShootParams) -> CommandOutput:
        bc = params.boundary()
        pot = build_potential(params, bc)
        config = shooting.ShootingConfig.from_config(self.config.section("shooting"),
                                                     threads=self.config.threads)
        nodes = params.nodes or int(self.config.section("birman_schwinger").get("nodes", 600))
        report = shooting.enclosure_audit(pot, bc, _seed_list(params.seeds), config, nodes=nodes)

        rows = [[e.lam.real, e.lam.imag, e.margin, e.certificate, e.passed] for e in report.entries]
        bad = report.first_failure()
        if bad is None:
            content = f"audit passed: {len(rows)} eigenvalue(s) of {pot.name} ({bc.label()})"
        else:
            content = (f"audit failed at lambda={bad.lam:.10g}: "
                       f"margin={bad.margin:.3e}, certificate={bad.certificate:.3e}")

        return CommandOutput(
            status="success" if report.passed else "failed",
            content=content,
            table=Table(header=["lambda_re", "lambda_im", "margin", "certificate", "passed"], rows=rows),
            metadata={"potential": pot.name, "bc": bc.label(), "l1_norm": report.v_norm,
                      "failed_seeds": report.failed_seeds},
        )


class KellerCommand(BaseCommand):
    """Self-adjoint Keller constant against the sech^2 family on the imaginary axis."""

    params_model = KellerParams

    def get_name(self) -> str:
        return "keller"

    def get_description(self) -> str:
        return "Compare keller_constant(gamma) with the complex sech^2 supremum"

    def execute(self, params: KellerParams) -> CommandOutput:
        rows = []
        for gamma in params.gamma:
            keller = region.keller_constant(gamma)
            sup, t_star = region.cosh_ratio_sup(gamma)
            rows.append([gamma, keller, sup, t_star, sup / keller, sup > keller])

        return CommandOutput(
            status="success",
            content=f"{sum(r[-1] for r in rows)} of {len(rows)} exponents exceed the Keller constant",
            table=Table(header=["gamma", "keller", "cosh_sup", "t_star", "ratio", "exceeds"], rows=rows),
        )


COMMAND_CLASSES: Dict[str, Type[BaseCommand]] = {
    "curve": CurveCommand,
    "gfun": GFunCommand,
    "extremal": ExtremalCommand,
    "delta-eigs": DeltaEigsCommand,
    "verify-bs": VerifyBSCommand,
    "shoot": ShootCommand,
    "audit": AuditCommand,
    "keller": KellerCommand,
}
