"""Tests for the shooting eigensolver and the enclosure audit."""

import cmath
import math
import time

import numpy as np
import pytest

from src.core.errors import AuditFailure, DomainError
from src.core.types import BoundaryCondition
from src.spectral import shooting
from src.spectral.shooting import (
    Domain,
    RandomPotentialSpec,
    ShootingConfig,
    default_seed_grid,
    enclosure_audit,
    find_eigenvalues,
    gaussian_bumps,
    integrate_inward,
    miss,
    mollified_delta,
    random_potential,
    sech2_eigenvalue,
    sech2_potential,
    zero_potential,
)


DIRICHLET = BoundaryCondition.dirichlet()
NEUMANN = BoundaryCondition.neumann()
WHOLE = BoundaryCondition.whole_line()

SECH2_ALPHAS = [0.5, 1.0, 1.5, 0.7 + 0.4j, 0.3 + 1.2j]


def deep_well():
    return gaussian_bumps([2.0], [0.5], [8.0])


class TestFreeIntegration:
    def test_decaying_exponential_recovered(self):
        rng = np.random.default_rng(0)
        pot = zero_potential(5.0)
        for _ in range(50):
            mu = rng.uniform(0.1, 10.0) * cmath.exp(1j * rng.uniform(-3.0, 3.0))
            lam = -mu
            s = cmath.sqrt(mu)
            data = integrate_inward(pot, lam)
            assert abs(data.dpsi0 / data.psi0 + s) <= 1e-8 * abs(s)
            assert abs(data.psi0 * cmath.exp(data.log_scale) - 1) <= 1e-8

    def test_positive_axis_rejected(self):
        with pytest.raises(DomainError):
            integrate_inward(zero_potential(), 2.0)

    @pytest.mark.parametrize("bc", [DIRICHLET, NEUMANN, BoundaryCondition.robin(2.0), WHOLE],
                             ids=lambda bc: bc.label())
    def test_zero_potential_miss_is_one(self, bc):
        domain = Domain.WHOLE_LINE if bc.kind is WHOLE.kind else Domain.HALFLINE
        pot = zero_potential(3.0, domain)
        for lam in [-1.0, -0.5 + 2.0j, 3.0 - 1.0j, -10.0j]:
            assert abs(miss(pot, lam, bc) - 1) <= 1e-8

    @pytest.mark.parametrize("bc", [DIRICHLET, NEUMANN, BoundaryCondition.robin(1.0)],
                             ids=lambda bc: bc.label())
    def test_miss_is_holomorphic(self, bc):
        pot = random_potential(RandomPotentialSpec(n_bumps=2, amplitude_scale=2.0, rng_seed=3))
        lam, h = -1.3 + 0.7j, 1e-3
        along_real = (miss(pot, lam + h, bc) - miss(pot, lam - h, bc)) / (2 * h)
        along_imag = (miss(pot, lam + 1j * h, bc) - miss(pot, lam - 1j * h, bc)) / (2j * h)
        assert abs(along_real - along_imag) <= 1e-4 * abs(along_real) + 1e-5

    def test_whole_line_miss_is_holomorphic(self):
        pot = sech2_potential(0.7 + 0.4j)
        lam, h = -2.0 + 1.0j, 1e-3
        along_real = (miss(pot, lam + h, WHOLE) - miss(pot, lam - h, WHOLE)) / (2 * h)
        along_imag = (miss(pot, lam + 1j * h, WHOLE) - miss(pot, lam - 1j * h, WHOLE)) / (2j * h)
        assert abs(along_real - along_imag) <= 1e-4 * abs(along_real) + 1e-5

    def test_whole_line_needs_whole_line_potential(self):
        with pytest.raises(DomainError):
            miss(deep_well(), -1.0, WHOLE)


class TestSech2:
    """The sech^2 family has the closed-form eigenvalue -alpha^2."""

    @pytest.mark.parametrize("alpha", SECH2_ALPHAS)
    def test_miss_vanishes_at_exact_eigenvalue(self, alpha):
        pot = sech2_potential(alpha)
        assert abs(miss(pot, sech2_eigenvalue(alpha), WHOLE)) <= 1e-6

    @pytest.mark.parametrize("alpha", SECH2_ALPHAS)
    def test_recovered_from_perturbed_seed(self, alpha):
        lam = sech2_eigenvalue(alpha)
        found = find_eigenvalues(sech2_potential(alpha), WHOLE, seed_grid=[lam * (1 + 0.05 + 0.03j)])
        assert len(found) == 1
        assert abs(found.eigenvalues[0] - lam) <= 1e-7 * (1 + abs(lam))

    def test_ground_state_from_far_seed(self):
        found = find_eigenvalues(sech2_potential(1.0), WHOLE, seed_grid=[-0.8])
        assert found.eigenvalues == [pytest.approx(-1.0, abs=1e-8)]

    def test_exact_eigenvalue_needs_decay(self):
        with pytest.raises(DomainError):
            sech2_eigenvalue(-0.5 + 1.0j)


class TestFindEigenvalues:
    def test_zero_potential_has_none(self):
        result = find_eigenvalues(zero_potential(), DIRICHLET)
        assert result.eigenvalues == [] and result.failed_seeds == []

    def test_zero_potential_explicit_seeds_fail(self):
        seeds = [-1.0 + 0.5j, -4.0 - 2.0j, 2.0 + 1.0j]
        result = find_eigenvalues(zero_potential(), DIRICHLET, seed_grid=seeds)
        assert result.eigenvalues == []
        assert result.failed_seeds == seeds

    def test_duplicates_merged_and_sorted(self):
        seeds = [-3.0 + 0.1j, -3.1 + 0.1j, -2.9 - 0.1j, -0.5 + 0.1j, -6.0 + 0.1j]
        result = find_eigenvalues(deep_well(), DIRICHLET, seed_grid=seeds)
        lams = result.eigenvalues
        assert len(lams) >= 1
        assert lams == sorted(lams, key=lambda z: (z.real, z.imag))
        for a, b in zip(lams, lams[1:]):
            assert abs(a - b) > 1e-6

    def test_threads_do_not_change_result(self):
        seeds = [complex(x, 0.1) for x in np.linspace(-9.0, -0.5, 2 * shooting.SEEDS_PER_BATCH + 2)]
        serial = find_eigenvalues(deep_well(), DIRICHLET, seeds, ShootingConfig(threads=1))
        pooled = find_eigenvalues(deep_well(), DIRICHLET, seeds, ShootingConfig(threads=3))
        assert serial.eigenvalues == pooled.eigenvalues
        assert serial.failed_seeds == pooled.failed_seeds

    def test_odd_extension_equivalence(self):
        seeds = [complex(x, 0.1) for x in np.linspace(-7.5, -0.5, 8)]
        halfline = find_eigenvalues(deep_well(), DIRICHLET, seed_grid=seeds)
        assert len(halfline) >= 1

        extended = deep_well().even_extension()
        for lam in halfline:
            whole = find_eigenvalues(extended, WHOLE, seed_grid=[lam + 0.01])
            assert len(whole) == 1
            assert abs(whole.eigenvalues[0] - lam) <= 1e-6 * (1 + abs(lam))

    def test_odd_extension_equivalence_random(self):
        checked = 0
        for seed in range(10):
            pot = random_potential(RandomPotentialSpec(n_bumps=2, amplitude_scale=3.0, rng_seed=seed))
            halfline = find_eigenvalues(pot, DIRICHLET, seed_grid=default_seed_grid(pot.l1_norm(), angles=8))
            extended = pot.even_extension()
            for lam in halfline:
                whole = find_eigenvalues(extended, WHOLE, seed_grid=[lam * (1 + 1e-3)])
                assert len(whole) == 1, (seed, lam)
                assert abs(whole.eigenvalues[0] - lam) <= 1e-6 * (1 + abs(lam))
                checked += 1
        assert checked >= 1

    def test_mollified_delta_converges(self, extremal_quarter):
        res = extremal_quarter
        widths = [1e-1, 1e-2, 1e-3]
        errors = []
        for w in widths:
            found = find_eigenvalues(mollified_delta(res.delta.c, res.delta.b, w), DIRICHLET,
                                     seed_grid=[res.lam])
            assert len(found) == 1
            errors.append(abs(found.eigenvalues[0] - res.lam))
        order = np.polyfit(np.log(widths), np.log(errors), 1)[0]
        assert order >= 0.8


class TestPotentialFamilies:
    def test_gaussian_l1_norm(self):
        pot = gaussian_bumps([3.0], [0.5], [2j])
        assert pot.l1_norm() == pytest.approx(2 * 0.5 * math.sqrt(2 * math.pi), rel=1e-8)

    def test_mollified_delta_mass(self):
        assert mollified_delta(1 + 1j, 1.0, 1e-2).l1_norm() == pytest.approx(math.sqrt(2), rel=1e-8)

    def test_mollified_delta_must_fit(self):
        with pytest.raises(DomainError):
            mollified_delta(1.0, 0.05, 1e-2)

    def test_random_zero_bumps(self):
        pot = random_potential(RandomPotentialSpec(n_bumps=0))
        assert pot.l1_norm() == 0.0

    def test_random_deterministic(self):
        xs = np.linspace(0.0, 5.0, 50)
        a = random_potential(RandomPotentialSpec(rng_seed=42))
        b = random_potential(RandomPotentialSpec(rng_seed=42))
        assert np.array_equal(a(xs), b(xs))
        assert a.support_radius == b.support_radius

    def test_random_amplitude_linear(self):
        one = random_potential(RandomPotentialSpec(amplitude_scale=1.0, rng_seed=9))
        two = random_potential(RandomPotentialSpec(amplitude_scale=2.0, rng_seed=9))
        assert two.l1_norm() == pytest.approx(2 * one.l1_norm(), rel=1e-8)

    def test_random_spec_validation(self):
        with pytest.raises(DomainError):
            RandomPotentialSpec(n_bumps=-1)

    def test_from_samples_interpolates(self):
        samples = deep_well().sample(200)
        pot = shooting.from_samples(samples)
        assert np.allclose(pot(samples.nodes), samples.values)
        assert pot(np.array([samples.nodes[-1] + 1.0]))[0] == 0

    def test_even_extension_doubles_norm(self):
        pot = deep_well()
        assert pot.even_extension().l1_norm() == pytest.approx(2 * pot.l1_norm(), rel=1e-8)
        assert pot.even_extension().domain is Domain.WHOLE_LINE

    @pytest.mark.parametrize("pot", [
        deep_well(),
        sech2_potential(0.3 + 1.2j),
        deep_well().even_extension(),
        sech2_potential(1.5).reflected(),
        zero_potential(),
    ], ids=["gaussian", "sech2", "even", "reflected", "zero"])
    def test_scalar_matches_vectorised(self, pot):
        for x in np.linspace(0.0, pot.support_radius, 37):
            assert pot.at(float(x)) == pytest.approx(complex(pot(np.array([x]))[0]), rel=1e-13, abs=1e-300)

    def test_support_must_be_positive(self):
        with pytest.raises(DomainError):
            shooting.PotentialFn(evaluate=np.zeros_like, support_radius=0.0)

    def test_seed_grid(self):
        seeds = default_seed_grid(2.0, angles=4)
        assert len(seeds) == 16
        assert default_seed_grid(0.0) == []
        assert all(cmath.sqrt(-z).real > 0 for z in seeds)


class TestShootingConfig:
    @pytest.mark.parametrize("kwargs", [{"rtol": 0.0}, {"fd_step": -1.0}, {"threads": 0},
                                        {"max_newton": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            ShootingConfig(**kwargs)

    def test_from_config_ignores_unknown_keys(self):
        cfg = ShootingConfig.from_config({"rtol": 1e-8, "unknown": 1}, threads=3)
        assert cfg.rtol == 1e-8 and cfg.threads == 3 and cfg.method == "DOP853"


class TestAudit:
    def test_deep_well_is_self_adjoint_consistent(self):
        seeds = [complex(x, 0.1) for x in np.linspace(-7.5, -0.5, 8)]
        report = enclosure_audit(deep_well(), DIRICHLET, seed_grid=seeds)
        assert report.passed
        assert report.entries
        for entry in report.entries:
            assert entry.self_adjoint_margin is not None
            assert entry.self_adjoint_margin >= 0

    def test_random_potential_quick(self):
        pot = random_potential(RandomPotentialSpec(n_bumps=2, amplitude_scale=3.0, rng_seed=1))
        report = enclosure_audit(pot, DIRICHLET, seed_grid=default_seed_grid(pot.l1_norm(), angles=6))
        assert report.passed
        report.raise_for_failure()

    def test_mollified_extremal_sits_on_boundary(self, extremal_quarter):
        res = extremal_quarter
        pot = mollified_delta(res.delta.c, res.delta.b, 1e-3)
        report = enclosure_audit(pot, DIRICHLET, seed_grid=[res.lam])
        assert len(report.entries) == 1
        assert -1e-4 <= report.entries[0].margin <= 1e-2
        assert report.passed

    def test_failure_raises(self):
        bad = shooting.AuditEntry(lam=-1.0, margin=-0.5, certificate=0.0)
        report = shooting.AuditReport(potential="x", bc=DIRICHLET, v_norm=1.0, entries=[bad])
        assert not report.passed
        with pytest.raises(AuditFailure):
            report.raise_for_failure()

    @pytest.mark.slow
    def test_random_battery_within_budget(self):
        config = ShootingConfig(threads=4)
        started = time.perf_counter()
        for bc in [DIRICHLET, NEUMANN, BoundaryCondition.robin(1.0), WHOLE]:
            domain = Domain.WHOLE_LINE if bc.kind is WHOLE.kind else Domain.HALFLINE
            rng = np.random.default_rng(99)
            for seed in range(100):
                spec = RandomPotentialSpec(n_bumps=int(rng.integers(1, 4)),
                                           amplitude_scale=float(rng.uniform(0.5, 4.0)), rng_seed=seed)
                pot = random_potential(spec, domain)
                report = enclosure_audit(pot, bc, default_seed_grid(pot.l1_norm(), angles=8), config)
                assert report.passed, (bc.label(), seed, report.first_failure())
        assert time.perf_counter() - started < 600.0
