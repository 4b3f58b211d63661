"""Tests for the exact delta-potential models."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.core.errors import DomainError
from src.core.types import BoundaryCondition, DeltaPotential, SpectralPoint
from src.spectral import delta, region
from src.spectral.gfun import g_of_angle


THETAS = np.linspace(0.3, 2 * math.pi - 0.3, 10)
DIRICHLET = BoundaryCondition.dirichlet()


class TestExtremalDelta:
    """Potentials attaining equality in the Dirichlet bound."""

    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 5.0, 10.0])
    @pytest.mark.parametrize("theta", THETAS)
    def test_sharpness_grid(self, m, theta):
        res = delta.extremal_delta(m, theta)
        expected = 0.25 * m * m * g_of_angle(theta).value ** 2 * cmath.exp(1j * theta)

        assert abs(abs(res.delta.c) - m) <= 1e-12 * m
        assert res.bs_residual <= 1e-10
        assert res.lam == pytest.approx(expected, rel=1e-12)

        found = delta.dirichlet_delta_eigenvalues(res.delta)
        assert len(found) == 1
        assert abs(found[0] - expected) <= 1e-9 * (1 + abs(expected))

    def test_quarter_turn_values(self, extremal_quarter):
        g1 = g_of_angle(math.pi / 2).value
        assert extremal_quarter.lam == pytest.approx(0.25 * g1 ** 2 * 1j, rel=1e-12)
        assert extremal_quarter.delta.b > 0

    def test_pi_is_refused(self):
        with pytest.raises(DomainError):
            delta.extremal_delta(1.0, math.pi)

    @pytest.mark.parametrize("m,theta", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, 7.0)])
    def test_invalid_arguments(self, m, theta):
        with pytest.raises(DomainError):
            delta.extremal_delta(m, theta)


class TestDirichletEigenvalues:
    def test_zero_strength_has_none(self):
        assert delta.dirichlet_delta_eigenvalues(DeltaPotential(0.0, 1.0)) == []

    def test_weak_real_delta_has_none(self):
        # a real delta needs c b > 1 to bind
        assert delta.dirichlet_delta_eigenvalues(DeltaPotential(0.5, 1.0)) == []

    def test_strong_real_delta_binds(self):
        found = delta.dirichlet_delta_eigenvalues(DeltaPotential(4.0, 1.0))
        assert len(found) == 1
        lam = found[0]
        assert abs(lam.imag) < 1e-12 and lam.real < 0
        # 2s = c (1 - e^{-2sb})
        s = cmath.sqrt(-lam)
        assert abs(4.0 * (1 - cmath.exp(-2 * s)) - 2 * s) < 1e-10

    def test_bs_number_is_one_at_eigenvalue(self):
        pot = DeltaPotential(3.0 + 1.0j, 0.8)
        for lam in delta.dirichlet_delta_eigenvalues(pot):
            assert abs(delta.dirichlet_bs_number(pot, -lam) - 1) < 1e-10

    def test_eigenvalues_respect_bound(self):
        pot = DeltaPotential(2.0 - 3.0j, 1.7)
        for lam in delta.dirichlet_delta_eigenvalues(pot):
            assert abs(lam) <= abs(pot.c) ** 2 + 1e-12

    def test_random_eigenvalues_inside_dirichlet_region(self):
        rng = np.random.default_rng(31)
        checked = 0
        for _ in range(100):
            c = rng.uniform(0.5, 6.0) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            pot = DeltaPotential(c, rng.uniform(0.1, 3.0))
            for lam in delta.dirichlet_delta_eigenvalues(pot):
                margin = region.contains(SpectralPoint(lam), pot.l1_norm, DIRICHLET).margin
                assert margin >= -1e-9 * (1 + abs(lam)), (pot, lam, margin)
                checked += 1
        assert checked >= 20

    def test_box_must_be_in_right_halfplane(self):
        from src.spectral.roots import SearchBox

        with pytest.raises(DomainError):
            delta.dirichlet_delta_eigenvalues(DeltaPotential(1.0, 1.0), box=SearchBox(-1.0, 1.0, -1.0, 1.0))


class TestNeumannRobin:
    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=0.01, max_value=100.0), st.floats(min_value=-100.0, max_value=100.0))
    def test_neumann_sharp(self, re, im):
        c = complex(re, im)
        lam = delta.neumann_delta_eigenvalue(c)
        assert math.sqrt(abs(lam)) == pytest.approx(abs(c), rel=1e-14)

    def test_neumann_needs_positive_real_part(self):
        with pytest.raises(DomainError):
            delta.neumann_delta_eigenvalue(-1.0 + 1.0j)

    def test_robin_formula(self):
        assert delta.robin_delta_eigenvalue(3.0, 1.0) == -4.0

    def test_robin_domain(self):
        with pytest.raises(DomainError):
            delta.robin_delta_eigenvalue(1.0, 2.0)
        with pytest.raises(DomainError):
            delta.robin_delta_eigenvalue(1.0, -0.5)

    @pytest.mark.parametrize("sigma", [0.0, 1.0, 5.0])
    @pytest.mark.parametrize("theta", [math.pi / 2, math.pi, 3 * math.pi / 2])
    def test_sharpness_sequence(self, sigma, theta):
        steps = delta.robin_sharpness_sequence(theta, sigma, [10.0, 100.0, 1000.0])
        ratios = [s.ratio for s in steps]
        assert len(steps) == 3
        assert all(b >= a - 1e-15 for a, b in zip(ratios, ratios[1:]))
        assert 1 - ratios[-1] <= 10 / 1000
        assert all(r <= 1 + 1e-15 for r in ratios)

    def test_inadmissible_steps_skipped(self):
        steps = delta.robin_sharpness_sequence(math.pi / 2, 5.0, [1.0, 100.0])
        assert [s.k for s in steps] == [100.0]

    def test_whole_line_equality(self):
        c = 2.0 + 0.5j
        lam = delta.whole_line_delta_eigenvalue(c)
        assert math.sqrt(abs(lam)) == pytest.approx(abs(c) / 2, rel=1e-14)
