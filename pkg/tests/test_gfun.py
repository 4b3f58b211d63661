"""Tests for the extremal function g."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from src.core.errors import DomainError
from src.spectral.gfun import (
    cot_half,
    g,
    g_envelopes,
    g_large_a,
    g_objective,
    g_of_angle,
)


# g(a) = 2 - pi/a + C/a^2 + O(a^-3) with C = pi^2/2 + 1
LARGE_A_CONSTANT = math.pi ** 2 / 2 + 1


class TestAnchors:
    """Exact values and global bounds."""

    def test_zero_is_one_and_not_attained(self):
        res = g(0.0)
        assert res.value == 1.0
        assert res.attained is False
        assert res.argmax is None

    def test_monotone_on_log_grid(self):
        values = [g(a).value for a in np.geomspace(1e-3, 1e3, 200)]
        assert all(b >= a - 1e-13 for a, b in zip(values, values[1:]))

    def test_below_two_everywhere(self):
        for a in np.geomspace(1e-3, 1e6, 60):
            assert g(a).value < 2.0

    def test_lower_envelope(self):
        for a in np.geomspace(1e-2, 1e3, 80):
            lower, _ = g_envelopes(a)
            assert g(a).value >= lower - 1e-14

    @pytest.mark.parametrize("a", [0.05, 0.1, 0.2, 0.3])
    def test_small_a_envelope(self, a):
        excess = g(a).value - 1.0
        assert 0.0 <= excess <= math.exp(-math.pi / (3 * a))

    @pytest.mark.parametrize("a", [20.0, 50.0, 100.0, 500.0])
    def test_large_a_expansion(self, a):
        assert abs(g(a).value - g_large_a(a)) <= 2 * LARGE_A_CONSTANT / a ** 2

    def test_large_a_constant_calibration(self):
        a = 1000.0
        estimate = (g(a).value - g_large_a(a)) * a ** 2
        assert estimate == pytest.approx(LARGE_A_CONSTANT, abs=0.1)


class TestMaximizer:
    """The maximizer and the value against brute force."""

    def test_matches_dense_grid_at_one(self):
        ys = np.linspace(0.0, 20.0, 1_000_001)
        brute = float(np.max(np.abs(np.exp(1j * ys) - np.exp(-ys))))
        res = g(1.0)
        assert res.value >= brute - 1e-12
        assert res.value - brute <= 1e-8
        assert res.value == pytest.approx(1.06943, abs=1e-3)

    @pytest.mark.parametrize("a", [0.5, 1.0, 3.0, 40.0])
    def test_argmax_in_bracket(self, a):
        res = g(a)
        assert math.pi / (3 * a) < res.argmax <= math.pi / a
        assert g_objective(a, res.argmax) == pytest.approx(res.value, rel=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_even(self, a):
        assert g(a).value == g(-a).value

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=1e-2, max_value=1e2), st.floats(min_value=0.0, max_value=50.0))
    def test_supremum_dominates_objective(self, a, y):
        assert g_objective(a, y) <= g(a).value + 1e-12


class TestAngles:
    def test_cot_half_exact_at_pi(self):
        assert cot_half(math.pi) == 0.0
        assert g_of_angle(math.pi).value == 1.0

    def test_quarter_turn_is_g_of_one(self):
        assert g_of_angle(math.pi / 2).value == pytest.approx(g(1.0).value, rel=1e-14)

    def test_conjugate_angles_agree(self):
        assert g_of_angle(0.7).value == pytest.approx(g_of_angle(2 * math.pi - 0.7).value, rel=1e-12)


class TestDomain:
    def test_negative_y_rejected(self):
        with pytest.raises(DomainError):
            g_objective(1.0, -0.1)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            g(float("nan"))

    def test_envelopes_need_positive_a(self):
        with pytest.raises(DomainError):
            g_envelopes(0.0)
