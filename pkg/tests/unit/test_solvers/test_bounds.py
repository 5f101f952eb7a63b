"""
Unit tests for the bounding functions.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shared.config.constants import INV_SQRT_2EPI, INV_SQRT_2PI
from shared.errors import PreconditionError
from solvers.cutting_plane.bounds import (
    BoundKind,
    baseline_bound,
    baseline_coefficients,
    baseline_lower_bound,
    delta_gap_bound,
    enhanced_bound,
    enhanced_lower_bound,
    evaluate_intervals,
    interval_bound,
    pair_tables,
)
from solvers.cutting_plane.grid import build_grid
from tools.gaussian.moments import expected_max, pair_moments
from tools.gaussian.types import GaussianVector, PairMoments, SelectionPair
from tools.instances.problem import Sense


def moments(e1: float, e2: float, theta: float) -> PairMoments:
    return PairMoments(e1=e1, e2=e2, v1=theta * theta, v2=0.0, c12=0.0, delta=e1 - e2, theta=theta)


def random_moments(seed: int, n: int = 4) -> PairMoments:
    """Moments of a random selection pair with at least one item per row."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    g = GaussianVector(rng.uniform(-3.0, 3.0, size=n), a @ a.T + 0.1 * np.eye(n))
    rows = rng.integers(0, 2, size=(2, n))
    rows[:, 0] = (1, 0)
    rows[:, 1] = (0, 1)
    return pair_moments(g, SelectionPair.from_rows(rows[0], rows[1]))


class TestPointBounds:
    """Tests for the bounds at given interval endpoints."""

    def test_enhanced_bound_is_exact_at_exact_endpoints(self):
        """Test that tight intervals reproduce E[max]."""
        m = moments(3.0, 1.0, 2.0)
        assert enhanced_bound(m, 2.0, 2.0, 2.0, 2.0) == pytest.approx(expected_max(m), abs=1e-12)
        assert enhanced_lower_bound(m, 2.0, 2.0, 2.0, 2.0) == pytest.approx(expected_max(m), abs=1e-12)

    def test_baseline_bound_value(self):
        """Test e1 + u_theta / sqrt(2 pi)."""
        m = moments(3.0, 1.0, 2.0)
        assert baseline_bound(m, 2.5) == pytest.approx(3.0 + 2.5 * INV_SQRT_2PI)

    def test_baseline_lower_bound_value(self):
        """Test (e1 + e2)/2 + l_theta phi(u_delta/l_theta)."""
        m = moments(3.0, 1.0, 2.0)
        expected = 2.0 + 1.5 * INV_SQRT_2PI * math.exp(-0.5 * (2.5 / 1.5) ** 2)
        assert baseline_lower_bound(m, 1.5, 2.5) == pytest.approx(expected)

    def test_zero_lower_theta_uses_sign_convention(self):
        """Test that l_theta = 0 puts all weight on e1 when u_delta > 0."""
        m = moments(3.0, 1.0, 1.0)
        assert enhanced_bound(m, 0.0, 1.0, 0.0, 2.0) == pytest.approx(3.0 + INV_SQRT_2PI)

    @pytest.mark.parametrize("args", [
        (1.5, 2.0, 0.0, 3.0),
        (0.0, 0.5, 0.0, 3.0),
        (0.0, 2.0, 2.5, 3.0),
        (0.0, 2.0, 0.0, 1.0),
        (-0.1, 2.0, 0.0, 3.0),
    ])
    def test_out_of_order_bounds(self, args):
        """Test that bounds must bracket theta and delta."""
        m = moments(3.0, 1.0, 1.0)
        with pytest.raises(PreconditionError):
            enhanced_bound(m, *args)

    def test_rounding_is_tolerated(self):
        """Test that a bound a hair inside the value is accepted."""
        m = moments(3.0, 1.0, 1.0)
        enhanced_bound(m, 1.0 + 1e-12, 1.0, 2.0, 2.0)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        shrink=st.just(0.0) | st.floats(0.01, 1.0),
        grow=st.floats(0.0, 2.0),
        delta_shrink=st.floats(0.0, 1.0),
        delta_grow=st.floats(0.0, 2.0),
    )
    def test_bounds_bracket_expected_max(self, seed, shrink, grow, delta_shrink, delta_grow):
        """Test lower <= E[max] <= upper <= baseline for any valid intervals."""
        # Setup
        m = random_moments(seed)
        exact = expected_max(m)
        l_theta, u_theta = m.theta * shrink, m.theta + grow
        l_delta, u_delta = m.delta * delta_shrink, m.delta + delta_grow

        # Execute
        upper = enhanced_bound(m, l_theta, u_theta, l_delta, u_delta)
        lower = enhanced_lower_bound(m, l_theta, u_theta, l_delta, u_delta)

        # Assert
        tol = 1e-9 * max(1.0, abs(exact))
        assert upper >= exact - tol
        assert lower <= exact + tol
        assert upper <= baseline_bound(m, u_theta) + tol


class TestDeltaGapBound:
    """Tests for the distance between the enhanced bound and E[max]."""

    def test_exact_bounds_give_zero(self):
        """Test that tight intervals leave no gap."""
        m = moments(3.0, 1.0, 2.0)
        assert delta_gap_bound(m, 2.0, 2.0, 2.0, 2.0) == pytest.approx(0.0, abs=1e-15)

    def test_exact_theta_form(self):
        """Test the closed form when theta is known exactly."""
        m = moments(3.0, 1.0, 2.0)
        expected = (2.0 * INV_SQRT_2PI + 2.0 * INV_SQRT_2EPI) * (2.5 - 1.5) / 2.0
        assert delta_gap_bound(m, 2.0, 2.0, 1.5, 2.5) == pytest.approx(expected)

    def test_zero_lower_theta_is_infinite(self):
        """Test the sentinel for l_theta = 0."""
        m = moments(3.0, 1.0, 1.0)
        assert math.isinf(delta_gap_bound(m, 0.0, 1.0, 2.0, 2.0))

    def test_loose_theta_with_equal_means(self):
        """Test a wide theta interval with delta = 0, where the spread term dominates."""
        # Setup
        m = moments(1.0, 1.0, 1.0)

        # Execute
        gap = enhanced_bound(m, 1.0, 2.0, 0.0, 0.0) - expected_max(m)

        # Assert
        assert gap == pytest.approx(INV_SQRT_2PI)
        assert delta_gap_bound(m, 1.0, 2.0, 0.0, 0.0) >= gap - 1e-12

    @settings(max_examples=100, deadline=None)
    @given(
        e2=st.floats(-5.0, 5.0),
        delta=st.floats(0.0, 5.0),
        theta=st.floats(0.01, 5.0),
        shrink=st.floats(0.05, 1.0),
        grow=st.floats(0.0, 2.0),
        delta_shrink=st.floats(0.0, 1.0),
        delta_grow=st.floats(0.0, 2.0),
    )
    def test_bounds_the_gap(self, e2, delta, theta, shrink, grow, delta_shrink, delta_grow):
        """Test enhanced_bound - E[max] <= delta_gap_bound."""
        # Setup
        m = moments(e2 + delta, e2, theta)
        bounds = (theta * shrink, theta + grow, delta * delta_shrink, delta + delta_grow)

        # Execute
        gap = enhanced_bound(m, *bounds) - expected_max(m)

        # Assert
        assert gap <= delta_gap_bound(m, *bounds) + 1e-9


class TestGridEvaluation:
    """Tests for bounds evaluated over grid intervals."""

    @pytest.fixture
    def grid(self):
        return build_grid(theta2_max=9.0, delta_max=4.0, d=5, l=4)

    def test_pair_tables_shape_and_values(self, grid):
        """Test the (q, h) coefficient tables for maximization."""
        # Execute
        weights, spreads = pair_tables(grid, Sense.MAXIMIZE)

        # Assert
        assert weights.shape == spreads.shape == (5, 4)
        # theta_lower = 0 on the first interval: weight 1 unless u_delta = 0
        assert weights[0].tolist() == [1.0, 1.0, 1.0, 1.0]
        assert spreads[1, 0] == pytest.approx(np.sqrt(3.0) * INV_SQRT_2PI)

    def test_baseline_coefficients(self, grid):
        """Test the per-interval constants of both senses."""
        assert baseline_coefficients(grid, Sense.MAXIMIZE).tolist() == pytest.approx(
            (grid.theta_upper * INV_SQRT_2PI).tolist()
        )
        assert baseline_coefficients(grid, Sense.MINIMIZE)[0] == 0.0

    def test_outside_grid_is_nan(self, grid):
        """Test that inadmissible points get NaN and index -1."""
        values, q, h = evaluate_intervals(
            np.array([1.0]), np.array([0.0]), np.array([20.0]), np.array([1.0]),
            grid, Sense.MAXIMIZE, BoundKind.ENHANCED,
        )
        assert np.isnan(values[0])
        assert q[0] == -1 and h[0] == -1

    def test_baseline_has_no_delta_index(self, grid):
        """Test that the baseline kind reports h = -1."""
        values, q, h = evaluate_intervals(
            np.array([2.0]), np.array([1.0]), np.array([2.0]), np.array([1.0]),
            grid, Sense.MAXIMIZE, BoundKind.BASELINE,
        )
        assert values[0] == pytest.approx(2.0 + np.sqrt(3.0) * INV_SQRT_2PI)
        assert q[0] == 1
        assert h[0] == -1

    def test_floors_block_intervals(self, grid):
        """Test that an infinite floor removes every interval of a point."""
        floors = [0.0, math.inf, math.inf, math.inf]
        values, _, _ = evaluate_intervals(
            np.array([3.0]), np.array([1.0]), np.array([2.0]), np.array([2.0]),
            grid, Sense.MAXIMIZE, BoundKind.ENHANCED, floors,
        )
        assert np.isnan(values[0])

    def test_floors_filter_small_theta(self, grid):
        """Test that theta^2 below floor^2 makes the interval inadmissible."""
        floors = [2.0, 2.0, 2.0, 2.0]
        low, _, _ = evaluate_intervals(
            np.array([3.0]), np.array([2.5]), np.array([1.0]), np.array([0.5]),
            grid, Sense.MAXIMIZE, BoundKind.ENHANCED, floors,
        )
        high, _, _ = evaluate_intervals(
            np.array([3.0]), np.array([2.5]), np.array([5.0]), np.array([0.5]),
            grid, Sense.MAXIMIZE, BoundKind.ENHANCED, floors,
        )
        assert np.isnan(low[0])
        assert np.isfinite(high[0])

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000), d=st.integers(2, 8), l=st.integers(1, 8))
    def test_interval_bound_validity_and_dominance(self, seed, d, l):
        """Test max-sense >= E[max] >= min-sense and enhanced <= baseline on a grid."""
        # Setup
        m = random_moments(seed)
        grid = build_grid(1.5 * m.theta2 + 0.1, 1.5 * m.delta + 0.1, d, l)
        exact = expected_max(m)
        tol = 1e-7 * max(1.0, abs(exact))

        # Execute
        enhanced = interval_bound(m, grid, Sense.MAXIMIZE, BoundKind.ENHANCED)
        baseline = interval_bound(m, grid, Sense.MAXIMIZE, BoundKind.BASELINE)
        enhanced_min = interval_bound(m, grid, Sense.MINIMIZE, BoundKind.ENHANCED)
        baseline_min = interval_bound(m, grid, Sense.MINIMIZE, BoundKind.BASELINE)

        # Assert
        assert enhanced >= exact - tol
        assert baseline >= enhanced - tol
        assert enhanced_min <= exact + tol
        assert baseline_min <= exact + tol

    def test_finer_grid_never_loosens(self):
        """Test that refining delta intervals on a nested grid keeps the bound or tightens it."""
        m = random_moments(7)
        coarse = build_grid(4.0 * m.theta2 + 1.0, 2.0 * m.delta + 1.0, 3, 2)
        fine = build_grid(4.0 * m.theta2 + 1.0, 2.0 * m.delta + 1.0, 3, 4)
        assert interval_bound(m, fine) <= interval_bound(m, coarse) + 1e-12
