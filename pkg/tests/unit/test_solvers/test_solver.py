"""
Unit tests for the cutting-plane driver and the primal heuristic.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shared.errors import InfeasibleRegionError, PreconditionError
from shared.models.applications import KnapsackSpec, MakespanSpec
from shared.models.run import SolverConfig
from solvers.applications.knapsack import gen_knapsack
from solvers.applications.makespan import gen_makespan
from solvers.cutting_plane.heuristic import primal_heuristic
from solvers.cutting_plane.solver import (
    SolveStatus,
    build_context,
    relative_gap,
    resolve_config,
    solve,
)
from solvers.oracle.enumeration import brute_force
from tools.gaussian.moments import expected_max, pair_moments
from tools.gaussian.types import GaussianVector
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion, Relation, row_constraint
from tools.milp.fallback import FallbackBackend


@pytest.fixture
def kp4():
    return gen_knapsack(KnapsackSpec(n=4, alpha=100.0, seed=5))


@pytest.fixture
def backend():
    return FallbackBackend()


def exact_config(**overrides) -> SolverConfig:
    values = dict(d=5, l=4, tolerance=1e-6, total_time_limit=120.0)
    values.update(overrides)
    return SolverConfig(**values)


class TestRelativeGap:
    """Tests for the stopping measure."""

    def test_maximize_uses_upper_bound(self):
        assert relative_gap(90.0, 100.0, maximize=True) == pytest.approx(0.1)

    def test_minimize_uses_lower_bound(self):
        assert relative_gap(80.0, 100.0, maximize=False) == pytest.approx(0.25)

    def test_nonpositive_denominator_is_absolute(self):
        """Test the fallback to the absolute gap."""
        assert relative_gap(-3.0, -1.0, maximize=True) == 2.0
        assert relative_gap(0.0, 0.5, maximize=False) == 0.5

    def test_infinite_bounds(self):
        assert math.isinf(relative_gap(-math.inf, 10.0, maximize=True))

    def test_crossed_bounds_are_zero(self):
        """Test that lb above ub counts as closed."""
        assert relative_gap(10.0, 9.0, maximize=True) == 0.0


class TestResolveConfig:
    """Tests for presets and overrides."""

    def test_family_presets(self, kp4):
        """Test the knapsack and makespan discretizations."""
        assert (resolve_config(kp4).d, resolve_config(kp4).l) == (25, 15)
        makespan = gen_makespan(MakespanSpec(n=4, eta=0.5, seed=1))
        config = resolve_config(makespan)
        assert (config.d, config.l, config.svi) == (50, 50, False)

    def test_none_overrides_ignored(self, kp4):
        """Test that None leaves the preset and values replace it."""
        config = resolve_config(kp4, d=None, l=7, model="baseline")
        assert config.d == 25
        assert config.l == 7
        assert config.model == "baseline"

    def test_gap_limit_must_be_looser(self, kp4):
        """Test the gap_limit >= tolerance rule."""
        with pytest.raises(ValueError):
            resolve_config(kp4, tolerance=0.01, gap_limit=0.001)


class TestSolve:
    """Tests for the cutting-plane loop."""

    @pytest.mark.parametrize("model", ["enhanced", "baseline"])
    def test_matches_brute_force(self, kp4, backend, model):
        """Test that both RMPs reach the enumerated optimum."""
        # Setup
        oracle = brute_force(kp4)

        # Execute
        result = solve(kp4, exact_config(model=model), backend)

        # Assert
        assert result.status is SolveStatus.OPTIMAL
        assert result.objective == pytest.approx(oracle.best_value, rel=1e-5)
        assert expected_max(pair_moments(kp4.gaussian, result.incumbent)) == pytest.approx(result.objective)
        assert result.lb <= result.ub + 1e-9

    def test_minimization(self, backend):
        """Test a makespan instance against the enumerated minimum."""
        # Setup
        instance = gen_makespan(MakespanSpec(n=5, eta=0.75, seed=2))
        oracle = brute_force(instance)

        # Execute
        result = solve(instance, exact_config(), backend)

        # Assert
        assert result.status is SolveStatus.OPTIMAL
        assert result.maximize is False
        assert result.objective == pytest.approx(oracle.best_value, rel=1e-5)
        assert result.objective == result.ub

    def test_bounds_are_monotone(self, kp4, backend):
        """Test that lb never drops and ub never rises across iterations."""
        result = solve(kp4, exact_config(heuristic=False), backend)
        lbs = [entry.lb for entry in result.trace]
        ubs = [entry.ub for entry in result.trace]
        assert all(b >= a for a, b in zip(lbs, lbs[1:]))
        assert all(b <= a for a, b in zip(ubs, ubs[1:]))
        assert result.cuts_added == result.iterations

    def test_deterministic_trace(self, kp4):
        """Test that two runs visit the same selections."""
        first = solve(kp4, exact_config(), FallbackBackend())
        second = solve(kp4, exact_config(), FallbackBackend())
        assert [e.selection for e in first.trace] == [e.selection for e in second.trace]
        assert first.lb == second.lb and first.ub == second.ub

    def test_infeasible_instance(self, kp4, backend):
        """Test the infeasible status on an empty region."""
        # Setup
        impossible = kp4.with_region(kp4.region.with_constraints([
            row_constraint(0, {0: 1.0}, Relation.GE, 2.0, name="impossible"),
        ]))

        # Execute
        result = solve(impossible, exact_config(), backend)

        # Assert
        assert result.status is SolveStatus.INFEASIBLE
        assert result.incumbent is None
        assert result.objective is None

    def test_gap_limit(self, kp4, backend):
        """Test early stopping at a loose gap."""
        result = solve(kp4, exact_config(tolerance=1e-12, gap_limit=0.5), backend)
        assert result.status in (SolveStatus.GAP_LIMIT, SolveStatus.OPTIMAL)
        assert result.gap < 0.5
        assert result.iterations == 0

    def test_time_limit(self, kp4, backend):
        """Test that an exhausted budget stops before the first RMP."""
        result = solve(kp4, exact_config(total_time_limit=1e-9), backend)
        assert result.status is SolveStatus.TIME_LIMIT
        assert result.iterations == 0

    def test_record_drops_infinite_bounds(self, kp4, backend):
        """Test the serialized result of an infeasible run."""
        impossible = kp4.with_region(kp4.region.with_constraints([
            row_constraint(0, {0: 1.0}, Relation.GE, 2.0, name="impossible"),
        ]))
        config = exact_config()
        record = solve(impossible, config, backend).to_record(impossible, "x.json", config, "v1")
        assert record.status == "infeasible"
        assert record.lb is None and record.ub is None and record.gap is None
        assert record.version == "v1"
        assert record.config["d"] == 5

    def test_record_of_solved_instance(self, kp4, backend):
        """Test incumbent and trace in the record."""
        config = exact_config()
        result = solve(kp4, config, backend)
        record = result.to_record(kp4, "kp4.json", config, "v1")
        assert record.incumbent == result.incumbent.x.tolist()
        assert len(record.trace) == len(result.trace)
        assert record.family == "kp"


row_constraints = st.tuples(
    st.integers(0, 1),
    st.integers(-2, 3).filter(lambda c: c != 0),
    st.lists(st.integers(-2, 3), min_size=3, max_size=3),
    st.sampled_from([Relation.LE, Relation.GE]),
    st.integers(-1, 4),
)


class TestAsymmetricRegions:
    """Tests for regions that constrain the two rows differently."""

    @pytest.mark.parametrize("model", ["enhanced", "baseline"])
    def test_first_row_forced_empty(self, backend, model):
        """Test that the optimum in the second row is not cut off."""
        # Setup
        instance = ProblemInstance(
            GaussianVector([5.0, 1.0], np.eye(2)),
            FeasibleRegion(2, (row_constraint(0, {0: 1.0}, Relation.EQ, 0.0, name="first_out"),)),
            label="first_out",
        )
        oracle = brute_force(instance)

        # Execute
        result = solve(instance, exact_config(model=model), backend)

        # Assert
        assert oracle.best_x.x.tolist() == [[0, 0], [1, 1]]
        assert oracle.best_value == pytest.approx(6.0, abs=1e-6)
        assert result.status is SolveStatus.OPTIMAL
        assert result.objective == pytest.approx(oracle.best_value, rel=1e-5)
        assert result.incumbent.x[1].tolist() == [1, 1]

    @settings(max_examples=25, deadline=None)
    @given(
        n=st.integers(1, 4),
        mu=st.lists(st.floats(0.0, 8.0), min_size=4, max_size=4),
        seed=st.integers(0, 10_000),
        constraints=st.lists(row_constraints, min_size=1, max_size=3),
        maximize=st.booleans(),
    )
    def test_matches_brute_force(self, n, mu, seed, constraints, maximize):
        """Test solve against enumeration on random row-specific constraints."""
        # Setup
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((n, n))
        region = FeasibleRegion(n, tuple(
            row_constraint(row, {j: float(c) for j, c in enumerate([lead] + rest[:n - 1])}, relation, float(rhs),
                           name=f"c{k}")
            for k, (row, lead, rest, relation, rhs) in enumerate(constraints)
        ))
        instance = ProblemInstance(
            GaussianVector(mu[:n], a @ a.T + 0.1 * np.eye(n)),
            region,
            sense=Sense.MAXIMIZE if maximize else Sense.MINIMIZE,
        )

        # Execute
        result = solve(instance, exact_config(), FallbackBackend())

        # Assert
        try:
            oracle = brute_force(instance)
        except InfeasibleRegionError:
            assert result.status is SolveStatus.INFEASIBLE
            return
        assert result.status is SolveStatus.OPTIMAL
        assert result.objective == pytest.approx(oracle.best_value, rel=1e-5, abs=1e-6)


class TestSetup:
    """Tests for the bounding phase, heuristic and SVI floors."""

    def test_context_with_floors(self, kp4, backend):
        """Test that the enhanced maximization setup carries a heuristic value and floors."""
        # Execute
        ctx, setup, heuristic = build_context(kp4, exact_config(), backend, deadline=math.inf)

        # Assert
        assert heuristic is not None
        assert ctx.z_lb == heuristic[1]
        assert len(ctx.theta_floors) == ctx.grid.l
        assert setup["d"] == ctx.grid.d
        assert ctx.big_m_u >= ctx.grid.delta_max

    def test_no_floors_for_baseline(self, kp4, backend):
        """Test that SVIs are enhanced-only."""
        ctx, _, _ = build_context(kp4, exact_config(model="baseline"), backend, deadline=math.inf)
        assert ctx.theta_floors is None

    def test_heuristic_value_is_feasible_lower_bound(self, kp4, backend):
        """Test that z_lb is the exact value of a feasible selection."""
        # Setup
        ctx, _, _ = build_context(kp4, exact_config(heuristic=False), backend, deadline=math.inf)

        # Execute
        x, value = primal_heuristic(kp4, ctx, time_limit=30, backend=backend)

        # Assert
        assert value <= brute_force(kp4).best_value + 1e-9
        assert value == pytest.approx(expected_max(pair_moments(kp4.gaussian, x)))

    def test_heuristic_excludes_low_means(self, backend):
        """Test that items below the mean quantile stay out of both rows."""
        # Setup
        mu = np.array([1.0, 10.0, 11.0, 12.0])
        instance = ProblemInstance(GaussianVector(mu, np.eye(4)), gen_knapsack(
            KnapsackSpec(n=4, alpha=50.0, seed=0)).region, label="quantile")
        ctx, _, _ = build_context(instance, exact_config(heuristic=False), backend, deadline=math.inf)

        # Execute
        x, _ = primal_heuristic(instance, ctx, time_limit=30, backend=backend, top_share=0.5)

        # Assert
        assert x.x[:, 0].sum() == 0
        assert x.x[:, 1].sum() == 0

    def test_heuristic_preconditions(self, kp4, backend):
        """Test the sense and share checks."""
        ctx, _, _ = build_context(kp4, exact_config(heuristic=False), backend, deadline=math.inf)
        with pytest.raises(PreconditionError):
            primal_heuristic(kp4.with_sense(Sense.MINIMIZE), ctx, backend=backend)
        with pytest.raises(PreconditionError):
            primal_heuristic(kp4, ctx, backend=backend, top_share=0.0)
