"""
Unit tests for the MILP model and its backends.
"""
import numpy as np
import pulp as plp
import pytest

from shared.errors import ModelError, PreconditionError
from tools.instances.region import Relation
from tools.milp.client import get_milp_backend
from tools.milp.fallback import FallbackBackend, SelectionEnumerator
from tools.milp.model import MilpModel, ModelSense, OutcomeStatus, trivial_bound
from tools.milp.pulp_adapter import PulpBackend, gap_slack


def knapsack_model(values=(5.0, 4.0, 3.0), weights=(2.0, 3.0, 1.0), capacity=4.0) -> MilpModel:
    model = MilpModel("knapsack")
    names = [model.add_binary(f"x{j}") for j in range(len(values))]
    model.add_constraint(zip(names, weights), Relation.LE, capacity, name="capacity")
    model.set_objective(zip(names, values), ModelSense.MAXIMIZE)
    return model


class TestMilpModel:
    """Tests for model construction."""

    def test_duplicate_variable(self):
        """Test that names are unique."""
        model = MilpModel()
        model.add_binary("x")
        with pytest.raises(ModelError, match="duplicate"):
            model.add_binary("x")

    def test_unknown_variable_in_constraint(self):
        """Test that constraints may only use declared variables."""
        model = MilpModel()
        model.add_binary("x")
        with pytest.raises(ModelError, match="unknown variable y"):
            model.add_constraint({"y": 1.0}, Relation.LE, 1.0)

    def test_missing_objective(self):
        """Test that solving needs an objective."""
        with pytest.raises(ModelError, match="no objective"):
            MilpModel("empty").validate()

    def test_violations_can_skip_lazy_rows(self):
        """Test that lazy rows are reported unless excluded."""
        model = knapsack_model()
        model.add_constraint({"x0": 1.0}, Relation.LE, 0.0, name="cut", lazy=True)
        assignment = {"x0": 1.0, "x1": 0.0, "x2": 1.0}
        assert model.violations(assignment) == ["cut"]
        assert model.violations(assignment, include_lazy=False) == []

    def test_trivial_bound(self):
        """Test the bound from variable bounds alone."""
        assert trivial_bound(knapsack_model()) == 12.0

    def test_fix_variable(self):
        """Test fixing a binary and rejecting values outside its bounds."""
        model = knapsack_model()
        model.fix_variable("x1", 1.0)
        assert model.variable("x1").lower == 1.0
        with pytest.raises(ModelError):
            model.fix_variable("x2", 2.0)


class TestSelectionEnumerator:
    """Tests for pruned lexicographic enumeration."""

    def test_unconstrained_order(self):
        """Test that vectors come out in lexicographic order."""
        enumerator = SelectionEnumerator(3, np.zeros((0, 3)), [], np.zeros(0), [(0, 1)] * 3, chunk_size=2)
        leaves = np.vstack(list(enumerator.batches(np.inf)))
        assert leaves.tolist() == [[a, b, c] for a in (0, 1) for b in (0, 1) for c in (0, 1)]

    def test_pruning_matches_filter(self):
        """Test that pruning keeps exactly the feasible vectors."""
        # Setup
        matrix = np.array([[2.0, 3.0, 1.0, 4.0], [1.0, 1.0, 1.0, 1.0]])
        enumerator = SelectionEnumerator(
            4, matrix, [Relation.LE, Relation.GE], np.array([5.0, 2.0]), [(0, 1)] * 4,
        )

        # Execute
        leaves = np.vstack(list(enumerator.batches(np.inf)))

        # Assert
        codes = np.arange(16)
        everything = (codes[:, None] >> np.arange(4)[::-1]) & 1
        keep = (everything @ matrix[0] <= 5) & (everything @ matrix[1] >= 2)
        assert leaves.tolist() == everything[keep].tolist()

    def test_fixed_values(self):
        """Test that allowed values restrict a position."""
        enumerator = SelectionEnumerator(2, np.zeros((0, 2)), [], np.zeros(0), [(1,), (0, 1)])
        leaves = np.vstack(list(enumerator.batches(np.inf)))
        assert leaves.tolist() == [[1, 0], [1, 1]]

    def test_infeasible_root(self):
        """Test that an impossible system yields nothing."""
        enumerator = SelectionEnumerator(2, np.ones((1, 2)), [Relation.GE], np.array([3.0]), [(0, 1)] * 2)
        assert list(enumerator.batches(np.inf)) == []


class TestFallbackBackend:
    """Tests for the built-in enumeration backend."""

    def test_pure_binary_model(self):
        """Test a knapsack solved through the linear completion."""
        outcome = FallbackBackend().solve(knapsack_model(), time_limit=10)
        assert outcome.status is OutcomeStatus.OPTIMAL
        assert outcome.objective_value == 8.0
        assert outcome.selection(["x0", "x1", "x2"]).tolist() == [1, 0, 1]

    def test_lazy_cuts_accumulate(self):
        """Test that each re-solve respects every lazy row added so far."""
        # Setup
        backend = FallbackBackend()
        model = knapsack_model()
        seen = []

        # Execute
        for k in range(3):
            outcome = backend.solve(model, time_limit=10)
            x = outcome.selection(["x0", "x1", "x2"])
            seen.append(x.tolist())
            terms = [(f"x{j}", 1.0 if x[j] else -1.0) for j in range(3)]
            model.add_constraint(terms, Relation.LE, float(x.sum()) - 1.0, name=f"cut_{k}", lazy=True)

        # Assert
        assert seen == [[1, 0, 1], [0, 1, 1], [1, 0, 0]]

    def test_infeasible(self):
        """Test that an empty region is reported as infeasible."""
        model = knapsack_model()
        model.add_constraint({"x0": 1.0, "x1": 1.0, "x2": 1.0}, Relation.GE, 4.0)
        assert FallbackBackend().solve(model, time_limit=10).status is OutcomeStatus.INFEASIBLE

    def test_continuous_without_completion(self):
        """Test that auxiliaries need a completion."""
        model = knapsack_model()
        model.add_continuous("s", 0.0, 1.0)
        with pytest.raises(ModelError, match="completion"):
            FallbackBackend().solve(model, time_limit=10)

    def test_time_limit_must_be_positive(self):
        """Test the time limit precondition."""
        with pytest.raises(PreconditionError):
            FallbackBackend().solve(knapsack_model(), time_limit=0)

    def test_clear_cache(self):
        """Test that clearing the cache keeps results unchanged."""
        backend = FallbackBackend()
        model = knapsack_model()
        first = backend.solve(model, time_limit=10)
        backend.clear_cache()
        assert backend.solve(model, time_limit=10).objective_value == first.objective_value


class TestBackendSelection:
    """Tests for get_milp_backend."""

    def test_shared_instance(self):
        """Test that a name maps to one backend per process."""
        assert get_milp_backend("fallback") is get_milp_backend("fallback")

    def test_unknown_name(self):
        """Test that unknown names are rejected."""
        with pytest.raises(PreconditionError, match="unknown MILP backend"):
            get_milp_backend("gurobi")


class TestPulpBackend:
    """Tests for the CBC adapter."""

    def test_agrees_with_fallback(self):
        """Test both backends on the same small model."""
        model = knapsack_model(values=(6.0, 5.0, 4.0, 3.0), weights=(5.0, 4.0, 3.0, 2.0), capacity=7.0)
        external = PulpBackend().solve(model, time_limit=30)
        builtin = FallbackBackend().solve(model, time_limit=30)
        assert external.status is OutcomeStatus.OPTIMAL
        assert external.objective_value == pytest.approx(builtin.objective_value, abs=1e-6)

    @pytest.mark.parametrize("sense", [ModelSense.MAXIMIZE, ModelSense.MINIMIZE])
    def test_optimal_bound_covers_the_gap(self, sense):
        """Test that the dual bound sits on the far side of the incumbent by the gap slack."""
        # Setup
        model = knapsack_model(values=(6.0, 5.0, 4.0, 3.0), weights=(5.0, 4.0, 3.0, 2.0), capacity=7.0)
        model.add_constraint({"x0": 1.0, "x1": 1.0}, Relation.GE, 1.0, name="one_large")
        model.set_objective(model.objective.terms, sense)

        # Execute
        outcome = PulpBackend().solve(model, time_limit=30)

        # Assert
        assert outcome.status is OutcomeStatus.OPTIMAL
        slack = gap_slack(outcome.objective_value)
        if sense is ModelSense.MAXIMIZE:
            assert outcome.dual_bound == pytest.approx(outcome.objective_value + slack)
            assert outcome.dual_bound > outcome.objective_value
        else:
            assert outcome.dual_bound == pytest.approx(outcome.objective_value - slack)
            assert outcome.dual_bound < outcome.objective_value

    def test_retries_solver_failures(self, mocker):
        """Test that a failing CBC process is retried."""
        # Setup
        mocker.patch.object(PulpBackend._run.retry, "sleep")
        solve = mocker.patch.object(plp.LpProblem, "solve", side_effect=[plp.PulpSolverError("crash"), 1])

        # Execute
        outcome = PulpBackend().solve(knapsack_model(), time_limit=5)

        # Assert
        assert solve.call_count == 2
        assert outcome.status is OutcomeStatus.TIME_LIMIT_NO_INCUMBENT
