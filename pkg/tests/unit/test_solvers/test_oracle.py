"""
Unit tests for the enumeration, Monte-Carlo and min-cut oracles.
"""
import numpy as np
import pytest

from shared.errors import DimensionMismatchError, EnumerationLimitError, InfeasibleRegionError, PreconditionError
from shared.models.applications import KnapsackSpec
from solvers.applications.knapsack import gen_knapsack
from solvers.oracle.enumeration import brute_force, feasible_batches
from solvers.oracle.mincut import (
    build_mincut_reduction,
    min_cut_brute_force,
    reduction_cut_weight,
)
from solvers.oracle.monte_carlo import monte_carlo
from tools.gaussian.moments import batch_expected_max, batch_pair_moments, expected_max, pair_moments
from tools.gaussian.types import GaussianVector, SelectionPair
from tools.instances.graphs import WeightedGraph, random_graph
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion, Relation, row_constraint


@pytest.fixture
def kp3():
    return gen_knapsack(KnapsackSpec(n=3, alpha=50.0, seed=4))


class TestBruteForce:
    """Tests for exhaustive enumeration."""

    def test_batches_are_feasible(self, kp3):
        """Test that every yielded selection lies in Omega."""
        for batch in feasible_batches(kp3):
            assert kp3.region.feasible_mask(batch).all()

    def test_maximum_over_all_points(self, kp3):
        """Test the optimum against a direct evaluation of every feasible point."""
        # Setup
        selections = np.vstack(list(feasible_batches(kp3)))
        values = batch_expected_max(batch_pair_moments(kp3.gaussian, selections))

        # Execute
        result = brute_force(kp3)

        # Assert
        assert result.best_value == pytest.approx(values.max())
        assert result.evaluated == selections.shape[0]
        assert expected_max(pair_moments(kp3.gaussian, result.best_x)) == pytest.approx(result.best_value)

    def test_minimum(self, kp3):
        """Test that the sense picks the minimum."""
        result = brute_force(kp3.with_sense(Sense.MINIMIZE))
        assert result.best_value == pytest.approx(0.0)
        assert result.best_x == SelectionPair.empty(3)

    def test_limit(self, kp3):
        """Test that enumeration stops past the limit."""
        with pytest.raises(EnumerationLimitError):
            brute_force(kp3, limit=3)

    def test_empty_region(self, kp3):
        """Test that an empty Omega raises."""
        impossible = kp3.with_region(kp3.region.with_constraints([
            row_constraint(1, {2: 1.0}, Relation.GE, 2.0),
        ]))
        with pytest.raises(InfeasibleRegionError):
            brute_force(impossible)


class TestMonteCarlo:
    """Tests for the sampled objective."""

    def test_agrees_with_closed_form(self, kp3):
        """Test that the estimate lies within four standard errors."""
        # Setup
        x = brute_force(kp3).best_x
        exact = expected_max(pair_moments(kp3.gaussian, x))

        # Execute
        estimate, stderr = monte_carlo(kp3, x, samples=200_000, seed=11)

        # Assert
        assert stderr > 0
        assert abs(estimate - exact) <= 4.0 * stderr

    def test_reproducible(self, kp3):
        """Test that a seed fixes the estimate."""
        x = brute_force(kp3).best_x
        assert monte_carlo(kp3, x, 2000, seed=3) == monte_carlo(kp3, x, 2000, seed=3)

    def test_too_few_samples(self, kp3):
        with pytest.raises(PreconditionError, match="at least 1000"):
            monte_carlo(kp3, SelectionPair.empty(3), samples=10, seed=0)

    def test_infeasible_selection(self, kp3):
        """Test that a selection sharing an item is rejected."""
        shared_item = SelectionPair.from_rows([1, 0, 0], [1, 0, 0])
        with pytest.raises(PreconditionError, match="not feasible"):
            monte_carlo(kp3, shared_item, samples=1000, seed=0)

    def test_dimension_mismatch(self, kp3):
        with pytest.raises(DimensionMismatchError):
            monte_carlo(kp3, SelectionPair.empty(4), samples=1000, seed=0)


class TestMinCut:
    """Tests for min-cut enumeration and its reduction."""

    def test_triangle(self):
        """Test both conventions on a positive triangle."""
        graph = WeightedGraph(3, ((0, 1, 2), (1, 2, 3), (0, 2, 4)))
        result = min_cut_brute_force(graph)
        assert result.weight == 0.0
        assert result.side.tolist() == [0, 0, 0]
        assert result.nontrivial_weight == 5.0
        assert graph.cut_weight(result.nontrivial_side) == 5.0

    def test_negative_edges_beat_the_empty_cut(self):
        """Test that a negative edge gives a negative minimum."""
        graph = WeightedGraph(3, ((0, 1, -4), (1, 2, 1)))
        result = min_cut_brute_force(graph)
        assert result.weight == -4.0
        assert result.weight == result.nontrivial_weight

    def test_single_vertex(self):
        """Test that one vertex has no nontrivial cut."""
        result = min_cut_brute_force(WeightedGraph(1, ()))
        assert result.nontrivial_side is None
        assert result.weight == 0.0

    def test_too_many_vertices(self):
        with pytest.raises(PreconditionError):
            min_cut_brute_force(WeightedGraph(21, ()))

    def test_reduction_covariance(self):
        """Test unit variances and scaled edge covariances."""
        graph = WeightedGraph(3, ((0, 1, 2), (1, 2, -1)))
        instance = build_mincut_reduction(graph)
        scale = 4 * 3 + 1
        assert np.diag(instance.gaussian.sigma).tolist() == [1.0, 1.0, 1.0]
        assert instance.gaussian.sigma[0, 1] == pytest.approx(2.0 / scale)
        assert instance.gaussian.sigma[1, 2] == pytest.approx(-1.0 / scale)
        assert instance.sense is Sense.MAXIMIZE
        assert instance.family == "mincut"

    @pytest.mark.parametrize("seed", range(5))
    def test_optimum_induces_a_minimum_cut(self, seed):
        """Test that the enumerated optimum of the reduction is a minimum cut."""
        # Setup
        graph = random_graph(5, seed)
        instance = build_mincut_reduction(graph)

        # Execute
        best = brute_force(instance).best_x

        # Assert
        assert np.all(best.x.sum(axis=0) == 1)
        assert reduction_cut_weight(graph, best) == min_cut_brute_force(graph).weight

    def test_selection_size_checked(self):
        graph = WeightedGraph(3, ((0, 1, 1),))
        with pytest.raises(PreconditionError):
            reduction_cut_weight(graph, SelectionPair.empty(2))


class TestUnconstrainedInstance:
    """Tests for the oracle on the unconstrained region."""

    def test_identical_components_split(self):
        """Test that two iid components are best split across the rows."""
        instance = ProblemInstance(GaussianVector([0.0, 0.0], np.eye(2)), FeasibleRegion(2))
        best = brute_force(instance)
        assert best.best_value == pytest.approx(1.0 / np.sqrt(np.pi))
