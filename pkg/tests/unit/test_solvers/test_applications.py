"""
Unit tests for the application generators, the makespan checks and the benchmark harness.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from shared.errors import EnumerationLimitError, PreconditionError
from shared.models.applications import DfsSpec, KnapsackSpec, MakespanSpec
from shared.models.run import BenchmarkRow
from solvers.applications.benchmark import (
    CSV_COLUMNS,
    SUMMARY_COLUMNS,
    benchmark,
    benchmark_csv,
    omit_timing,
    summarize_benchmark,
    summary_csv,
)
from solvers.applications.dfs import (
    build_dfs_instance,
    decode_rosters,
    dfs_benchmark_pair,
    dfs_region,
    filter_players,
    gen_dfs,
)
from solvers.applications.knapsack import gen_knapsack
from solvers.applications.makespan import deterministic_makespan_opt, gen_makespan
from solvers.applications.theorems import check_theorem2, check_theorem3, scale_for_uniform_delta
from solvers.oracle.enumeration import brute_force
from tools.gaussian.moments import pair_moments
from tools.gaussian.types import SelectionPair
from tools.instances.io import write_instance
from tools.instances.problem import Sense
from tools.instances.region import is_feasible


class TestKnapsackGenerator:
    """Tests for two-knapsack instances."""

    def test_deterministic(self):
        """Test that a seed fixes the instance."""
        spec = KnapsackSpec(n=6, alpha=100.0, seed=3)
        assert gen_knapsack(spec) == gen_knapsack(spec)

    def test_alpha_only_scales_sigma(self):
        """Test that alpha multiplies sigma and leaves the rest alone."""
        low = gen_knapsack(KnapsackSpec(n=5, alpha=50.0, seed=9))
        high = gen_knapsack(KnapsackSpec(n=5, alpha=100.0, seed=9))
        assert np.array_equal(low.gaussian.mu, high.gaussian.mu)
        assert np.allclose(high.gaussian.sigma, 2.0 * low.gaussian.sigma)
        assert low.region == high.region

    def test_layout(self):
        """Test ranges, symmetric capacities and the label."""
        instance = gen_knapsack(KnapsackSpec(n=6, alpha=50.0, seed=1))
        assert instance.label == "kp_n6_a50_s1"
        assert instance.family == "kp" and instance.param == 50.0 and instance.seed == 1
        assert np.all((instance.gaussian.mu >= 15.0) & (instance.gaussian.mu <= 25.0))
        assert np.linalg.eigvalsh(instance.gaussian.sigma).min() >= -1e-9
        assert instance.region.is_row_symmetric()

    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            KnapsackSpec(n=0, alpha=50.0, seed=1)


class TestMakespanGenerator:
    """Tests for two-machine makespan instances."""

    def test_partition_and_sense(self):
        """Test that every job runs on exactly one machine."""
        instance = gen_makespan(MakespanSpec(n=5, eta=0.5, seed=4))
        assert instance.sense is Sense.MINIMIZE
        assert is_feasible(instance.region, SelectionPair.from_rows([1, 1, 0, 0, 0], [0, 0, 1, 1, 1]))
        assert not is_feasible(instance.region, SelectionPair.from_rows([1, 1, 0, 0, 0], [0, 0, 1, 1, 0]))
        assert np.all(instance.gaussian.mu > 0)

    def test_clusters_correlate_fully(self):
        """Test correlation one inside a cluster and zero across."""
        instance = gen_makespan(MakespanSpec(n=3, eta=0.5, seed=4, clusters=[1, 1, 2]))
        sigma = instance.gaussian.sigma
        assert sigma[0, 1] == pytest.approx(np.sqrt(sigma[0, 0] * sigma[1, 1]))
        assert sigma[0, 2] == 0.0

    def test_uncorrelated_variant(self):
        """Test the diagonal variant and its label."""
        instance = gen_makespan(MakespanSpec(n=4, eta=0.25, seed=2, correlated=False))
        assert np.count_nonzero(instance.gaussian.sigma - np.diag(np.diag(instance.gaussian.sigma))) == 0
        assert instance.label.startswith("msu_n4")

    def test_cluster_validation(self):
        with pytest.raises(ValidationError):
            MakespanSpec(n=3, eta=0.5, seed=1, clusters=[1, 4, 2])


class TestDeterministicMakespan:
    """Tests for the deterministic partition solvers."""

    def test_exact_beats_lpt(self):
        """Test the classic instance where LPT is suboptimal."""
        mu = np.array([3.0, 3.0, 2.0, 2.0, 2.0])
        assert deterministic_makespan_opt(mu)[1] == 6.0
        assert deterministic_makespan_opt(mu, mode="lpt")[1] == 7.0

    def test_side_matches_value(self):
        """Test that the returned partition has the returned makespan."""
        mu = np.array([5.0, 4.0, 3.0, 3.0, 1.0])
        side, value = deterministic_makespan_opt(mu)
        loads = [mu[side == 0].sum(), mu[side == 1].sum()]
        assert max(loads) == value == 8.0

    def test_errors(self):
        with pytest.raises(PreconditionError):
            deterministic_makespan_opt(np.array([1.0, -2.0]))
        with pytest.raises(PreconditionError):
            deterministic_makespan_opt(np.array([1.0]), mode="greedy")
        with pytest.raises(EnumerationLimitError):
            deterministic_makespan_opt(np.ones(25))


class TestMakespanChecks:
    """Tests for the uncorrelated makespan results."""

    def test_equivalence(self):
        """Test the stochastic/deterministic equivalence on independent jobs."""
        instance = gen_makespan(MakespanSpec(n=7, eta=0.75, seed=3, correlated=False))
        report = check_theorem2(instance)
        assert report.passed
        assert report.theta_constant and report.argmin_match and report.monotone
        assert report.evaluated == 2 ** 7

    def test_equivalence_reports_makespans(self):
        """Test that the stochastic optimum's larger load is the deterministic makespan."""
        # Setup
        instance = gen_makespan(MakespanSpec(n=5, eta=0.5, seed=4, correlated=False))
        _, deterministic = deterministic_makespan_opt(instance.gaussian.mu)

        # Execute
        report = check_theorem2(instance)

        # Assert
        assert report.stochastic_makespan == pytest.approx(deterministic, rel=1e-9)
        assert report.deterministic_makespan == pytest.approx(deterministic)
        assert report.stochastic_value >= report.stochastic_makespan - 1e-9
        assert report.passed

    def test_approximation_factor(self):
        """Test the 2.005 factor of the enhanced bound."""
        instance = gen_makespan(MakespanSpec(n=6, eta=0.5, seed=8, correlated=False))
        report = check_theorem3(instance, l=10)
        assert report.passed
        assert 1.0 <= report.max_factor <= 2.005
        assert report.rmp_factor >= 1.0

    def test_scaling(self):
        """Test that theta equals the delta interval width after scaling."""
        instance = gen_makespan(MakespanSpec(n=4, eta=0.5, seed=1, correlated=False))
        scaled, width = scale_for_uniform_delta(instance, l=5)
        x = SelectionPair.from_rows([1, 0, 1, 0], [0, 1, 0, 1])
        assert width == pytest.approx(instance.gaussian.mu.sum() / 5)
        assert pair_moments(scaled.gaussian, x).theta == pytest.approx(width)

    def test_correlated_rejected(self):
        """Test that correlated jobs are refused."""
        instance = gen_makespan(MakespanSpec(n=4, eta=0.5, seed=1, clusters=[1, 1, 2, 2]))
        with pytest.raises(PreconditionError, match="uncorrelated"):
            check_theorem2(instance)


class TestDfs:
    """Tests for showdown contests."""

    @pytest.fixture
    def contest(self):
        return gen_dfs(8, seed=0, min_score_filter=0.0)

    def test_columns_and_captain_scaling(self, contest):
        """Test flex-then-captain columns with the 1.5 factor."""
        instance, spec = contest
        p = spec.n_players
        assert instance.n == 2 * p
        assert np.allclose(instance.gaussian.mu[p:], 1.5 * instance.gaussian.mu[:p])
        assert np.allclose(instance.gaussian.sigma[p:, p:], 2.25 * instance.gaussian.sigma[:p, :p])
        assert np.allclose(instance.gaussian.sigma[:p, p:], 1.5 * instance.gaussian.sigma[:p, :p])

    def test_benchmark_pair_is_legal(self, contest):
        """Test that the greedy pair decodes to two different legal rosters."""
        # Execute
        instance, spec = contest
        x, value = dfs_benchmark_pair(instance)
        first, second = decode_rosters(spec, x)

        # Assert
        assert is_feasible(instance.region, x)
        assert len(first.flex) == 5 and first.captain not in first.flex
        assert first.players != second.players
        assert value <= brute_force(instance).best_value + 1e-9

    def test_decode_rejects_illegal_rows(self, contest):
        """Test that an empty entry is not a roster."""
        _, spec = contest
        with pytest.raises(PreconditionError, match="flex players"):
            decode_rosters(spec, SelectionPair.empty(2 * spec.n_players))

    def test_score_filter(self):
        """Test that low projections are dropped and their columns removed."""
        # Setup
        spec = DfsSpec(n_players=8, team_of=[1, 2, 1, 2, 1, 2, 1, 2], min_score_filter=5.0)
        mu = np.array([10.0, 9.0, 8.0, 7.0, 6.0, 5.5, 1.0, 12.0])

        # Execute
        kept_spec, kept = filter_players(spec, mu)
        instance, returned_spec = build_dfs_instance(spec, mu, np.eye(8))

        # Assert
        assert kept.tolist() == [0, 1, 2, 3, 4, 5, 7]
        assert kept_spec.n_players == 7
        assert returned_spec == kept_spec
        assert instance.n == 14

    def test_too_few_players(self):
        """Test that a roster needs six players."""
        spec = DfsSpec(n_players=5, team_of=[1, 2, 1, 2, 1])
        with pytest.raises(PreconditionError):
            dfs_region(spec)
        with pytest.raises(PreconditionError):
            filter_players(DfsSpec(n_players=6, team_of=[1, 2, 1, 2, 1, 2]), np.ones(6))

    def test_one_team_rejected(self):
        with pytest.raises(ValidationError):
            DfsSpec(n_players=6, team_of=[1, 1, 1, 1, 1, 1])


class TestBenchmark:
    """Tests for the benchmark harness and its CSV output."""

    @pytest.fixture
    def paths(self, tmp_path):
        files = []
        for seed in (1, 2):
            instance = gen_knapsack(KnapsackSpec(n=3, alpha=50.0, seed=seed))
            files.append(str(write_instance(instance, tmp_path / f"kp_{seed}.json")))
        return files

    def test_rows_in_input_order(self, paths):
        """Test one row per instance and model, instance-major."""
        # Execute
        rows = benchmark(paths, models=("enhanced", "baseline"), overrides={"d": 4, "l": 3})

        # Assert
        assert [(r.instance, r.model) for r in rows] == [
            (paths[0], "enhanced"), (paths[0], "baseline"), (paths[1], "enhanced"), (paths[1], "baseline"),
        ]
        assert all(r.status == "optimal" for r in rows)
        assert all(r.seed in (1, 2) and r.param == 50.0 for r in rows)

    def test_unreadable_file(self, tmp_path):
        """Test that a broken file becomes an error row."""
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        rows = benchmark([str(broken)])
        assert rows[0].status == "error"
        assert rows[0].error

    def test_unknown_override(self, paths):
        with pytest.raises(ValueError, match="unknown solver options"):
            benchmark(paths, overrides={"depth": 3})

    def test_summary(self):
        """Test averages over solved rows and gaps over all rows."""
        # Setup
        rows = [
            BenchmarkRow(instance="a", family="kp", n=10, param=50.0, seed=0, status="optimal",
                         time_s=2.0, gap_pct=0.05, cuts=4, model="enhanced"),
            BenchmarkRow(instance="b", family="kp", n=10, param=50.0, seed=1, status="time_limit",
                         time_s=600.0, gap_pct=3.0, cuts=90, model="enhanced"),
            BenchmarkRow(instance="c", family="kp", n=10, param=50.0, seed=1, status="error", model="baseline"),
        ]

        # Execute
        summary = summarize_benchmark(rows)

        # Assert
        assert len(summary) == 2
        enhanced = summary[0]
        assert (enhanced.instances, enhanced.solved) == (2, 1)
        assert enhanced.avg_time_s == 2.0
        assert enhanced.avg_cuts == 4.0
        assert enhanced.avg_gap_pct == pytest.approx(1.5)
        assert summary[1].avg_gap_pct is None

    def test_csv_text(self):
        """Test headers, blank cells for None and omitted timing."""
        row = BenchmarkRow(instance="a", family="kp", n=3, param=50.0, seed=0, status="optimal",
                           time_s=0.25, lb=1.5, ub=1.5, gap_pct=0.0, iterations=2, cuts=2, model="enhanced")
        text = benchmark_csv(omit_timing([row]))
        lines = text.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[1] == "kp,3,50.0,0,optimal,,1.5,1.5,0.0,2,2,enhanced"
        assert summary_csv(summarize_benchmark([row])).splitlines()[0] == ",".join(SUMMARY_COLUMNS)
