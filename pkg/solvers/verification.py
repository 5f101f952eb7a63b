"""
Property suites behind the ``verify`` command.

Every suite is deterministic for a given seed and returns a SuiteReport;
``passed`` is true iff no check failed.
"""
import math
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from shared.config.constants import KNAPSACK_ALPHAS, MAKESPAN_ETAS, MAX_MINCUT_VERTICES
from shared.errors import GaussMaxError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.applications import KnapsackSpec, MakespanSpec
from shared.models.run import SuiteReport
from solvers.applications.dfs import decode_rosters, dfs_benchmark_pair, gen_dfs
from solvers.applications.knapsack import gen_knapsack, random_psd
from solvers.applications.makespan import gen_makespan
from solvers.applications.theorems import check_theorem2, check_theorem3
from solvers.cutting_plane.bounds import BoundKind, delta_gap_bound, enhanced_bound, evaluate_intervals
from solvers.cutting_plane.cuts import no_good_cut
from solvers.cutting_plane.grid import build_grid
from solvers.cutting_plane.solver import SolveStatus, build_context, build_model, resolve_config, solve
from solvers.oracle.enumeration import brute_force, feasible_batches
from solvers.oracle.mincut import build_mincut_reduction, min_cut_brute_force, reduction_cut_weight
from solvers.oracle.monte_carlo import monte_carlo
from tools.gaussian.moments import (
    batch_expected_max,
    batch_pair_moments,
    expected_max,
    expected_min,
    pair_moments,
)
from tools.gaussian.types import GaussianVector, PairMoments, SelectionPair
from tools.instances.graphs import random_graph
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion
from tools.milp.client import get_milp_backend
from tools.milp.model import OutcomeStatus

logger = setup_logger(__name__)

_EXACT = 1e-9


@dataclass(frozen=True)
class SuiteOptions:
    """Size knobs shared by the suites; None picks the suite default."""
    n: Optional[int] = None
    graphs: Optional[int] = None
    vertices: Optional[int] = None
    instances: Optional[int] = None
    seed: int = 0
    samples: Optional[int] = None


class _Checks:
    """Collects pass/fail outcomes for one suite."""

    def __init__(self, suite: str):
        self.suite = suite
        self.count = 0
        self.failures: List[str] = []
        self.details: Dict[str, object] = {}

    def expect(self, condition: bool, message: str) -> bool:
        self.count += 1
        if not condition:
            self.failures.append(message)
        return bool(condition)

    def report(self) -> SuiteReport:
        return SuiteReport(
            suite=self.suite,
            passed=not self.failures,
            checks=self.count,
            failures=self.failures,
            details=self.details,
        )


def _pick(value: Optional[int], default: int) -> int:
    return default if value is None else value


def _close(a: float, b: float, rel: float) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _knapsack_suite(options: SuiteOptions, default_n: int, default_count: int) -> List[ProblemInstance]:
    """KP instances with n cycling over [n - 4, n] and alpha over the standard levels."""
    n_max = _pick(options.n, default_n)
    count = _pick(options.instances, default_count)
    sizes = list(range(max(2, n_max - 4), n_max + 1))
    instances = []
    for k in range(count):
        spec = KnapsackSpec(
            n=sizes[k % len(sizes)],
            alpha=KNAPSACK_ALPHAS[k % len(KNAPSACK_ALPHAS)],
            seed=options.seed + k,
        )
        instances.append(gen_knapsack(spec))
    return instances


def _pair(mu, sigma) -> PairMoments:
    g = GaussianVector(np.asarray(mu, dtype=float), np.asarray(sigma, dtype=float))
    return pair_moments(g, SelectionPair.from_rows([1, 0], [0, 1]))


# Suites

def closed_form_suite(options: SuiteOptions) -> SuiteReport:
    """Textbook values of E[max] and E[min] for standard pairs."""
    checks = _Checks("closed-form")
    cases = [
        ("uncorrelated", _pair([0, 0], [[1, 0], [0, 1]]), 1.0 / math.sqrt(math.pi), _EXACT),
        ("correlation 1/2", _pair([0, 0], [[1, 0.5], [0.5, 1]]), 1.0 / math.sqrt(2 * math.pi), _EXACT),
        ("correlation -1/2", _pair([0, 0], [[1, -0.5], [-0.5, 1]]), math.sqrt(3) / math.sqrt(2 * math.pi), _EXACT),
        ("identical", _pair([2, 2], [[1, 1], [1, 1]]), 2.0, _EXACT),
        ("shifted", _pair([3, 2], [[2, 1], [1, 1]]), 3.0833154, 1e-6),
    ]
    values = {}
    for name, moments, expected, tolerance in cases:
        value = expected_max(moments)
        values[name] = value
        checks.expect(abs(value - expected) <= tolerance, f"{name}: E[max]={value!r}, expected {expected!r}")

    shifted = cases[-1][1]
    low = expected_min(shifted)
    values["shifted min"] = low
    checks.expect(abs(low - 1.9166846) <= 1e-6, f"shifted: E[min]={low!r}, expected 1.9166846")
    checks.details["values"] = values
    return checks.report()


def monte_carlo_suite(options: SuiteOptions) -> SuiteReport:
    """Closed form against a sampled estimate on random instances (4 standard errors)."""
    checks = _Checks("monte-carlo")
    n_max = _pick(options.n, 10)
    samples = _pick(options.samples, 1_000_000)
    rng = np.random.default_rng(options.seed)
    worst = 0.0

    for k in range(_pick(options.instances, 50)):
        n = int(rng.integers(1, n_max + 1))
        mu = rng.uniform(-5.0, 5.0, size=n)
        sigma = random_psd(n, rng) * rng.uniform(0.5, 5.0)
        instance = ProblemInstance(GaussianVector(mu, sigma), FeasibleRegion(n), label=f"mc_{k}")
        x = SelectionPair(rng.integers(0, 2, size=(2, n)))
        value = expected_max(pair_moments(instance.gaussian, x))
        estimate, stderr = monte_carlo(instance, x, samples, options.seed + k)
        allowed = max(4.0 * stderr, _EXACT * max(1.0, abs(value)))
        if stderr > 0:
            worst = max(worst, abs(value - estimate) / stderr)
        checks.expect(abs(value - estimate) <= allowed,
                      f"mc_{k}: closed form {value!r}, estimate {estimate!r} +/- {stderr!r}")

    checks.details.update({"samples": samples, "max_standard_errors": worst})
    return checks.report()


def oracle_suite(options: SuiteOptions) -> SuiteReport:
    """
    Solver optimum against brute force, plus baseline/enhanced comparisons.

    Both models must reach the brute-force optimum within 1e-3; the first
    enhanced RMP optimum must not exceed the first baseline one, and the
    enhanced model must need no more iterations on at least 90% of the
    instances both solve.
    """
    checks = _Checks("oracle")
    backend = get_milp_backend("fallback")
    fewer, paired = 0, 0
    rows = []

    for instance in _knapsack_suite(options, default_n=12, default_count=40):
        optimum = brute_force(instance)
        results = {}
        for model in ("enhanced", "baseline"):
            result = solve(instance, resolve_config(instance, model=model, backend="fallback"), backend)
            results[model] = result
            checks.expect(result.status is SolveStatus.OPTIMAL, f"{instance.label} {model}: status {result.status.value}")
            if result.status is SolveStatus.OPTIMAL:
                checks.expect(_close(result.objective, optimum.best_value, 1e-3),
                              f"{instance.label} {model}: {result.objective!r} vs brute force {optimum.best_value!r}")

        config = resolve_config(instance, backend="fallback")
        ctx, _, _ = build_context(instance, config, backend, time.monotonic() + config.total_time_limit)
        first = {}
        for kind in BoundKind:
            outcome = backend.solve(build_model(instance, ctx, kind), config.rmp_time_limit)
            if outcome.status is OutcomeStatus.OPTIMAL:
                first[kind.value] = outcome.objective_value
        if len(first) == 2:
            checks.expect(first["enhanced"] <= first["baseline"] + _EXACT * max(1.0, abs(first["baseline"])),
                          f"{instance.label}: enhanced RMP {first['enhanced']!r} above baseline {first['baseline']!r}")

        enhanced, baseline = results["enhanced"], results["baseline"]
        if enhanced.status is SolveStatus.OPTIMAL and baseline.status is SolveStatus.OPTIMAL:
            paired += 1
            fewer += int(enhanced.iterations <= baseline.iterations)
        rows.append({
            "instance": instance.label,
            "optimum": optimum.best_value,
            "enhanced_iterations": enhanced.iterations,
            "baseline_iterations": baseline.iterations,
        })

    share = fewer / paired if paired else 0.0
    checks.expect(paired > 0 and share >= 0.9, f"enhanced needed no more iterations on {share:.0%} of paired runs")
    checks.details.update({"instances": rows, "enhanced_not_worse_share": share})
    return checks.report()


def bounds_suite(options: SuiteOptions) -> SuiteReport:
    """
    Bounding functions against the exact objective on every feasible selection.

    Upper bounds (maximize) must be >= E[max], lower bounds (minimize) <= it,
    and the enhanced upper bound must not exceed the baseline one.
    """
    checks = _Checks("bounds")
    violations = {"baseline": 0, "enhanced": 0, "baseline_min": 0, "enhanced_min": 0, "dominance": 0}
    evaluated = 0

    for instance in _knapsack_suite(options, default_n=12, default_count=40):
        batches = list(feasible_batches(instance))
        moments = [batch_pair_moments(instance.gaussian, batch) for batch in batches]
        theta2_max = max(float(m.theta2.max()) for m in moments)
        delta_max = max(float(m.delta.max()) for m in moments)
        preset = resolve_config(instance)
        grid = build_grid(theta2_max, delta_max, preset.d, preset.l)

        for m in moments:
            exact = batch_expected_max(m)
            scale = _EXACT * np.maximum(1.0, np.abs(exact))
            evaluated += exact.size
            upper = {}
            for kind in BoundKind:
                up, _, _ = evaluate_intervals(m.e_high, m.e_low, m.theta2, m.delta, grid, Sense.MAXIMIZE, kind)
                low, _, _ = evaluate_intervals(m.e_high, m.e_low, m.theta2, m.delta, grid, Sense.MINIMIZE, kind)
                upper[kind] = up
                violations[kind.value] += int(np.sum(~(up >= exact - scale)))
                violations[f"{kind.value}_min"] += int(np.sum(~(low <= exact + scale)))
            violations["dominance"] += int(np.sum(
                ~(upper[BoundKind.ENHANCED] <= upper[BoundKind.BASELINE] + scale)
            ))

    for name, count in violations.items():
        checks.expect(count == 0, f"{name}: {count} violations")
    checks.details.update({"evaluated": evaluated, "violations": violations})
    return checks.report()


def svi_suite(options: SuiteOptions) -> SuiteReport:
    """Solving with and without SVIs reaches the same optimum (tolerance 1e-9)."""
    checks = _Checks("svi")
    backend = get_milp_backend("fallback")
    rows = []

    for instance in _knapsack_suite(options, default_n=8, default_count=40):
        results = {}
        for svi in (True, False):
            config = resolve_config(instance, svi=svi, tolerance=_EXACT, backend="fallback")
            results[svi] = solve(instance, config, backend)
        with_svi, without = results[True], results[False]
        if not checks.expect(
            with_svi.status is SolveStatus.OPTIMAL and without.status is SolveStatus.OPTIMAL,
            f"{instance.label}: statuses {with_svi.status.value}/{without.status.value}",
        ):
            continue
        checks.expect(_close(with_svi.objective, without.objective, _EXACT),
                      f"{instance.label}: {with_svi.objective!r} with SVIs, {without.objective!r} without")
        checks.expect(with_svi.iterations <= without.iterations + 1,
                      f"{instance.label}: {with_svi.iterations} iterations with SVIs, {without.iterations} without")
        rows.append({
            "instance": instance.label,
            "objective": with_svi.objective,
            "iterations_svi": with_svi.iterations,
            "iterations_plain": without.iterations,
        })

    checks.details["instances"] = rows
    return checks.report()


def nogood_suite(options: SuiteOptions) -> SuiteReport:
    """Each no-good cut removes exactly its own point (exhaustive over 2x n binaries)."""
    checks = _Checks("nogood")
    n = _pick(options.n, 3)
    size = 2 * n
    codes = np.arange(2 ** size)
    points = ((codes[:, None] >> np.arange(size)[::-1]) & 1).astype(np.int8)

    for k, flat in enumerate(points):
        cut = no_good_cut(SelectionPair.from_flat(flat))
        coefficients = np.zeros(size)
        for i, j, c in cut.terms:
            coefficients[i * n + j] = c
        lhs = points @ coefficients
        removed = np.flatnonzero(~np.array([cut.holds(float(value)) for value in lhs]))
        checks.expect(removed.tolist() == [k], f"cut of point {k} removes {removed.tolist()}")

    checks.details["points"] = int(points.shape[0])
    return checks.report()


def mincut_suite(options: SuiteOptions) -> SuiteReport:
    """The solver optimum of the reduction induces a minimum cut."""
    checks = _Checks("mincut")
    backend = get_milp_backend("fallback")
    vertices = min(_pick(options.vertices, 6), MAX_MINCUT_VERTICES)
    rows = []

    for k in range(_pick(options.graphs, 20)):
        graph = random_graph(vertices, options.seed + k)
        truth = min_cut_brute_force(graph)
        instance = build_mincut_reduction(graph)
        result = solve(instance, resolve_config(instance, tolerance=1e-6, backend="fallback"), backend)
        if not checks.expect(result.status is SolveStatus.OPTIMAL and result.incumbent is not None,
                             f"graph {k}: status {result.status.value}"):
            continue
        weight = reduction_cut_weight(graph, result.incumbent)
        checks.expect(abs(weight - truth.weight) <= _EXACT,
                      f"graph {k}: reduction cut {weight} vs minimum {truth.weight}")
        rows.append({"graph": k, "edges": len(graph.edges), "cut": weight, "minimum": truth.weight,
                     "iterations": result.iterations})

    checks.details.update({"vertices": vertices, "graphs": rows})
    return checks.report()


def theorem2_suite(options: SuiteOptions) -> SuiteReport:
    """Independent makespan: constant theta and matching stochastic/deterministic optima."""
    checks = _Checks("theorem2")
    n = _pick(options.n, 12)
    reports = []
    for k in range(_pick(options.instances, 15)):
        spec = MakespanSpec(n=n, eta=MAKESPAN_ETAS[k % len(MAKESPAN_ETAS)], seed=options.seed + k, correlated=False)
        report = check_theorem2(gen_makespan(spec))
        checks.expect(report.passed, f"instance {k}: {report.model_dump()}")
        reports.append(report.model_dump())
    checks.details["reports"] = reports
    return checks.report()


def theorem3_suite(options: SuiteOptions) -> SuiteReport:
    """Bound within 2.005 of the objective once variances match the delta interval width."""
    checks = _Checks("theorem3")
    n = _pick(options.n, 10)
    reports = []
    for k in range(_pick(options.instances, 10)):
        spec = MakespanSpec(n=n, eta=MAKESPAN_ETAS[k % len(MAKESPAN_ETAS)], seed=options.seed + k, correlated=False)
        report = check_theorem3(gen_makespan(spec))
        checks.expect(report.passed, f"instance {k}: max factor {report.max_factor!r}, "
                                     f"RMP value {report.rmp_value!r} vs optimum {report.optimum!r}")
        reports.append(report.model_dump())
    checks.details.update({
        "reports": reports,
        "max_factor": max((r["max_factor"] for r in reports), default=None),
    })
    return checks.report()


def gap_bound_suite(options: SuiteOptions) -> SuiteReport:
    """enhanced_bound - expected_max <= delta_gap_bound on random moments and intervals."""
    checks = _Checks("gap-bound")
    rng = np.random.default_rng(options.seed)
    count = _pick(options.instances, 10_000)
    violations, worst = 0, -math.inf

    for _ in range(count):
        e2 = rng.uniform(-5.0, 5.0)
        delta = rng.uniform(0.0, 5.0)
        theta = rng.uniform(0.01, 5.0)
        m = PairMoments(e1=e2 + delta, e2=e2, v1=theta * theta, v2=0.0, c12=0.0, delta=delta, theta=theta)
        l_theta = theta * rng.uniform(0.05, 1.0)
        u_theta = theta + rng.uniform(0.0, 2.0)
        l_delta = delta * rng.uniform(0.0, 1.0)
        u_delta = delta + rng.uniform(0.0, 2.0)
        slack = (
            delta_gap_bound(m, l_theta, u_theta, l_delta, u_delta)
            - (enhanced_bound(m, l_theta, u_theta, l_delta, u_delta) - expected_max(m))
        )
        worst = max(worst, -slack)
        violations += int(slack < -_EXACT)

    checks.count = count
    if violations:
        checks.failures.append(f"{violations} of {count} tuples exceed the gap bound")
    checks.details.update({"tuples": count, "violations": violations, "max_excess": worst})
    return checks.report()


def dfs_benchmark_suite(options: SuiteOptions) -> SuiteReport:
    """Solver optimum against the mean-greedy pair of showdown entries."""
    checks = _Checks("dfs-benchmark")
    backend = get_milp_backend("fallback")
    players = _pick(options.n, 8)
    rows = []

    for k in range(_pick(options.instances, 3)):
        # Every player is kept so the contest size is the requested one
        instance, spec = gen_dfs(players, options.seed + k, min_score_filter=0.0)
        _, greedy = dfs_benchmark_pair(instance)
        config = resolve_config(instance, backend="fallback")
        result = solve(instance, config, backend)
        if not checks.expect(result.status is SolveStatus.OPTIMAL, f"{instance.label}: status {result.status.value}"):
            continue
        try:
            decode_rosters(spec, result.incumbent)
            legal = True
        except GaussMaxError:
            legal = False
        checks.expect(legal, f"{instance.label}: incumbent is not two legal rosters")
        checks.expect(result.objective >= greedy - config.tolerance * abs(result.ub),
                      f"{instance.label}: solver {result.objective!r} below greedy pair {greedy!r}")
        rows.append({
            "instance": instance.label,
            "solver": result.objective,
            "greedy": greedy,
            "improvement_pct": 100.0 * (result.objective - greedy) / abs(greedy) if greedy else None,
        })

    checks.details["instances"] = rows
    return checks.report()


SUITES: Dict[str, Callable[[SuiteOptions], SuiteReport]] = {
    "closed-form": closed_form_suite,
    "monte-carlo": monte_carlo_suite,
    "oracle": oracle_suite,
    "bounds": bounds_suite,
    "svi": svi_suite,
    "nogood": nogood_suite,
    "mincut": mincut_suite,
    "theorem2": theorem2_suite,
    "theorem3": theorem3_suite,
    "gap-bound": gap_bound_suite,
    "dfs-benchmark": dfs_benchmark_suite,
}


def run_suite(name: str, options: Optional[SuiteOptions] = None) -> SuiteReport:
    """
    Run a suite by name.

    Raises:
        KeyError: If the suite is unknown
    """
    suite = SUITES[name]
    report = suite(options or SuiteOptions())
    log_with_context(logger, "info", "Suite finished", suite=name, passed=report.passed,
                     checks=report.checks, failures=len(report.failures))
    return report
