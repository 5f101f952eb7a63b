"""
Showdown fantasy contests with two entries.

Columns 0..n'-1 are the flex versions of the players and n'..2n'-1 their
captain versions, in the same player order. A captain scores 1.5 times
the player's points, so its mean is scaled by 1.5 and its covariances by
1.5 (with flex) or 2.25 (with another captain).
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from shared.config.constants import DFS_CAPTAIN_FACTOR, DFS_CAPTAIN_SLOTS, DFS_FLEX_SLOTS
from shared.errors import DimensionMismatchError, InfeasibleRegionError, PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from shared.models.applications import DfsSpec
from tools.gaussian.moments import expected_max, pair_moments
from tools.gaussian.types import GaussianVector, SelectionPair
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.region import FeasibleRegion, LinearConstraint, Relation, row_constraint
from tools.milp.fallback import SelectionEnumerator

logger = setup_logger(__name__)

ROSTER_SIZE = DFS_FLEX_SLOTS + DFS_CAPTAIN_SLOTS


@dataclass(frozen=True)
class Roster:
    """One legal entry: five flex players and a captain (player indices)."""
    flex: Tuple[int, ...]
    captain: int

    @property
    def players(self) -> frozenset:
        return frozenset(self.flex) | {self.captain}


def _entry_constraints(spec: DfsSpec, row: int) -> List[LinearConstraint]:
    p = spec.n_players
    constraints = [
        row_constraint(row, {j: 1.0 for j in range(p)}, Relation.EQ, DFS_FLEX_SLOTS, name=f"flex_{row}"),
        row_constraint(row, {p + j: 1.0 for j in range(p)}, Relation.EQ, DFS_CAPTAIN_SLOTS, name=f"captain_{row}"),
    ]
    for j in range(p):
        constraints.append(
            row_constraint(row, {j: 1.0, p + j: 1.0}, Relation.LE, 1.0, name=f"once_{row}_{j}")
        )
    for team in (1, 2):
        members = [j for j in range(p) if spec.team_of[j] == team]
        coefficients = {j: 1.0 for j in members}
        coefficients.update({p + j: 1.0 for j in members})
        constraints.append(row_constraint(row, coefficients, Relation.GE, 1.0, name=f"team{team}_{row}"))
    return constraints


def dfs_region(spec: DfsSpec) -> FeasibleRegion:
    """
    Roster rules for both entries over the 2n' flex-then-captain columns.

    Raises:
        PreconditionError: If fewer than six players are available
    """
    if spec.n_players < ROSTER_SIZE:
        raise PreconditionError(f"a showdown entry needs {ROSTER_SIZE} players, got {spec.n_players}")
    return FeasibleRegion(2 * spec.n_players, tuple(_entry_constraints(spec, 0) + _entry_constraints(spec, 1)))


def filter_players(spec: DfsSpec, flex_mu: Sequence[float]) -> Tuple[DfsSpec, np.ndarray]:
    """
    Drop players projected below spec.min_score_filter.

    Returns:
        (spec over the kept players, kept player indices)

    Raises:
        PreconditionError: If the kept players cannot fill a roster or a team is empty
    """
    flex_mu = np.asarray(flex_mu, dtype=float)
    if flex_mu.shape != (spec.n_players,):
        raise DimensionMismatchError(f"expected {spec.n_players} projections, got shape {flex_mu.shape}")
    kept = np.flatnonzero(flex_mu >= spec.min_score_filter)
    teams = [spec.team_of[j] for j in kept]
    if kept.size < ROSTER_SIZE or set(teams) != {1, 2}:
        raise PreconditionError(
            f"{kept.size} players score at least {spec.min_score_filter}; "
            f"need {ROSTER_SIZE} covering both teams"
        )
    return DfsSpec(n_players=int(kept.size), team_of=teams, min_score_filter=spec.min_score_filter), kept


def build_dfs_instance(
    spec: DfsSpec,
    flex_mu: Sequence[float],
    flex_sigma: np.ndarray,
    label: str = "",
    seed: Optional[int] = None,
) -> Tuple[ProblemInstance, DfsSpec]:
    """
    Two-entry maximization instance from flex projections and covariances.

    Returns:
        (instance, spec over the players that passed the score filter); pass
        the returned spec to decode_rosters
    """
    flex_sigma = np.asarray(flex_sigma, dtype=float)
    if flex_sigma.shape != (spec.n_players, spec.n_players):
        raise DimensionMismatchError(f"flex sigma must be {spec.n_players}x{spec.n_players}")
    kept_spec, kept = filter_players(spec, flex_mu)
    mu = np.asarray(flex_mu, dtype=float)[kept]
    sigma = flex_sigma[np.ix_(kept, kept)]

    factor = DFS_CAPTAIN_FACTOR
    full_mu = np.concatenate([mu, factor * mu])
    full_sigma = np.block([
        [sigma, factor * sigma],
        [factor * sigma, factor * factor * sigma],
    ])
    instance = ProblemInstance(
        gaussian=GaussianVector(full_mu, full_sigma),
        region=dfs_region(kept_spec),
        sense=Sense.MAXIMIZE,
        label=label or f"dfs_p{kept_spec.n_players}",
        family="dfs",
        seed=seed,
    )
    log_with_context(logger, "debug", "DFS instance built", label=instance.label,
                     players=spec.n_players, kept=kept_spec.n_players)
    return instance, kept_spec


def gen_dfs(n_players: int, seed: int, min_score_filter: Optional[float] = None) -> Tuple[ProblemInstance, DfsSpec]:
    """
    Synthetic showdown contest.

    Projections are U(1, 25), standard deviations half the projection.
    Scores load on a per-team factor and on a game factor with opposite
    signs for the two teams, so teammates correlate positively and
    opponents negatively.
    """
    teams_rng, means_rng, loadings_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)
    )
    team_of = np.where(np.arange(n_players) % 2 == 0, 1, 2)
    teams_rng.shuffle(team_of)
    mu = means_rng.uniform(1.0, 25.0, size=n_players)

    team_loading = loadings_rng.uniform(0.1, 0.5, size=n_players)
    game_loading = loadings_rng.uniform(0.1, 0.5, size=n_players) * np.where(team_of == 1, 1.0, -1.0)
    loadings = np.zeros((n_players, 3))
    loadings[team_of == 1, 0] = team_loading[team_of == 1]
    loadings[team_of == 2, 1] = team_loading[team_of == 2]
    loadings[:, 2] = game_loading
    correlation = loadings @ loadings.T
    np.fill_diagonal(correlation, 1.0)
    std = 0.5 * mu
    sigma = correlation * np.outer(std, std)
    sigma = 0.5 * (sigma + sigma.T)

    spec_values = {"n_players": n_players, "team_of": [int(t) for t in team_of]}
    if min_score_filter is not None:
        spec_values["min_score_filter"] = min_score_filter
    spec = DfsSpec(**spec_values)
    return build_dfs_instance(spec, mu, sigma, label=f"dfs_p{n_players}_s{seed}", seed=seed)


def decode_rosters(spec: DfsSpec, x: SelectionPair) -> Tuple[Roster, Roster]:
    """
    Turn a selection into two rosters.

    Raises:
        PreconditionError: If a row is not a legal entry
    """
    p = spec.n_players
    if x.n != 2 * p:
        raise DimensionMismatchError(f"selection has n={x.n}, contest has {2 * p} columns")
    rosters = []
    for i in range(2):
        flex = tuple(int(j) for j in np.flatnonzero(x.x[i, :p]))
        captains = np.flatnonzero(x.x[i, p:])
        if len(flex) != DFS_FLEX_SLOTS or captains.size != DFS_CAPTAIN_SLOTS:
            raise PreconditionError(f"entry {i} does not have {DFS_FLEX_SLOTS} flex players and one captain")
        captain = int(captains[0])
        if captain in flex:
            raise PreconditionError(f"entry {i} uses player {captain} as flex and captain")
        teams = {spec.team_of[j] for j in flex + (captain,)}
        if teams != {1, 2}:
            raise PreconditionError(f"entry {i} does not cover both teams")
        rosters.append(Roster(flex, captain))
    return rosters[0], rosters[1]


def _single_entries(instance: ProblemInstance) -> np.ndarray:
    """Every legal first-row entry, as (K, n) 0/1 rows in lexicographic order."""
    n = instance.n
    row_constraints = [c for c in instance.region.constraints if all(i == 0 for i, _, _ in c.terms)]
    matrix = np.zeros((len(row_constraints), n))
    for k, constraint in enumerate(row_constraints):
        for _, j, c in constraint.terms:
            matrix[k, j] = c
    enumerator = SelectionEnumerator(
        size=n,
        matrix=matrix,
        relations=[c.relation for c in row_constraints],
        rhs=np.array([c.rhs for c in row_constraints]),
        allowed=[(0, 1)] * n,
    )
    batches = list(enumerator.batches(np.inf))
    if not batches:
        raise InfeasibleRegionError("no legal entry exists")
    return np.vstack(batches)


def dfs_benchmark_pair(instance: ProblemInstance) -> Tuple[SelectionPair, float]:
    """
    The mean-greedy comparison entries.

    The first entry maximizes expected points; the second maximizes
    expected points among entries whose player set differs from the first.

    Returns:
        (selection, exact E[max] of the pair)
    """
    entries = _single_entries(instance)
    p = instance.n // 2
    means = entries @ instance.gaussian.mu
    first = int(np.argmax(means))

    players = entries[:, :p] | entries[:, p:]
    different = np.any(players != players[first], axis=1)
    if not different.any():
        raise InfeasibleRegionError("every legal entry uses the same players")
    candidates = np.where(different, means, -np.inf)
    second = int(np.argmax(candidates))

    x = SelectionPair.from_rows(entries[first], entries[second])
    value = expected_max(pair_moments(instance.gaussian, x))
    log_with_context(logger, "debug", "DFS benchmark pair", label=instance.label,
                     first_mean=float(means[first]), second_mean=float(means[second]), value=value)
    return x, value
