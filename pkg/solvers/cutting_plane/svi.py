"""
Supervalid inequalities linking delta intervals to theta floors.

Given a known objective value z_lb and an upper bound u_bar on E[Z1(x)],
any selection with delta(x) >= delta_h that can still beat z_lb needs
theta(x) at least svi_theta_floor(delta_h, z_lb, u_bar).
"""
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from shared.config.constants import BISECTION_TOLERANCE
from shared.errors import ModelError, PreconditionError
from shared.logging.logger import setup_logger, log_with_context
from solvers.cutting_plane.grid import DiscretizationGrid
from solvers.cutting_plane.rmp import RmpCompletion
from tools.gaussian.normal import phi_term
from tools.instances.region import Relation
from tools.milp.model import MilpModel

logger = setup_logger(__name__)

# Largest theta tried when no grid cap is given
_THETA_CEILING = 1e150


def svi_theta_floor(delta: float, z_lb: float, u_bar: float, theta_max: Optional[float] = None) -> float:
    """
    Smallest theta >= 0 with u_bar + theta * phi(delta / theta) >= z_lb.

    The returned value is a lower bracket of the bisection, so it never
    exceeds the true minimum.

    Args:
        delta: Nonnegative mean difference
        z_lb: Known objective value
        u_bar: Upper bound on E[Z1(x)]
        theta_max: Optional cap on theta(x); +inf is returned when even the
            cap cannot reach z_lb

    Returns:
        The floor, 0.0 when z_lb <= u_bar, or math.inf
    """
    if delta < 0:
        raise PreconditionError(f"delta must be nonnegative, got {delta}")
    target = z_lb - u_bar
    if target <= 0:
        return 0.0

    def shortfall(theta: float) -> float:
        return phi_term(theta, delta) - target

    ceiling = _THETA_CEILING if theta_max is None else float(theta_max)
    if ceiling <= 0 or shortfall(ceiling) < 0:
        return math.inf

    high = min(1.0, ceiling)
    while shortfall(high) < 0:
        high = min(2.0 * high, ceiling)

    root = bisect(shortfall, 0.0, high, xtol=BISECTION_TOLERANCE)
    floor = max(0.0, root - 2.0 * BISECTION_TOLERANCE)
    while floor > 0 and shortfall(floor) >= 0:
        floor = max(0.0, floor - 2.0 * BISECTION_TOLERANCE)
    return floor


def compute_theta_floors(grid: DiscretizationGrid, z_lb: float, u_bar: float) -> List[float]:
    """
    Floors for every delta interval, evaluated at the interval's lower end.

    Floors are made nondecreasing in h; infinite floors mark intervals that
    no selection reaching z_lb can occupy.
    """
    theta_max = math.sqrt(grid.theta2_max)
    floors = [svi_theta_floor(float(delta), z_lb, u_bar, theta_max) for delta in grid.delta_breaks[:-1]]
    return [float(f) for f in np.maximum.accumulate(floors)]


def add_svi_constraints(model: MilpModel, floors: Sequence[float]) -> int:
    """Add s >= floor_h^2 y_h (or y_h <= 0 for infinite floors); returns the count added."""
    added = 0
    for h, floor in enumerate(floors):
        y = f"y_{h}"
        if math.isinf(floor):
            model.add_constraint({y: 1.0}, Relation.LE, 0.0, name=f"svi_{h}")
        else:
            model.add_constraint({"s": 1.0, y: -floor * floor}, Relation.GE, 0.0, name=f"svi_{h}")
        added += 1
    return added


def attach_svis(model: MilpModel, grid: DiscretizationGrid, floors: Sequence[float]) -> MilpModel:
    """
    Attach one SVI per delta interval to an enhanced RMP.

    Raises:
        ModelError: If the model has no delta interval variables
        PreconditionError: If floors do not match the grid
    """
    if len(floors) != grid.l:
        raise PreconditionError(f"expected {grid.l} floors, got {len(floors)}")
    if "y_0" not in model.variable_names:
        raise ModelError("SVIs need an enhanced RMP with delta interval variables")

    add_svi_constraints(model, floors)
    if isinstance(model.completion, RmpCompletion):
        model.set_selection(model.selection, model.completion.with_floors(tuple(floors)))

    blocked = sum(1 for f in floors if math.isinf(f))
    log_with_context(logger, "info", "SVIs attached", count=len(floors), blocked_intervals=blocked,
                     max_floor=max((f for f in floors if math.isfinite(f)), default=0.0))
    return model
