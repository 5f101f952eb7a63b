"""
Shared constants used across the application.
"""
import math

PACKAGE_NAME = "gaussmax"
PACKAGE_VERSION = "1.0.0"

# Normal distribution
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
INV_SQRT_2EPI = 1.0 / math.sqrt(2.0 * math.e * math.pi)

# Numerical tolerances
FEASIBILITY_TOLERANCE = 1e-9
PSD_TOLERANCE = 1e-8
THETA_CLAMP_TOLERANCE = 1e-9
MILP_GAP = 1e-6
MILP_FEASIBILITY_TOLERANCE = 1e-6
BISECTION_TOLERANCE = 1e-9
MONOTONE_TOLERANCE = 1e-9

# Cutting-plane defaults
DEFAULT_TOLERANCE = 0.001
DEFAULT_BOUND_TIME_LIMIT = 120.0
DEFAULT_HEURISTIC_TIME_LIMIT = 60.0
DEFAULT_TOTAL_TIME_LIMIT = 600.0
DEFAULT_RMP_TIME_LIMIT = 600.0
HEURISTIC_TOP_SHARE = 0.9

# Enumeration limits
DEFAULT_ENUMERATION_LIMIT = 5_000_000
MAX_MINCUT_VERTICES = 20
MAX_EXACT_MAKESPAN_JOBS = 24

# Application generators
KNAPSACK_CAPACITY = 40
KNAPSACK_WEIGHT_RANGE = (1, 19)
KNAPSACK_MEAN_RANGE = (15.0, 25.0)
KNAPSACK_ALPHAS = (50.0, 100.0, 150.0, 200.0, 250.0)
MAKESPAN_MEAN = 20.0
MAKESPAN_VARIANCE = 9.0
MAKESPAN_VARIANCE_SHARE = 0.1
MAKESPAN_CLUSTERS = (1, 2, 3)
MAKESPAN_ETAS = (0.25, 0.5, 0.75)
DFS_FLEX_SLOTS = 5
DFS_CAPTAIN_SLOTS = 1
DFS_CAPTAIN_FACTOR = 1.5
DFS_MIN_SCORE = 5.0

# Makespan approximation check
THEOREM3_FACTOR = 2.005

# Retry policy (external solver)
MAX_RETRIES = 3
RETRY_BACKOFF_FACTOR = 2
RETRY_MIN_WAIT = 1
RETRY_MAX_WAIT = 10

# CLI exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_TIME_LIMIT = 3
EXIT_INFEASIBLE = 4
