"""
Configuration settings for the tancat tangent-category engine.
"""

import os

# Groebner Settings
DEFAULT_STEP_BUDGET = 1_000_000  # S-polynomial reductions before Buchberger gives up
STEP_BUDGET_ENV = "TANCAT_STEP_BUDGET"
MONOMIAL_ORDER = "grevlex"  # The only order the engine implements

# Naming Settings
DUAL_VAR = "eps"  # Nilpotent added by one level of dual numbers
WIDTH_VAR = "eps_{j}"  # Nilpotents of the n-fold pullback T_n
KAHLER_PREFIX = "d_"  # First-level differentials; deeper levels insert "p"
MODULE_VAR = "u_{k}"  # Default module generator names (1-based)
COLLISION_SEPARATOR = "__"  # name, name__2, name__3 on collision

# Checker Settings
CHECKER_WORKERS = int(os.environ.get("TANCAT_CHECKER_WORKERS", "1"))

# CLI Settings
DEFAULT_FORMAT = "text"
DEFAULT_SIDE = "ring"

# Logging Settings
LOG_LEVEL = os.environ.get("TANCAT_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def step_budget() -> int:
    """Returns the Buchberger step budget, honouring TANCAT_STEP_BUDGET."""
    return int(os.environ.get(STEP_BUDGET_ENV, DEFAULT_STEP_BUDGET))
