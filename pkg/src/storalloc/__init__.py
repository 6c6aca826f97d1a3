"""Storage allocation over unreliable heterogeneous nodes.

Evaluate exact and Monte Carlo recovery-failure probabilities, compute
analytic tail bounds, and solve for allocations under a storage budget.
"""

from .bounds import (
    BoundMinimum,
    BoundReport,
    bound_report,
    chernoff_log_bound,
    chernoff_log_derivative,
    closed_form_bound,
    hoeffding_bound,
    minimize_bound_over_t,
    spreading_bound,
)
from .chernoff import (
    ClosedFormResult,
    OddsProfile,
    R2Solution,
    closed_form_allocation,
    default_t,
    iterative_chernoff,
    odds_profile,
    solve_r2_fixed_t,
)
from .evaluate import (
    ReliabilityEstimate,
    exact_failure_prob,
    monte_carlo_failure_prob,
)
from .hoeffding import (
    HoeffdingSolution,
    feasibility_margin,
    solve_h1,
)
from .model import (
    Allocation,
    SystemProfile,
    in_region_hp,
    is_reliable,
    make_profile,
    reduce_to_unit_box,
    spread_allocation,
)

__all__ = [
    "Allocation",
    "BoundMinimum",
    "BoundReport",
    "ClosedFormResult",
    "HoeffdingSolution",
    "OddsProfile",
    "R2Solution",
    "ReliabilityEstimate",
    "SystemProfile",
    "bound_report",
    "chernoff_log_bound",
    "chernoff_log_derivative",
    "closed_form_allocation",
    "closed_form_bound",
    "default_t",
    "exact_failure_prob",
    "feasibility_margin",
    "hoeffding_bound",
    "in_region_hp",
    "is_reliable",
    "iterative_chernoff",
    "make_profile",
    "minimize_bound_over_t",
    "monte_carlo_failure_prob",
    "odds_profile",
    "reduce_to_unit_box",
    "solve_h1",
    "solve_r2_fixed_t",
    "spread_allocation",
    "spreading_bound",
]
