"""Problem-instance types and reliability-region predicates.

A storage system is a set of n nodes, node i surviving an access attempt
independently with probability p_i.  A unit-size file is erasure-coded and
x_i units are placed on node i subject to a total budget T; recovery
succeeds when the surviving nodes together hold at least one unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BUDGET_TOL = 1e-10  # relative tolerance on budget-equality constraints

STRATEGIES = (
    "spread",
    "chernoff-closed-form",
    "hoeffding",
    "chernoff-iterative",
    "custom",
)


def _as_float_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SystemProfile:
    """Per-node access probabilities and the total storage budget."""

    probs: np.ndarray
    budget: float

    def __post_init__(self):
        probs = _as_float_vector(self.probs, "probs")
        object.__setattr__(self, "probs", probs)
        for i, p in enumerate(probs):
            if not (0.0 < p < 1.0):
                raise ValueError(
                    f"access probability at index {i} is {p}; must lie strictly in (0, 1)"
                )
        budget = float(self.budget)
        if not np.isfinite(budget) or budget <= 0.0:
            raise ValueError(f"budget must be positive and finite, got {budget}")
        object.__setattr__(self, "budget", budget)

    @property
    def n(self) -> int:
        return self.probs.size

    @property
    def p_bar(self) -> float:
        """Average access probability across all nodes."""
        return float(self.probs.mean())

    @property
    def p_max(self) -> float:
        return float(self.probs.max())


@dataclass(frozen=True)
class Allocation:
    """Nonnegative per-node storage amounts with strategy provenance."""

    amounts: np.ndarray
    strategy: str = "custom"

    def __post_init__(self):
        amounts = _as_float_vector(self.amounts, "amounts")
        object.__setattr__(self, "amounts", amounts)
        if not np.all(np.isfinite(amounts)):
            raise ValueError("allocation amounts must be finite")
        neg = np.flatnonzero(amounts < 0.0)
        if neg.size:
            raise ValueError(
                f"allocation amount at index {neg[0]} is {amounts[neg[0]]}; must be >= 0"
            )
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy tag {self.strategy!r}; expected one of {STRATEGIES}"
            )

    @property
    def total(self) -> float:
        return float(self.amounts.sum())


def make_profile(probs, budget) -> SystemProfile:
    """Validate and build a SystemProfile from any float sequence."""
    return SystemProfile(probs=np.asarray(probs, dtype=np.float64), budget=budget)


def _check_dims(profile: SystemProfile, allocation: Allocation) -> None:
    if allocation.amounts.size != profile.n:
        raise ValueError(
            f"allocation has {allocation.amounts.size} entries, profile has {profile.n} nodes"
        )


def is_reliable(profile: SystemProfile, allocation: Allocation) -> bool:
    """True iff the expected accessed mass p.x reaches the file size (>= 1)."""
    _check_dims(profile, allocation)
    return float(profile.probs @ allocation.amounts) >= 1.0


def in_region_hp(profile: SystemProfile) -> tuple[bool, Allocation | None]:
    """Test whether any reliable allocation fits the budget.

    Returns (True, witness) when budget >= 1/p_max: the witness puts mass
    1/p_max on the first argmax node and zero elsewhere.  Returns
    (False, None) otherwise.
    """
    p_max = profile.p_max
    if profile.budget * p_max < 1.0:
        return False, None
    j = int(np.argmax(profile.probs))  # ties: lowest index
    amounts = np.zeros(profile.n)
    amounts[j] = 1.0 / p_max
    return True, Allocation(amounts=amounts, strategy="custom")


def reduce_to_unit_box(profile: SystemProfile, allocation: Allocation) -> Allocation:
    """Map a feasible allocation into the unit box with the budget spent exactly.

    Caps each amount at 1, then pours the leftover budget into uncapped
    nodes in descending-probability order (ties: lowest index), filling
    each to 1 before moving on.  Mass only ever moves to more-reliable
    nodes, so the failure probability cannot increase.
    """
    _check_dims(profile, allocation)
    T = profile.budget
    n = profile.n
    if T > n:
        raise ValueError(f"budget {T} exceeds node count {n}; unit box is empty")
    x = allocation.amounts
    if float(x.sum()) > T * (1.0 + BUDGET_TOL):
        raise ValueError(f"allocation spends {x.sum()}, exceeding budget {T}")

    out = np.minimum(x, 1.0)
    leftover = T - float(out.sum())
    if leftover > 0.0:
        # stable sort on -p keeps lowest index first among ties
        for i in np.argsort(-profile.probs, kind="stable"):
            room = 1.0 - out[i]
            if room <= 0.0:
                continue
            add = min(room, leftover)
            out[i] += add
            leftover -= add
            if leftover <= 0.0:
                break
    return Allocation(amounts=out, strategy=allocation.strategy)


def spread_allocation(profile: SystemProfile) -> Allocation:
    """Maximal spreading: the budget split evenly across all nodes."""
    n = profile.n
    return Allocation(amounts=np.full(n, profile.budget / n), strategy="spread")
