"""Exact and Monte Carlo evaluation of the recovery-failure probability.

Failure probability of an allocation x is P[sum_{i in r} x_i < 1] where r
is the random set of surviving nodes.  Small instances are enumerated
exactly; uniform allocations of any size go through a survivor-count DP;
everything else is estimated by seeded Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .model import Allocation, SystemProfile, _check_dims

# Success is declared at accessed mass >= 1 - TIE_EPS so allocations that
# hit the threshold exactly are not destroyed by floating-point dust.
TIE_EPS = 1e-12
DEFAULT_ENUM_LIMIT = 25

MC_GENERATOR = "philox4x64"  # fixed algorithm id recorded in MC estimates
_MC_BLOCK = 1 << 15  # trials per PRNG block; streams keyed by (seed, block)
_ENUM_TABLE_BITS = 20  # low-half table size for subset enumeration


@dataclass(frozen=True)
class ReliabilityEstimate:
    """A failure-probability value plus how it was obtained."""

    value: float
    method: str  # exact-enum | exact-dp | monte-carlo
    half_width: float = 0.0  # 95% confidence half-width; 0 for exact methods
    trials: int = 0
    generator: str = ""

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"probability {self.value} outside [0, 1]")
        if self.half_width < 0.0:
            raise ValueError("half_width must be >= 0")
        if self.method.startswith("exact") and self.half_width != 0.0:
            raise ValueError("exact methods carry no confidence interval")


def _subset_table(probs: np.ndarray, amounts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All 2^k subset sums of `amounts` with their probabilities, by doubling."""
    sums = np.zeros(1)
    mass = np.ones(1)
    for p, x in zip(probs, amounts):
        sums = np.concatenate([sums, sums + x])
        mass = np.concatenate([mass * (1.0 - p), mass * p])
    return sums, mass


def _enum_failure_prob(probs: np.ndarray, amounts: np.ndarray) -> float:
    """Exact P[Z < 1] by iterating every survive/fail outcome.

    The low `_ENUM_TABLE_BITS` nodes are tabulated once and sorted; the
    remaining nodes are walked as explicit bitmasks, so memory stays flat
    while all 2^n subsets are still accounted for.
    """
    n = probs.size
    k = min(n, _ENUM_TABLE_BITS)
    lo_sums, lo_mass = _subset_table(probs[:k], amounts[:k])
    order = np.argsort(lo_sums, kind="stable")
    lo_sums = lo_sums[order]
    lo_cum = np.cumsum(lo_mass[order])

    hi_probs = probs[k:]
    hi_amounts = amounts[k:]
    m = n - k
    threshold = 1.0 - TIE_EPS
    fail = 0.0
    for bits in range(1 << m):
        hi_sum = 0.0
        hi_mass = 1.0
        for j in range(m):
            if bits >> j & 1:
                hi_sum += hi_amounts[j]
                hi_mass *= hi_probs[j]
            else:
                hi_mass *= 1.0 - hi_probs[j]
        idx = int(np.searchsorted(lo_sums, threshold - hi_sum, side="left"))
        if idx > 0:
            fail += hi_mass * lo_cum[idx - 1]
    return min(1.0, fail)


def _uniform_failure_prob(probs: np.ndarray, per_node: float) -> float:
    """Exact P[Z < 1] when every node stores `per_node`, via the count DP.

    Recovery needs at least ceil((1 - TIE_EPS) / per_node) survivors; the
    survivor count follows the heterogeneous-Bernoulli (Poisson binomial)
    distribution, whose lower tail is an O(n * needed) recurrence.
    """
    n = probs.size
    if per_node <= 0.0:
        return 1.0
    needed = math.ceil((1.0 - TIE_EPS) / per_node)
    if needed > n:
        return 1.0
    # dp[j] = P[j survivors among nodes processed so far], j < needed
    dp = np.zeros(needed)
    dp[0] = 1.0
    for p in probs:
        dp[1:] = dp[1:] * (1.0 - p) + dp[:-1] * p
        dp[0] *= 1.0 - p
    return float(min(1.0, dp.sum()))


def exact_failure_prob(
    profile: SystemProfile,
    allocation: Allocation,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> ReliabilityEstimate:
    """Exact failure probability by enumeration or, for uniform x, the count DP.

    Non-uniform allocations with n > enum_limit are rejected: the 2^n walk
    is the only exact route and it stops being desk-scale there.
    """
    _check_dims(profile, allocation)
    x = allocation.amounts
    if float(x.max()) == float(x.min()):
        value = _uniform_failure_prob(profile.probs, float(x[0]))
        return ReliabilityEstimate(value=value, method="exact-dp")
    if profile.n > enum_limit:
        raise ValueError(
            f"exact evaluation of a non-uniform allocation needs n <= {enum_limit}, got {profile.n}"
        )
    value = _enum_failure_prob(profile.probs, x)
    return ReliabilityEstimate(value=value, method="exact-enum")


def monte_carlo_failure_prob(
    profile: SystemProfile,
    allocation: Allocation,
    trials: int,
    seed: int,
) -> ReliabilityEstimate:
    """Unbiased Monte Carlo estimate of the failure probability.

    Trials are partitioned into fixed-size blocks, the stream of block b
    keyed by (seed, b) on a counter-based Philox generator, so the result
    is bit-identical for a given (seed, trials, profile, allocation) no
    matter how blocks are scheduled.
    """
    _check_dims(profile, allocation)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    probs = profile.probs
    x = allocation.amounts
    threshold = 1.0 - TIE_EPS
    fails = 0
    done = 0
    block = 0
    while done < trials:
        size = min(_MC_BLOCK, trials - done)
        rng = Generator(Philox(SeedSequence((seed, block))))
        survived = rng.random((size, probs.size)) < probs
        z = survived @ x
        fails += int(np.count_nonzero(z < threshold))
        done += size
        block += 1
    est = fails / trials
    var = est * (1.0 - est)
    half_width = 1.96 * math.sqrt(var / trials)
    return ReliabilityEstimate(
        value=est,
        method="monte-carlo",
        half_width=half_width,
        trials=trials,
        generator=MC_GENERATOR,
    )
