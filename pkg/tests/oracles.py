"""Brute-force reference computations used to freeze expected test values.

Everything here enumerates the 2^n survive/fail outcomes directly with
itertools, independent of the library's evaluation paths, so it stays a
valid cross-check no matter how those paths are implemented.  Only
sensible for n up to ~15.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def outcome_weights(probs) -> list[tuple[tuple[int, ...], float]]:
    """All survivor subsets with their probabilities; weights sum to 1."""
    probs = list(map(float, probs))
    n = len(probs)
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        w = 1.0
        for b, p in zip(bits, probs):
            w *= p if b else 1.0 - p
        out.append((bits, w))
    return out


def brute_failure_prob(probs, amounts, cutoff: float = 1.0 - 1e-12,
                       inclusive: bool = False) -> float:
    """P[accessed mass < cutoff] (or <= cutoff when inclusive) by enumeration."""
    amounts = list(map(float, amounts))
    total = 0.0
    for bits, w in outcome_weights(probs):
        z = sum(x for b, x in zip(bits, amounts) if b)
        if z < cutoff or (inclusive and z <= cutoff):
            total += w
    return total


def brute_chernoff_subset_sum(probs, amounts, t: float) -> float:
    """Tilted-indicator bound as an explicit sum over all survivor subsets."""
    amounts = list(map(float, amounts))
    total = 0.0
    for bits, w in outcome_weights(probs):
        z = sum(x for b, x in zip(bits, amounts) if b)
        total += w * math.exp(-t * (z - 1.0))
    return total


def random_box_instance(rng: np.random.Generator, n_max: int = 12,
                        p_lo: float = 0.02, p_hi: float = 0.98):
    """A random profile-sized instance with amounts drawn inside the unit box."""
    n = int(rng.integers(1, n_max + 1))
    probs = rng.uniform(p_lo, p_hi, n)
    amounts = rng.uniform(0.0, 1.0, n)
    return probs, amounts


def grid_min_log_bound(probs, T: float, t: float, steps: int = 200) -> float:
    """Brute grid over the 3-node box-simplex; best log tilt bound found."""
    probs = np.asarray(probs, dtype=float)
    assert probs.size == 3
    xs = np.linspace(0.0, 1.0, steps + 1)
    x1, x2 = np.meshgrid(xs, xs, indexing="ij")
    x3 = T - x1 - x2
    ok = (x3 >= 0.0) & (x3 <= 1.0)
    pts = np.stack([x1[ok], x2[ok], x3[ok]], axis=1)
    vals = t + np.sum(np.log(1.0 - probs + probs * np.exp(-t * pts)), axis=1)
    return float(vals.min())
