"""Smallest certified failure level via the quadratic-tail feasibility region.

An allocation x is certified at level eps when p.x - 1 >= c(eps) ||x||
with c(eps) = sqrt(ln(1/eps)/2).  Emptiness of that region is decided by
maximizing the concave margin f(x) = p.x - 1 - c ||x|| over the budget
simplex; bisection on log(eps) then locates the smallest certifiable
level.  Bisection runs on the log scale because the optimum is
exponentially small in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Allocation, SystemProfile

MARGIN_TOL = 1e-8  # slack allowed on the cone inequality at acceptance
_PG_TOL = 1e-9
_MAX_ITERS = 10_000
EPS_LO_DEFAULT = 1e-300
EPS_HI_DEFAULT = 1.0 - 1e-9


@dataclass(frozen=True)
class HoeffdingSolution:
    epsilon_star: float
    allocation: Allocation
    margin: float  # value of p.x - 1 - c ||x|| at the returned allocation
    bisection_steps: int
    oracle_calls: int
    oracle_iterations: int
    certified: bool  # False means no level below eps_hi could be certified


def project_onto_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = total}."""
    u = np.sort(v)[::-1]
    shifted = np.cumsum(u) - total
    ks = np.arange(1, v.size + 1)
    k = int(np.nonzero(u - shifted / ks > 0)[0][-1]) + 1
    tau = shifted[k - 1] / k
    return np.maximum(v - tau, 0.0)


def _margin_value(p: np.ndarray, c: float, x: np.ndarray) -> float:
    return float(p @ x) - 1.0 - c * float(np.sqrt(x @ x))


def _stationarity_gap(p: np.ndarray, c: float, x: np.ndarray) -> float:
    """Deviation from the optimal shape x_i proportional to max(p_i - mu, 0).

    At a maximizer the gradient p - c x/||x|| is constant on the support
    and no larger off it; the gap is the worst violation of that pattern.
    """
    g = p - c * x / float(np.sqrt(x @ x))
    support = x > 0.0
    mu = float(g[support].mean())
    gap = float(np.abs(g[support] - mu).max())
    if not support.all():
        gap = max(gap, float((g[~support] - mu).max()), 0.0)
    return gap


def _maximize_margin(
    profile: SystemProfile, c: float, max_iters: int = _MAX_ITERS
) -> tuple[float, np.ndarray, int, bool]:
    """Projected gradient ascent on the margin over the budget simplex.

    Starts from the best of the uniform and top-k initializers.  Each
    round also tries snapping to the stationary shape max(p - mu, 0)
    rescaled to the budget, which usually lands the exact optimum once
    the support settles.
    """
    p = profile.probs
    T = profile.budget
    n = profile.n

    order = np.argsort(-p, kind="stable")
    best_x = np.full(n, T / n)
    best_f = _margin_value(p, c, best_x)
    for k in range(1, n + 1):
        cand = np.zeros(n)
        cand[order[:k]] = T / k
        fc = _margin_value(p, c, cand)
        if fc > best_f:
            best_f, best_x = fc, cand

    x = best_x
    fx = best_f
    alpha0 = 1.0 / float(np.sqrt(p @ p))
    iters = 0
    converged = False
    while iters < max_iters:
        iters += 1
        if _stationarity_gap(p, c, x) <= _PG_TOL:
            converged = True
            break
        g = p - c * x / float(np.sqrt(x @ x))
        improved = False

        support = x > 0.0
        mu = float(g[support].mean())
        snap = np.maximum(p - mu, 0.0)
        s = float(snap.sum())
        if s > 0.0:
            snap *= T / s
            f_snap = _margin_value(p, c, snap)
            if f_snap > fx:
                x, fx = snap, f_snap
                improved = True

        alpha = alpha0
        for _ in range(60):
            step = project_onto_simplex(x + alpha * g, T)
            f_step = _margin_value(p, c, step)
            if f_step > fx:
                x, fx = step, f_step
                improved = True
                break
            alpha *= 0.5
        if not improved:
            # stationary plateau (e.g. tied maxima); certificate decides
            converged = _stationarity_gap(p, c, x) <= 1e-6
            break
    return fx, x, iters, converged


def feasibility_margin(profile: SystemProfile, c: float) -> tuple[float, Allocation]:
    """Best achievable margin p.x - 1 - c ||x|| over the budget simplex.

    The certified region at the matching eps is non-empty iff the margin
    is strictly positive.
    """
    if c < 0.0:
        raise ValueError(f"cone coefficient c must be >= 0, got {c}")
    margin, x, _, _ = _maximize_margin(profile, c)
    return margin, Allocation(amounts=x, strategy="hoeffding")


def _c_of_log_eps(log_eps: float) -> float:
    return math.sqrt(max(-log_eps, 0.0) / 2.0)


def solve_h1(
    profile: SystemProfile,
    eps_lo: float = EPS_LO_DEFAULT,
    eps_hi: float = EPS_HI_DEFAULT,
    tol_eps: float = 1e-3,
) -> HoeffdingSolution:
    """Smallest eps whose certified region is non-empty, by bisection on log eps.

    Feasibility is monotone: larger eps means a smaller cone coefficient
    and a larger margin.  When even eps_hi cannot be certified the result
    carries epsilon_star = 1 and certified = False.  tol_eps is the grid
    width on log eps.
    """
    if not (0.0 < eps_lo < eps_hi < 1.0):
        raise ValueError(f"need 0 < eps_lo < eps_hi < 1, got ({eps_lo}, {eps_hi})")
    log_lo = math.log(eps_lo)
    log_hi = math.log(eps_hi)
    oracle_calls = 0
    oracle_iters = 0

    m_hi, x_hi, it, _ = _maximize_margin(profile, _c_of_log_eps(log_hi))
    oracle_calls += 1
    oracle_iters += it
    if m_hi <= 0.0:
        return HoeffdingSolution(
            epsilon_star=1.0,
            allocation=Allocation(amounts=x_hi, strategy="hoeffding"),
            margin=m_hi,
            bisection_steps=0,
            oracle_calls=oracle_calls,
            oracle_iterations=oracle_iters,
            certified=False,
        )

    m_lo, x_lo, it, _ = _maximize_margin(profile, _c_of_log_eps(log_lo))
    oracle_calls += 1
    oracle_iters += it
    if m_lo > 0.0:
        return HoeffdingSolution(
            epsilon_star=math.exp(log_lo),
            allocation=Allocation(amounts=x_lo, strategy="hoeffding"),
            margin=m_lo,
            bisection_steps=0,
            oracle_calls=oracle_calls,
            oracle_iterations=oracle_iters,
            certified=True,
        )

    steps = 0
    feasible_floor = log_hi  # lowest log eps seen feasible
    infeasible_ceiling = log_lo  # highest log eps seen infeasible
    while log_hi - log_lo > tol_eps:
        mid = 0.5 * (log_hi + log_lo)
        margin, x, it, _ = _maximize_margin(profile, _c_of_log_eps(mid))
        oracle_calls += 1
        oracle_iters += it
        steps += 1
        if margin > 0.0:
            log_hi, m_hi, x_hi = mid, margin, x
            feasible_floor = min(feasible_floor, mid)
        else:
            log_lo = mid
            infeasible_ceiling = max(infeasible_ceiling, mid)
        assert infeasible_ceiling < feasible_floor, (
            "feasibility must be monotone in eps"
        )
    return HoeffdingSolution(
        epsilon_star=math.exp(log_hi),
        allocation=Allocation(amounts=x_hi, strategy="hoeffding"),
        margin=m_hi,
        bisection_steps=steps,
        oracle_calls=oracle_calls,
        oracle_iterations=oracle_iters,
        certified=True,
    )
