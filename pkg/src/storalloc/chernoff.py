"""Allocation solvers built on the exponential-tilt relaxation.

For a fixed tilt t the relaxed objective is separable and its KKT system
has a per-node water-filling solution x_i(lambda) with a single scalar
multiplier; lambda is located by bisection on its logarithm (robust for
very large t, where the raw multiplier underflows).  On top of that sit
the closed-form log-odds allocation and the alternating (x, t) descent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import chernoff_log_bound, minimize_bound_over_t, _log_odds, _sigmoid
from .model import Allocation, SystemProfile, reduce_to_unit_box

BUDGET_REL_TOL = 1e-10
_MAX_BISECT = 200
_MAX_NEWTON = 8


@dataclass(frozen=True)
class OddsProfile:
    """Odds ratios r_i = p_i/(1-p_i) and their sample averages."""

    odds: np.ndarray
    log_odds: np.ndarray
    mean_log: float
    mean_p_log: float
    mean_log_sq: float
    max_odds: float


def odds_profile(profile: SystemProfile) -> OddsProfile:
    p = profile.probs
    odds = p / (1.0 - p)
    ell = _log_odds(p)
    for arr in (odds, ell):
        arr.flags.writeable = False
    return OddsProfile(
        odds=odds,
        log_odds=ell,
        mean_log=float(ell.mean()),
        mean_p_log=float((p * ell).mean()),
        mean_log_sq=float((ell * ell).mean()),
        max_odds=float(odds.max()),
    )


@dataclass(frozen=True)
class R2Solution:
    """A water-filling solution with its multiplier and KKT diagnostics."""

    allocation: Allocation
    lambda_star: float
    log_lambda: float
    t: float
    objective: float  # value of the log bound at (allocation, t)
    kkt_residual: float
    budget_residual: float
    u: np.ndarray  # multipliers of x_i >= 0
    v: np.ndarray  # multipliers of x_i <= 1
    rounds: int = 0
    flags: tuple[str, ...] = ()
    objective_trace: tuple[float, ...] = ()  # per-round objective, alternation only


def _log_expm1(s: float) -> float:
    """log(e^s - 1) for s > 0 without overflow or cancellation."""
    if s < 1.0:
        return float(np.log(np.expm1(s)))
    return float(s + np.log1p(-np.exp(-s)))


def _water_fill(log_odds: np.ndarray, t: float, nu: float) -> np.ndarray:
    """Per-node amounts at multiplier log-value nu: the three-branch formula.

    The interior expression (log r_i + log(t/lambda - 1)) / t is monotone
    in nu and hits 0 and 1 exactly at the branch thresholds, so clipping
    it to [0, 1] reproduces all three branches at once.
    """
    log_t = np.log(t)
    if nu >= log_t:
        return np.zeros_like(log_odds)
    core = (log_odds + _log_expm1(log_t - nu)) / t
    return np.clip(core, 0.0, 1.0)


def solve_r2_fixed_t(profile: SystemProfile, t: float) -> R2Solution:
    """Minimize the tilt-t bound over the box-budget set by water filling.

    The budget sum x(lambda) is continuous and non-increasing in lambda,
    so bisection on log(lambda) brackets the multiplier; a Newton polish
    on the interior coordinates then drives |sum x - T| below 1e-10 * T.
    If the sum plateaus with no interior coordinate, t is nudged by a
    relative 1e-6 and the solve retried (flagged).
    """
    if t <= 0.0:
        raise ValueError(f"tilt parameter t must be > 0, got {t}")
    if profile.budget > profile.n:
        raise ValueError(
            f"budget {profile.budget} exceeds node count {profile.n}; box constraint infeasible"
        )
    T = profile.budget
    ell = _log_odds(profile.probs)
    tol = BUDGET_REL_TOL * T
    flags: list[str] = []

    t_try = float(t)
    for attempt in range(3):
        log_t = np.log(t_try)
        # nu below every one-threshold -> all amounts 1; above every
        # zero-threshold -> all amounts 0
        nu_one = ell + log_t - np.logaddexp(t_try, ell)
        nu_zero = ell + log_t - np.logaddexp(0.0, ell)
        lo = float(nu_one.min()) - 1.0
        hi = float(nu_zero.max())
        nu = hi
        x = _water_fill(ell, t_try, nu)
        for _ in range(_MAX_BISECT):
            mid = 0.5 * (lo + hi)
            x_mid = _water_fill(ell, t_try, mid)
            total = float(x_mid.sum())
            if total >= T:
                lo = mid
            else:
                hi = mid
            if abs(total - T) <= tol:
                nu, x = mid, x_mid
                break
        else:
            nu = 0.5 * (lo + hi)
            x = _water_fill(ell, t_try, nu)
        # Newton correction on nu over interior coordinates
        for _ in range(_MAX_NEWTON):
            residual = float(x.sum()) - T
            if abs(residual) <= tol:
                break
            interior = (x > 0.0) & (x < 1.0)
            k = int(np.count_nonzero(interior))
            if k == 0:
                break
            s = log_t - nu
            slope = -k / (t_try * -np.expm1(-s))
            nu_next = nu - residual / slope
            if not np.isfinite(nu_next):
                break
            nu = nu_next
            x = _water_fill(ell, t_try, nu)
        if abs(float(x.sum()) - T) <= tol:
            break
        interior = (x > 0.0) & (x < 1.0)
        if np.count_nonzero(interior) > 0:
            break  # continuous regime; bisection already at float limits
        flags.append("t-perturbed")
        t_try *= 1.0 + 1e-6
    if abs(float(x.sum()) - T) > tol:
        flags.append("budget-unmet")

    lam = float(np.exp(nu))
    at_zero = x <= 0.0
    at_one = x >= 1.0
    grad = t_try * _sigmoid(ell - t_try * x)  # r_i t / (r_i + e^{t x_i})
    u = np.where(at_zero, np.maximum(lam - grad, 0.0), 0.0)
    v = np.where(at_one, np.maximum(grad - lam, 0.0), 0.0)
    stationarity = -grad + lam - u + v
    kkt_residual = float(np.abs(stationarity).max())
    budget_residual = abs(float(x.sum()) - T)

    allocation = Allocation(amounts=x, strategy="chernoff-iterative")
    return R2Solution(
        allocation=allocation,
        lambda_star=lam,
        log_lambda=float(nu),
        t=t_try,
        objective=chernoff_log_bound(profile, allocation, t_try),
        kkt_residual=kkt_residual,
        budget_residual=budget_residual,
        u=u,
        v=v,
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class ClosedFormResult:
    allocation: Allocation
    condition_holds: bool  # T < n E[log r] / log r_max, i.e. no clipping needed


def closed_form_allocation(profile: SystemProfile) -> ClosedFormResult:
    """Allocation proportional to log odds: x_i = T log r_i / sum(log r).

    Requires every p_i > 1/2 (positive log odds).  When the amount on the
    best node would exceed 1 the result is pushed through the unit-box
    reduction and flagged.
    """
    if float(profile.probs.min()) <= 0.5:
        raise ValueError(
            "closed-form allocation needs every access probability > 1/2; "
            "use solve_r2_fixed_t instead"
        )
    ell = _log_odds(profile.probs)
    total_log = float(ell.sum())
    amounts = profile.budget * ell / total_log
    condition = profile.budget * float(ell.max()) < total_log
    allocation = Allocation(amounts=amounts, strategy="chernoff-closed-form")
    if not condition:
        reduced = reduce_to_unit_box(profile, allocation)
        allocation = Allocation(amounts=reduced.amounts, strategy="chernoff-closed-form")
    return ClosedFormResult(allocation=allocation, condition_holds=condition)


def default_t(profile: SystemProfile) -> tuple[float, bool]:
    """Heuristic tilt sum(log r)/T; falls back to 1.0 when log odds sum <= 0."""
    total_log = float(_log_odds(profile.probs).sum())
    if total_log > 0.0:
        return total_log / profile.budget, False
    return 1.0, True


def iterative_chernoff(
    profile: SystemProfile,
    max_rounds: int = 50,
    tol: float = 1e-8,
) -> R2Solution:
    """Alternate water-filling in x with 1-D tilt optimization in t.

    Each half-step minimizes the same log bound exactly in its own
    variable, so the objective is non-increasing; iteration stops at
    relative decrease < tol or max_rounds, converging to a possibly
    local joint minimum.
    """
    t, fallback = default_t(profile)
    flags: list[str] = ["t-fallback"] if fallback else []
    # half-step asserts carry slack for the water-filling budget tolerance,
    # which can wobble the objective by about lambda * tol * T
    slack = 1e-8
    best_obj = np.inf
    best_sol = None
    best_t = t
    prev_x = None
    trace: list[float] = []
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        step = solve_r2_fixed_t(profile, t)
        x = step.allocation.amounts
        if prev_x is not None and float(np.abs(x - prev_x).max()) <= 1e-12:
            break  # fixed point of the alternation
        prev_x = x
        obj_x = step.objective
        assert obj_x <= best_obj + slack, "x-step increased the objective"
        opt = minimize_bound_over_t(profile, step.allocation)
        if opt.vacuous:
            # no reliable allocation at this budget; the tilt step is moot
            flags.append("vacuous-tilt")
            if obj_x < best_obj:
                best_obj, best_sol, best_t = obj_x, step, t
                trace.append(best_obj)
            break
        assert opt.log_bound <= obj_x + slack, "t-step increased the objective"
        improvement = best_obj - opt.log_bound
        if opt.log_bound < best_obj:
            best_obj, best_sol, best_t = opt.log_bound, step, opt.t_star
            trace.append(best_obj)
        t = opt.t_star
        if improvement < tol * max(1.0, abs(opt.log_bound)):
            break
    return R2Solution(
        allocation=best_sol.allocation,
        lambda_star=best_sol.lambda_star,
        log_lambda=best_sol.log_lambda,
        t=best_t,
        objective=best_obj,
        kkt_residual=best_sol.kkt_residual,
        budget_residual=best_sol.budget_residual,
        u=best_sol.u,
        v=best_sol.v,
        rounds=rounds,
        flags=tuple(flags) + best_sol.flags,
        objective_trace=tuple(trace),
    )
