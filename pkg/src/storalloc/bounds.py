"""Analytic upper bounds on the failure probability.

All four bounds are exponential tail estimates; arithmetic stays in log
space so values around exp(-12.5) and far below survive for large n.
Bounds that are vacuous (value >= 1, or their precondition fails) are
reported as None rather than clamped, which keeps downstream curves
honest on a log axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Allocation, SystemProfile, _check_dims

T_HI_DEFAULT = 1e3
T_CAP = 1e9
_T_EXPAND = 4.0


def _log_odds(probs: np.ndarray) -> np.ndarray:
    return np.log(probs) - np.log1p(-probs)


def _sigmoid(s: np.ndarray) -> np.ndarray:
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def hoeffding_bound(profile: SystemProfile, allocation: Allocation) -> float | None:
    """exp(-2 (p.x - 1)^2 / ||x||^2), defined only for strictly reliable x."""
    _check_dims(profile, allocation)
    x = allocation.amounts
    slack = float(profile.probs @ x) - 1.0
    if slack <= 0.0:
        return None
    return float(np.exp(-2.0 * slack * slack / float(x @ x)))


def chernoff_log_bound(profile: SystemProfile, allocation: Allocation, t: float) -> float:
    """log of the exponential-tilt bound e^t * prod(1 - p_i + p_i e^{-t x_i}).

    Evaluated as t + sum[log(1 - p_i) + log(1 + r_i e^{-t x_i})] with the
    last term via logaddexp, so nothing underflows for t up to 1e6.
    At t = 0 the bound is exactly 1 (log 0).
    """
    _check_dims(profile, allocation)
    if t < 0.0:
        raise ValueError(f"tilt parameter t must be >= 0, got {t}")
    if t == 0.0:
        return 0.0
    p = profile.probs
    exponents = _log_odds(p) - t * allocation.amounts
    terms = np.log1p(-p) + np.logaddexp(0.0, exponents)
    return float(t + terms.sum())


def chernoff_log_derivative(profile: SystemProfile, allocation: Allocation, t: float) -> float:
    """d/dt of chernoff_log_bound; equals 1 - p.x at t = 0."""
    _check_dims(profile, allocation)
    x = allocation.amounts
    return float(1.0 - x @ _sigmoid(_log_odds(profile.probs) - t * x))


def spreading_bound(profile: SystemProfile) -> float | None:
    """Tail bound exp(-2 n (p_bar - 1/T)^2) for the maximal spreading allocation.

    Vacuous (None) unless T > 1/p_bar.
    """
    gap = profile.p_bar - 1.0 / profile.budget
    if gap <= 0.0:
        return None
    return float(np.exp(-2.0 * profile.n * gap * gap))


def closed_form_bound(profile: SystemProfile) -> float | None:
    """Tail bound for the log-odds-proportional allocation.

    Defined when every p_i > 1/2 and T exceeds E[log r]/E[p log r]
    (sample averages over nodes, r_i the odds ratio); None otherwise.
    """
    p = profile.probs
    if float(p.min()) <= 0.5:
        return None
    ell = _log_odds(p)
    mean_log = float(ell.mean())
    mean_p_log = float((p * ell).mean())
    mean_log_sq = float((ell * ell).mean())
    gap = mean_p_log - mean_log / profile.budget
    if gap <= 0.0:
        return None
    return float(np.exp(-2.0 * profile.n * gap * gap / mean_log_sq))


@dataclass(frozen=True)
class BoundMinimum:
    """Result of the 1-D tilt optimization: arg min over t of the log bound."""

    t_star: float
    log_bound: float
    vacuous: bool
    evals: int


def minimize_bound_over_t(
    profile: SystemProfile,
    allocation: Allocation,
    t_hi: float = T_HI_DEFAULT,
    tol: float = 1e-8,
) -> BoundMinimum:
    """Minimize the log bound over the tilt t by bisection on its derivative.

    The log bound is convex in t with slope 1 - p.x at zero, so a strictly
    reliable allocation has an interior minimum.  The bracket end expands
    geometrically (x4, capped at 1e9) while the slope there is still
    negative.  Non-reliable allocations get the vacuous answer (0, 0).
    """
    _check_dims(profile, allocation)
    evals = 1
    if chernoff_log_derivative(profile, allocation, 0.0) >= 0.0:
        return BoundMinimum(t_star=0.0, log_bound=0.0, vacuous=True, evals=evals)
    hi = float(t_hi)
    while chernoff_log_derivative(profile, allocation, hi) < 0.0 and hi < T_CAP:
        hi = min(hi * _T_EXPAND, T_CAP)
        evals += 1
    evals += 1
    if chernoff_log_derivative(profile, allocation, hi) < 0.0:
        # minimum sits beyond the cap; report the cap point
        return BoundMinimum(
            t_star=hi,
            log_bound=chernoff_log_bound(profile, allocation, hi),
            vacuous=False,
            evals=evals,
        )
    lo = 0.0
    while hi - lo > tol and evals < 400:
        mid = 0.5 * (lo + hi)
        if chernoff_log_derivative(profile, allocation, mid) < 0.0:
            lo = mid
        else:
            hi = mid
        evals += 1
    t_star = 0.5 * (lo + hi)
    return BoundMinimum(
        t_star=t_star,
        log_bound=chernoff_log_bound(profile, allocation, t_star),
        vacuous=False,
        evals=evals,
    )


@dataclass(frozen=True)
class BoundReport:
    """The four analytic bounds evaluated for one (profile, allocation) pair."""

    hoeffding: float | None
    chernoff_log: float
    chernoff_t: float
    spreading: float | None
    closed_form: float | None


def bound_report(profile: SystemProfile, allocation: Allocation) -> BoundReport:
    """Evaluate every bound, optimizing the Chernoff tilt for this allocation."""
    opt = minimize_bound_over_t(profile, allocation)
    return BoundReport(
        hoeffding=hoeffding_bound(profile, allocation),
        chernoff_log=opt.log_bound,
        chernoff_t=opt.t_star,
        spreading=spreading_bound(profile),
        closed_form=closed_form_bound(profile),
    )
