"""Ensemble experiment runner: budget sweeps over the four strategies.

Builds a seeded ensemble of random profiles, solves each strategy at each
budget, evaluates the failure probability (exactly when permitted, else
by Monte Carlo), pairs it with the strategy's analytic bound, and writes
one CSV with per-cell rows followed by an ensemble-mean aggregate block.
Identical config + seed gives a byte-identical file, also when cells are
computed on several workers: every random stream is derived from the
(seed, ensemble, budget, strategy) coordinates, never from scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .bounds import closed_form_bound, spreading_bound
from .chernoff import closed_form_allocation, iterative_chernoff
from .evaluate import (
    DEFAULT_ENUM_LIMIT,
    exact_failure_prob,
    monte_carlo_failure_prob,
)
from .hoeffding import solve_h1
from .model import make_profile, spread_allocation

CSV_HEADER = "ensemble,strategy,T,pe,pe_hw,bound,diag,ms"

STRATEGY_ORDER = ("spread", "closed", "hoeffding", "chernoff")
STRATEGY_TAGS = {
    "spread": "spread",
    "closed": "chernoff-closed-form",
    "hoeffding": "hoeffding",
    "chernoff": "chernoff-iterative",
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the key."""


@dataclass
class ExperimentConfig:
    n: int = 100
    p_lo: float = 0.5
    p_hi: float = 1.0 - 1e-12  # probabilities live in the open unit interval
    probs: tuple[float, ...] | None = None  # explicit node probabilities
    budgets: tuple[float, ...] = (1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6)
    strategies: tuple[str, ...] = STRATEGY_ORDER
    trials: int = 100_000
    ensemble_size: int = 10
    seed: int = 42
    output_path: str = "results.csv"
    enum_limit: int = DEFAULT_ENUM_LIMIT
    workers: int = 1
    timing: bool = False  # real wall times break byte-reproducibility

    def validate(self) -> None:
        if self.probs is None:
            if self.n < 1:
                raise ConfigError(f"n: must be >= 1, got {self.n}")
            if not (0.0 < self.p_lo < self.p_hi < 1.0):
                raise ConfigError(
                    f"p_lo/p_hi: need 0 < lo < hi < 1, got ({self.p_lo}, {self.p_hi})"
                )
        else:
            for i, p in enumerate(self.probs):
                if not (0.0 < p < 1.0):
                    raise ConfigError(f"probs: entry {i} is {p}, outside (0, 1)")
        if not self.budgets:
            raise ConfigError("budgets: must be non-empty")
        if any(b <= 0.0 for b in self.budgets):
            raise ConfigError(f"budgets: all must be positive, got {self.budgets}")
        if list(self.budgets) != sorted(self.budgets):
            raise ConfigError(f"budgets: must be ascending, got {self.budgets}")
        for s in self.strategies:
            if s not in STRATEGY_ORDER:
                raise ConfigError(f"strategies: unknown name {s!r}")
        if not self.strategies:
            raise ConfigError("strategies: must be non-empty")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.ensemble_size < 1:
            raise ConfigError(f"ensemble: must be >= 1, got {self.ensemble_size}")
        if self.seed < 0:
            raise ConfigError(f"seed: must be a nonnegative integer, got {self.seed}")
        if self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")

    @property
    def ordered_strategies(self) -> tuple[str, ...]:
        return tuple(s for s in STRATEGY_ORDER if s in self.strategies)


_BOOL_VALUES = {"1": True, "true": True, "on": True, "0": False, "false": False, "off": False}


def parse_config(text: str) -> ExperimentConfig:
    """Parse flat key=value lines; lists are comma-separated, # comments."""
    cfg = ExperimentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            if key == "n":
                cfg.n = int(value)
            elif key == "p_lo":
                cfg.p_lo = float(value)
            elif key == "p_hi":
                cfg.p_hi = float(value)
            elif key == "probs":
                cfg.probs = tuple(float(v) for v in value.split(","))
            elif key == "budgets":
                cfg.budgets = tuple(float(v) for v in value.split(","))
            elif key == "strategies":
                cfg.strategies = tuple(v.strip() for v in value.split(","))
            elif key == "trials":
                cfg.trials = int(value)
            elif key == "ensemble":
                cfg.ensemble_size = int(value)
            elif key == "seed":
                cfg.seed = int(value)
            elif key == "out":
                cfg.output_path = value
            elif key == "enum_limit":
                cfg.enum_limit = int(value)
            elif key == "workers":
                cfg.workers = int(value)
            elif key == "timing":
                cfg.timing = _BOOL_VALUES[value.lower()]
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except (ValueError, KeyError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{key}: cannot parse value {value!r}") from exc
    cfg.validate()
    return cfg


def draw_ensemble(
    n: int, p_lo: float, p_hi: float, ensemble_size: int, seed: int
) -> list[np.ndarray]:
    """Probability vectors drawn per ensemble index.

    Member j streams from key (seed, j), so growing the ensemble never
    perturbs earlier members.
    """
    out = []
    for j in range(ensemble_size):
        rng = Generator(Philox(SeedSequence((seed, j))))
        out.append(rng.uniform(p_lo, p_hi, n))
    return out


def _cell_seed(seed: int, e: int, ti: int, si: int) -> int:
    ss = SeedSequence((seed, e, ti, si))
    return int(ss.generate_state(1, np.uint64)[0])


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def _solve_strategy(profile, strategy: str):
    """Returns (allocation, bound_value_or_None, diag_pairs, nonconverged)."""
    if strategy == "spread":
        return spread_allocation(profile), spreading_bound(profile), [], False
    if strategy == "closed":
        res = closed_form_allocation(profile)
        diag = [f"clipped={0 if res.condition_holds else 1}"]
        return res.allocation, closed_form_bound(profile), diag, False
    if strategy == "hoeffding":
        sol = solve_h1(profile)
        diag = [
            f"eps={sol.epsilon_star!r}",
            f"bisect={sol.bisection_steps}",
            f"oracle={sol.oracle_calls}",
            f"certified={1 if sol.certified else 0}",
        ]
        bound = sol.epsilon_star if sol.certified and sol.epsilon_star < 1.0 else None
        return sol.allocation, bound, diag, False
    if strategy == "chernoff":
        sol = iterative_chernoff(profile)
        diag = [f"t={sol.t!r}", f"rounds={sol.rounds}"]
        if sol.flags:
            diag.append("flags=" + "|".join(sol.flags))
        bound = math.exp(sol.objective) if sol.objective < 0.0 else None
        return sol.allocation, bound, diag, "budget-unmet" in sol.flags
    raise ValueError(f"unknown strategy {strategy!r}")


def _compute_cell(args) -> tuple:
    probs, T, strategy, trials, seed, e, ti, si, enum_limit = args
    started = time.perf_counter()
    profile = make_profile(probs, T)
    try:
        allocation, bound, diag, nonconverged = _solve_strategy(profile, strategy)
    except ValueError as exc:
        reason = str(exc).split(";")[0].replace(",", " ")
        row = {
            "pe": "",
            "pe_hw": "",
            "bound": "",
            "diag": f"error={reason}",
            "pe_value": None,
            "hw_value": None,
            "bound_value": None,
        }
        return e, ti, si, row, True, 0.0

    uniform = float(allocation.amounts.max()) == float(allocation.amounts.min())
    if uniform or profile.n <= enum_limit:
        est = exact_failure_prob(profile, allocation, enum_limit=enum_limit)
    else:
        est = monte_carlo_failure_prob(
            profile, allocation, trials=trials, seed=_cell_seed(seed, e, ti, si)
        )
    elapsed_ms = (time.perf_counter() - started) * 1e3
    row = {
        "pe": _fmt(est.value),
        "pe_hw": _fmt(est.half_width),
        "bound": _fmt(bound),
        "diag": ";".join([f"method={est.method}", *diag]),
        "pe_value": est.value,
        "hw_value": est.half_width,
        "bound_value": bound,
    }
    return e, ti, si, row, nonconverged, elapsed_ms


def run_experiment(config: ExperimentConfig, quiet: bool = False) -> int:
    """Run the sweep, write the CSV artifact, print a summary; returns exit code."""
    config.validate()
    strategies = config.ordered_strategies
    if config.probs is not None:
        members = [np.asarray(config.probs, dtype=float)] * config.ensemble_size
    else:
        members = draw_ensemble(
            config.n, config.p_lo, config.p_hi, config.ensemble_size, config.seed
        )

    cells = [
        (
            members[e],
            T,
            strategy,
            config.trials,
            config.seed,
            e,
            ti,
            si,
            config.enum_limit,
        )
        for e in range(config.ensemble_size)
        for ti, T in enumerate(config.budgets)
        for si, strategy in enumerate(strategies)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_compute_cell, cells, chunksize=1))
    else:
        results = [_compute_cell(cell) for cell in cells]

    # single writer, deterministic (ensemble, T, strategy) order
    results.sort(key=lambda r: (r[0], r[1], r[2]))
    lines = [CSV_HEADER]
    any_nonconverged = False
    by_cell: dict[tuple[int, int], list] = {}
    for e, ti, si, row, nonconverged, elapsed_ms in results:
        any_nonconverged = any_nonconverged or nonconverged
        ms = f"{elapsed_ms:.3f}" if config.timing else ""
        tag = STRATEGY_TAGS[strategies[si]]
        T = config.budgets[ti]
        lines.append(
            f"{e},{tag},{T!r},{row['pe']},{row['pe_hw']},{row['bound']},{row['diag']},{ms}"
        )
        by_cell.setdefault((ti, si), []).append(row)

    aggregates = []
    for ti, T in enumerate(config.budgets):
        for si, strategy in enumerate(strategies):
            rows = by_cell.get((ti, si), [])
            pes = [r["pe_value"] for r in rows if r["pe_value"] is not None]
            hws = [r["hw_value"] for r in rows if r["hw_value"] is not None]
            bounds = [r["bound_value"] for r in rows if r["bound_value"] is not None]
            pe_mean = sum(pes) / len(pes) if pes else None
            hw_mean = math.sqrt(sum(h * h for h in hws)) / len(hws) if hws else None
            bound_mean = sum(bounds) / len(bounds) if bounds else None
            tag = STRATEGY_TAGS[strategy]
            lines.append(
                f"mean,{tag},{T!r},{_fmt(pe_mean)},{_fmt(hw_mean)},{_fmt(bound_mean)},,"
            )
            aggregates.append((T, tag, pe_mean, bound_mean))

    text = "\n".join(lines) + "\n"
    try:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"out: cannot write {config.output_path!r}: {exc}") from exc

    if not quiet:
        print(f"wrote {len(lines) - 1} rows to {config.output_path}")
        print("ensemble means (T, strategy, pe, bound):")
        for T, tag, pe_mean, bound_mean in aggregates:
            pe_s = "n/a" if pe_mean is None else f"{pe_mean:.6g}"
            b_s = "vacuous" if bound_mean is None else f"{bound_mean:.6g}"
            print(f"  T={T:<6g} {tag:<22} pe={pe_s:<12} bound={b_s}")
        if any_nonconverged:
            print("warning: at least one cell did not converge (see diag column)")
    return EXIT_NONCONVERGED if any_nonconverged else EXIT_OK
