"""Monte Carlo estimates of both players' payoffs and numerical equilibrium checks.

Every estimate is a plain sample mean over independently seeded paths (see
:func:`hirefire.filtering.path_generator`).  Discounting uses the exact
per-step weight ``(exp(-r t) - exp(-r (t + dt))) / r``; for a constant salary
these weights telescope to ``(1 - exp(-r tau)) / r``.  Deviation sweeps
evaluate every grid point on the same paths (common random numbers) and judge
differences by the standard error of the paired differences.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from ._io import csv_text
from .equilibrium import (Regime, Stop, assemble_pbe, employee_value_weak, employer_value,
                          stopping_threshold)
from .exceptions import ConfigViolation, RegimeMismatch
from .filtering import Measure, SimConfig, model_code, path_generator
from .model import GameParams, derived_quantities

__all__ = [
    "MonteCarloEstimate", "DeviationReport", "EmployerPayoffEstimate",
    "simulate_passages", "estimate_employee_payoff", "estimate_employer_payoff",
    "indifference_check", "employer_deviation_sweep", "employee_deviation_sweep",
    "pooling_comparison", "estimator_agreement", "monitoring_bias", "run_battery",
]

TYPE_DRAW = "type_draw"
# discrete monitoring of a Brownian barrier acts like a shift of
# zeta(1/2)/sqrt(2 pi) standard deviations of one step
_BGK_SHIFT = 0.5825971579390107

# stream labels keep independent estimators on disjoint random numbers
STREAM_EMPLOYEE, STREAM_TYPE_DRAW, STREAM_FILTER, STREAM_SWEEP = 0, 1, 2, 3


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    n_paths: int
    truncation_bound: float = 0.0

    @classmethod
    def from_samples(cls, samples, truncation_bound=0.0):
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        if n < 2:
            raise ConfigViolation("a Monte Carlo estimate needs at least 2 paths")
        return cls(mean=float(samples.mean()),
                   stderr=float(samples.std(ddof=1) / math.sqrt(n)),
                   n_paths=int(n), truncation_bound=float(truncation_bound))

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "n": self.n_paths,
                "truncation_bound": self.truncation_bound}


@dataclass
class DeviationReport:
    """Payoffs of one player over a grid of deviations, on common random numbers.

    ``diff_stderr[i]`` is the standard error of the per-path difference
    between grid point ``i`` and the equilibrium point.
    """

    kind: str
    grid: list
    values: list
    equilibrium_index: int
    diff_stderr: list
    passed: bool
    reference: float | None = None
    notes: list = field(default_factory=list)

    @property
    def argmax(self):
        return int(np.argmax([v.mean for v in self.values]))

    def to_dict(self):
        return {
            "estimator": f"{self.kind}_deviation_sweep",
            "grid": list(self.grid),
            "values": [v.to_dict() for v in self.values],
            "diff_stderr": list(self.diff_stderr),
            "equilibrium_index": self.equilibrium_index,
            "argmax": self.argmax,
            "reference": self.reference,
            "common_random_numbers": True,
            "notes": list(self.notes),
            "pass": self.passed,
        }

    def to_csv(self):
        rows = [(g, v.mean, v.stderr, str(v.n_paths), d)
                for g, v, d in zip(self.grid, self.values, self.diff_stderr)]
        return csv_text(["param", "mean", "stderr", "n_paths", "diff_stderr"], rows)


@dataclass(frozen=True)
class EmployerPayoffEstimate:
    """Two estimators of the employer's payoff: draw the type and integrate the
    realised net revenue, or integrate the filtered net revenue along paths of
    the employer's measure."""

    type_draw: MonteCarloEstimate
    filter: MonteCarloEstimate
    pi_start: float

    @property
    def combined_stderr(self):
        return math.hypot(self.type_draw.stderr, self.filter.stderr)

    @property
    def agree(self):
        gap = abs(self.type_draw.mean - self.filter.mean)
        return gap <= 3.0 * self.combined_stderr + 1e-12

    def to_dict(self):
        return {"estimator": "employer_payoff", "pi_start": self.pi_start,
                "type_draw": self.type_draw.to_dict(), "filter": self.filter.to_dict(),
                "combined_stderr": self.combined_stderr, "pass": self.agree}


@dataclass
class PassageBatch:
    hit: np.ndarray       # (n, m) first grid index at or below each threshold, -1 if none
    acc: np.ndarray       # (n, m) sum_j decay**j * pi_j before the hit
    u: np.ndarray         # (n, 2) leading uniforms of each stream
    strong: np.ndarray    # (n,) drawn type, meaningful for type draws only
    clamps: int


def _max_threads():
    env = os.environ.get("HIREFIRE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _encode(threshold):
    if threshold is Stop.NEVER:
        return -1.0
    if threshold is Stop.IMMEDIATE:
        return 2.0
    return float(threshold)


def simulate_passages(params: GameParams, cfg: SimConfig, pi0, measure, thresholds,
                      n_paths, stream=STREAM_EMPLOYEE, shards=1) -> PassageBatch:
    """Run ``n_paths`` belief paths from ``pi0`` against several thresholds at once.

    ``measure`` is a :class:`Measure` or ``"type_draw"`` (draw the strong
    type with probability ``pi0``, then simulate given that type).  Paths are
    split into ``shards`` contiguous index ranges; the result does not depend
    on the split.
    """
    if n_paths < 1:
        raise ConfigViolation(f"n_paths must be positive, got {n_paths}")
    pi0 = float(pi0)
    type_draw = measure == TYPE_DRAW
    if not type_draw:
        measure = Measure(measure)
    codes = np.array([_encode(t) for t in thresholds])
    order = np.argsort(-codes, kind="stable")
    thr = np.ascontiguousarray(codes[order])
    m = thr.size
    omega = (params.mu1 - params.mu0) / params.sigma
    decay = math.exp(-params.r * cfg.dt)
    n_steps = cfg.n_steps

    hit = np.empty((n_paths, m), dtype=np.int64)
    acc = np.empty((n_paths, m))
    u = np.empty((n_paths, 2))
    strong = np.zeros(n_paths, dtype=bool)
    clamps = np.zeros(n_paths, dtype=np.int64)

    def work(start, stop):
        for i in range(start, stop):
            rng = path_generator(cfg.seed, i, stream)
            u[i] = rng.random(2)
            if type_draw:
                strong[i] = u[i, 0] < pi0
                meas = Measure.GIVEN_STRONG if strong[i] else Measure.GIVEN_WEAK
            else:
                meas = measure
            model = model_code(meas, cfg.scheme, u[i, 0], pi0)
            clamps[i] = K.passage(rng, pi0, model, omega, cfg.dt, n_steps, decay, thr,
                                  hit[i], acc[i])

    shards = max(1, min(int(shards), n_paths))
    bounds = np.linspace(0, n_paths, shards + 1).astype(int)
    if shards == 1:
        work(0, n_paths)
    else:
        with ThreadPoolExecutor(max_workers=min(shards, _max_threads())) as pool:
            list(pool.map(work, bounds[:-1], bounds[1:]))

    inverse = np.empty(m, dtype=int)
    inverse[order] = np.arange(m)
    return PassageBatch(hit=hit[:, inverse], acc=acc[:, inverse], u=u, strong=strong,
                        clamps=int(clamps.sum()))


def _discount_until(hit, params, cfg):
    steps = np.where(hit < 0, cfg.n_steps, hit)
    return (1.0 - np.exp(-params.r * cfg.dt * steps)) / params.r


def _salary_truncation(params, cfg, salary):
    return math.exp(-params.r * cfg.horizon) * salary / params.r


def _employer_truncation(params, cfg, salary):
    rate = max(abs(params.mu0 - salary), abs(params.mu1 - salary))
    return math.exp(-params.r * cfg.horizon) * rate / params.r


def estimate_employee_payoff(params: GameParams, salary_choice, threshold, pi_start,
                             measure, cfg: SimConfig, n_paths=10_000,
                             shards=1) -> MonteCarloEstimate:
    """Expected discounted salary of a worker of known type.

    The worker earns ``salary_choice`` until the employer's belief, started at
    ``pi_start``, first falls to ``threshold`` (or until the horizon).
    ``measure`` must be ``GIVEN_WEAK`` or ``GIVEN_STRONG``.
    """
    measure = Measure(measure)
    if measure is Measure.EMPLOYER:
        raise ConfigViolation("employee payoffs are computed given the worker's type")
    batch = simulate_passages(params, cfg, pi_start, measure, [threshold], n_paths,
                              STREAM_EMPLOYEE, shards)
    pay = salary_choice * _discount_until(batch.hit[:, 0], params, cfg)
    return MonteCarloEstimate.from_samples(pay, _salary_truncation(params, cfg, salary_choice))


def estimate_employer_payoff(params: GameParams, salary_taken, threshold, pi_start,
                             cfg: SimConfig, n_paths=10_000, shards=1) -> EmployerPayoffEstimate:
    """Employer's payoff from a worker paid ``salary_taken``, by two independent estimators."""
    trunc = _employer_truncation(params, cfg, salary_taken)
    drawn = simulate_passages(params, cfg, pi_start, TYPE_DRAW, [threshold], n_paths,
                              STREAM_TYPE_DRAW, shards)
    mu = np.where(drawn.strong, params.mu1, params.mu0)
    type_draw = (mu - salary_taken) * _discount_until(drawn.hit[:, 0], params, cfg)

    filt = simulate_passages(params, cfg, pi_start, Measure.EMPLOYER, [threshold], n_paths,
                             STREAM_FILTER, shards)
    filtered = _filter_payoff(filt, 0, params, cfg, salary_taken)
    return EmployerPayoffEstimate(
        type_draw=MonteCarloEstimate.from_samples(type_draw, trunc),
        filter=MonteCarloEstimate.from_samples(filtered, trunc),
        pi_start=float(pi_start))


def _filter_payoff(batch, col, params, cfg, salary):
    weight = (1.0 - math.exp(-params.r * cfg.dt)) / params.r
    base = (params.mu0 - salary) * _discount_until(batch.hit[:, col], params, cfg)
    return base + (params.mu1 - params.mu0) * weight * batch.acc[:, col]


def monitoring_bias(params: GameParams, pi, threshold, dt):
    """Size of the grid-monitoring bias of the weak type's payoff.

    Checking the barrier only on the grid behaves like lowering it by
    ``0.5826 * omega * sqrt(dt)`` in log-odds; returns the resulting change of
    the closed-form value.
    """
    d = derived_quantities(params)
    lo = math.log(threshold / (1.0 - threshold)) - _BGK_SHIFT * d.omega * math.sqrt(dt)
    shifted = 1.0 / (1.0 + math.exp(-lo))
    return abs(float(employee_value_weak(pi, params, d, shifted))
               - float(employee_value_weak(pi, params, d, threshold)))


def indifference_check(params: GameParams, cfg: SimConfig, n_paths=100_000, shards=1) -> dict:
    """Weak type's payoff from claiming ``c1`` at the equilibrium belief vs ``c0/r``.

    Passes when ``|MC - c0/r| <= 3 stderr + truncation + monitoring bias``.
    """
    eq = assemble_pbe(params)
    if eq.regime is not Regime.SEMI_SEPARATING:
        raise RegimeMismatch(f"indifference holds in the semi-separating regime only "
                             f"(p = {params.p} >= p_hat = {eq.p_hat:.9g})")
    b = eq.threshold_high
    est = estimate_employee_payoff(params, params.c1, b, eq.p_hat, Measure.GIVEN_WEAK,
                                   cfg, n_paths, shards)
    target = params.c0 / params.r
    bias = monitoring_bias(params, eq.p_hat, b, cfg.dt)
    budget = 3.0 * est.stderr + est.truncation_bound + bias
    gap = abs(est.mean - target)
    return {
        "estimator": "indifference_check",
        "p_hat": eq.p_hat,
        "threshold": b,
        "estimate": est.to_dict(),
        "target": target,
        "gap": gap,
        "budget": {"three_stderr": 3.0 * est.stderr, "truncation": est.truncation_bound,
                   "dt_bias": bias, "total": budget},
        "pass": gap <= budget,
    }


def _paired(samples, ref_index):
    ref = samples[:, ref_index]
    n = samples.shape[0]
    return [float(np.std(samples[:, i] - ref, ddof=1) / math.sqrt(n))
            for i in range(samples.shape[1])]


def _with_point(grid, point):
    grid = sorted(float(g) for g in grid)
    for i, g in enumerate(grid):
        if abs(g - point) <= 1e-9:
            grid[i] = point
            return grid, False
    grid.append(point)
    return sorted(grid), True


def employer_deviation_sweep(params: GameParams, cfg: SimConfig, thresholds=None,
                             n_paths=100_000, pi_start=None, shards=1) -> DeviationReport:
    """Employer's payoff after a ``c1`` claim for alternative firing thresholds.

    Uses the filtered-revenue estimator on employer-measure paths started at
    ``pi_start`` (default: the equilibrium belief after ``c1``).  Passes when
    no grid threshold beats ``b`` by more than three paired standard errors
    and the best grid point is ``b`` or one of its neighbours.
    """
    eq = assemble_pbe(params)
    b = eq.threshold_high
    if thresholds is None:
        thresholds = [0.05, 0.10, b, 0.25, 0.35]
    grid, added = _with_point(thresholds, b)
    k = grid.index(b)
    pi_start = eq.belief[1] if pi_start is None else float(pi_start)
    batch = simulate_passages(params, cfg, pi_start, Measure.EMPLOYER, grid, n_paths,
                              STREAM_SWEEP, shards)
    samples = np.column_stack([_filter_payoff(batch, i, params, cfg, params.c1)
                               for i in range(len(grid))])
    trunc = _employer_truncation(params, cfg, params.c1)
    values = [MonteCarloEstimate.from_samples(samples[:, i], trunc) for i in range(len(grid))]
    diff = _paired(samples, k)
    means = [v.mean for v in values]
    ok = all(means[i] <= means[k] + 3.0 * diff[i] + 1e-12 for i in range(len(grid)))
    ok = ok and abs(int(np.argmax(means)) - k) <= 1
    notes = [f"pi_start={pi_start:.9g}"] + (["equilibrium threshold added to grid"] if added else [])
    return DeviationReport("employer", grid, values, k, diff, ok,
                           reference=float(employer_value(pi_start, params,
                                                          derived_quantities(params), b)),
                           notes=notes)


def employee_deviation_sweep(params: GameParams, cfg: SimConfig, grid=None, kind="weak",
                             n_paths=100_000, shards=1) -> DeviationReport:
    """Worker's payoff for alternative probabilities of claiming ``c1``.

    The employer keeps its equilibrium response and beliefs.  Each path draws
    one uniform coin shared by all grid points; the worker claims ``c1`` when
    the coin falls below the grid value.  For the weak type the payoff must be
    flat in the mixing probability (paired differences within three standard
    errors) when the equilibrium is semi-separating, and no grid point may beat
    the equilibrium otherwise; for the strong type claiming ``c1`` with
    probability one must not be beaten.
    """
    if kind not in ("weak", "strong"):
        raise ValueError(f"kind must be 'weak' or 'strong', got {kind!r}")
    eq = assemble_pbe(params)
    star = eq.a_star[0] if kind == "weak" else eq.a_star[1]
    if grid is None:
        grid = [0.0, 0.25, star, 0.75, 1.0] if kind == "weak" else [0.0, 0.5, 1.0]
    grid, added = _with_point(grid, star)
    k = grid.index(star)
    measure = Measure.GIVEN_WEAK if kind == "weak" else Measure.GIVEN_STRONG
    batch = simulate_passages(params, cfg, eq.belief[1], measure, [eq.threshold_high],
                              n_paths, STREAM_SWEEP, shards)
    high = params.c1 * _discount_until(batch.hit[:, 0], params, cfg)
    low = params.c0 * (1.0 - math.exp(-params.r * cfg.horizon)) / params.r
    coin = batch.u[:, 1]
    samples = np.column_stack([np.where(coin < a, high, low) for a in grid])
    trunc = _salary_truncation(params, cfg, params.c1)
    values = [MonteCarloEstimate.from_samples(samples[:, i], trunc) for i in range(len(grid))]
    diff = _paired(samples, k)
    means = [v.mean for v in values]
    c0r = params.c0 / params.r
    if kind == "weak" and eq.regime is Regime.SEMI_SEPARATING:
        ok = all(abs(means[i] - means[k]) <= 3.0 * diff[i] + 1e-12 for i in range(len(grid)))
    else:
        ok = all(means[k] >= means[i] - 3.0 * diff[i] - 1e-12 for i in range(len(grid)))
    ok = ok and means[k] >= c0r - 3.0 * values[k].stderr - trunc - 1e-12
    notes = ["equilibrium probability added to grid"] if added else []
    return DeviationReport(kind, grid, values, k, diff, ok, reference=c0r, notes=notes)


def pooling_comparison(params: GameParams, cfg: SimConfig, n_paths=100_000, shards=1) -> dict:
    """Equilibrium values of both types next to the value ``c0/r`` of the
    all-``c0`` pooling equilibrium."""
    eq = assemble_pbe(params)
    strong = estimate_employee_payoff(params, params.c1, eq.threshold_high, eq.belief[1],
                                      Measure.GIVEN_STRONG, cfg, n_paths, shards)
    pooled = params.c0 / params.r
    strong_margin = strong.mean - pooled
    return {
        "estimator": "pooling_comparison",
        "regime": eq.regime.value,
        "pooling_value": pooled,
        "weak_value": eq.value_weak,
        "strong_value": strong.to_dict(),
        "strong_margin": strong_margin,
        "strong_dominates": strong_margin > 3.0 * strong.stderr,
        "weak_not_dominated": eq.value_weak >= pooled - 1e-9,
        "pass": bool(strong_margin > 3.0 * strong.stderr and eq.value_weak >= pooled - 1e-9),
    }


def estimator_agreement(params: GameParams, cfg: SimConfig, pi_starts=None, n_paths=20_000,
                 threshold=None, shards=1) -> dict:
    """Agreement of the type-draw and filtered-revenue estimators of the employer's
    payoff after a ``c1`` claim, at several starting beliefs."""
    d = derived_quantities(params)
    b = stopping_threshold(params, d)
    threshold = b if threshold is None else threshold
    if pi_starts is None:
        pi_starts = [0.3, 0.5, assemble_pbe(params).p_hat, 0.9]
    rows = []
    for pi in pi_starts:
        est = estimate_employer_payoff(params, params.c1, threshold, pi, cfg, n_paths, shards)
        row = est.to_dict()
        if threshold == b:
            row["closed_form"] = float(employer_value(pi, params, d, b))
        rows.append(row)
    return {"estimator": "estimator_agreement", "threshold": _encode(threshold), "points": rows,
            "pass": all(r["pass"] for r in rows)}


def run_battery(params: GameParams, cfg: SimConfig, n_paths=100_000, shards=1,
                agreement_paths=None) -> dict:
    """All numerical equilibrium checks; ``report["pass"]`` is their conjunction."""
    eq = assemble_pbe(params)
    out = {"equilibrium": eq.to_dict()}
    if eq.regime is Regime.SEMI_SEPARATING:
        out["indifference_check"] = indifference_check(params, cfg, n_paths, shards)
    out["employer_deviation_sweep"] = employer_deviation_sweep(
        params, cfg, n_paths=n_paths, shards=shards).to_dict()
    out["weak_deviation_sweep"] = employee_deviation_sweep(
        params, cfg, kind="weak", n_paths=n_paths, shards=shards).to_dict()
    out["strong_deviation_sweep"] = employee_deviation_sweep(
        params, cfg, kind="strong", n_paths=n_paths, shards=shards).to_dict()
    out["pooling_comparison"] = pooling_comparison(params, cfg, n_paths, shards)
    out["estimator_agreement"] = estimator_agreement(params, cfg, n_paths=agreement_paths or max(2, n_paths // 5),
                                       shards=shards)
    checks = [v["pass"] for k, v in out.items() if k != "equilibrium"]
    out["pass"] = bool(all(checks))
    return out
