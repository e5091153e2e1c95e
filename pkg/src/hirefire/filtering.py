"""Simulation of the employer's belief process and of raw revenue paths.

Random streams are indexed by ``(seed, stream, path_index)`` through
:class:`numpy.random.SeedSequence` spawn keys, so path ``i`` is the same no
matter how a batch of paths is split into shards.  Each stream first yields
two uniforms (type draw, strategy coin) and then one standard normal per time
step.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import _kernels as K
from .exceptions import ConfigViolation, DomainViolation, MissingObservations
from .model import GameParams

__all__ = [
    "Measure", "Scheme", "SimConfig", "PathSample", "path_generator",
    "simulate_filter_path", "simulate_observation_path", "filter_from_observations",
    "euler_filter_from_observations", "euler_filter_from_increments", "subsample", "first_passage", "write_path_csv",
]

MAX_STEPS = 10**8


class Measure(enum.Enum):
    EMPLOYER = "employer"
    GIVEN_WEAK = "given_weak"
    GIVEN_STRONG = "given_strong"


class Scheme(enum.Enum):
    EULER = "euler"
    EXACT = "exact"


@dataclass(frozen=True)
class SimConfig:
    """Time grid and randomness of a simulation run.

    ``scheme="euler"`` steps the belief SDE with Euler-Maruyama and clamps to
    [0, 1]; ``scheme="exact"`` simulates revenue increments and evaluates the
    exact posterior on the grid (under the employer's measure the type is drawn
    first).
    """

    dt: float = 1e-3
    horizon: float = 200.0
    seed: int = 0
    scheme: Scheme = Scheme.EULER

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigViolation(f"dt must be a positive number, got {self.dt}")
        if not (math.isfinite(self.horizon) and self.horizon >= self.dt):
            raise ConfigViolation(f"horizon must be >= dt, got {self.horizon}")
        if self.n_steps > MAX_STEPS:
            raise ConfigViolation(f"horizon/dt = {self.n_steps} exceeds {MAX_STEPS} steps")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigViolation(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def to_dict(self):
        return {"dt": self.dt, "horizon": self.horizon, "seed": int(self.seed),
                "scheme": self.scheme.value}


@dataclass
class PathSample:
    times: np.ndarray
    pi: np.ndarray | None
    measure: Measure
    x: np.ndarray | None = None
    hit_time: float | None = None
    clamp_count: int = 0


def path_generator(seed, index, stream=0) -> np.random.Generator:
    """Independent generator for path ``index`` of ``stream`` under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise DomainViolation(name, f"{name} must lie in [0, 1], got {value}")


def model_code(measure: Measure, scheme: Scheme, u_type: float, pi0: float) -> int:
    """Kernel model for one path; the employer's measure draws the type when exact."""
    if scheme is Scheme.EULER:
        return {Measure.EMPLOYER: K.EMPLOYER, Measure.GIVEN_WEAK: K.EULER_WEAK,
                Measure.GIVEN_STRONG: K.EULER_STRONG}[measure]
    if measure is Measure.EMPLOYER:
        strong = u_type < pi0
    else:
        strong = measure is Measure.GIVEN_STRONG
    return K.EXACT_STRONG if strong else K.EXACT_WEAK


def _increments(cfg: SimConfig, index, stream):
    rng = path_generator(cfg.seed, index, stream)
    u = rng.random(2)
    z = np.empty(cfg.n_steps)
    K.fill_normals(rng, z)
    return u, math.sqrt(cfg.dt) * z


def euler_filter_from_increments(pi0, dw, dt, measure: Measure, params: GameParams):
    """Euler-Maruyama belief path driven by given Brownian increments.

    Returns ``(pi, clamp_count)`` with ``pi`` of length ``len(dw) + 1``.
    """
    omega = (params.mu1 - params.mu0) / params.sigma
    out = np.empty(len(dw) + 1)
    model = model_code(measure, Scheme.EULER, 0.0, pi0)
    clamps = K.trajectory(float(pi0), model, omega, float(dt), np.ascontiguousarray(dw, float), out)
    return out, int(clamps)


def simulate_filter_path(pi0, cfg: SimConfig, measure: Measure, params: GameParams,
                         path_index=0, stream=0) -> PathSample:
    """One belief trajectory started at ``pi0``.

    Under the employer's measure the belief is a martingale; given the weak
    (strong) type it drifts towards 0 (1).  0 and 1 are absorbing.
    """
    _check_prob("pi0", pi0)
    measure = Measure(measure)
    u, dw = _increments(cfg, path_index, stream)
    omega = (params.mu1 - params.mu0) / params.sigma
    model = model_code(measure, cfg.scheme, u[0], pi0)
    out = np.empty(cfg.n_steps + 1)
    clamps = K.trajectory(float(pi0), model, omega, cfg.dt, dw, out)
    times = cfg.dt * np.arange(cfg.n_steps + 1)
    return PathSample(times=times, pi=out, measure=measure, clamp_count=int(clamps))


def simulate_observation_path(mu_true, cfg: SimConfig, params: GameParams,
                              path_index=0, stream=0) -> PathSample:
    """Revenue path ``X_t = mu t + sigma W_t`` on the grid, ``X_0 = 0``.

    Shares its stream layout with :func:`simulate_filter_path`, so equal
    ``(seed, stream, path_index)`` couples the two through the same Brownian
    increments.
    """
    if mu_true == params.mu0:
        measure = Measure.GIVEN_WEAK
    elif mu_true == params.mu1:
        measure = Measure.GIVEN_STRONG
    else:
        raise DomainViolation("mu_true", f"mu_true must be mu0 or mu1, got {mu_true}")
    _, dw = _increments(cfg, path_index, stream)
    x = np.empty(cfg.n_steps + 1)
    x[0] = 0.0
    np.cumsum(mu_true * cfg.dt + params.sigma * dw, out=x[1:])
    times = cfg.dt * np.arange(cfg.n_steps + 1)
    return PathSample(times=times, pi=None, measure=measure, x=x)


def filter_from_observations(path: PathSample, pi0, params: GameParams) -> PathSample:
    """Exact posterior on the grid from the observed revenue path.

    Uses the likelihood ratio of the two drift hypotheses, evaluated in
    log-odds form.
    """
    if path.x is None:
        raise MissingObservations("path has no observation values")
    if not 0.0 < pi0 < 1.0:
        raise DomainViolation("pi0", f"pi0 must lie in (0, 1), got {pi0}")
    s2 = params.sigma**2
    log_lr = ((params.mu1 - params.mu0) / s2 * path.x
              - (params.mu1**2 - params.mu0**2) / (2.0 * s2) * path.times)
    pi = expit(math.log(pi0 / (1.0 - pi0)) + log_lr)
    return PathSample(times=path.times, pi=pi, measure=path.measure, x=path.x)


def euler_filter_from_observations(path: PathSample, pi0, params: GameParams) -> PathSample:
    """Euler-Maruyama discretisation of the filter SDE driven by the observed revenue.

    ``dPi = Pi (1 - Pi) (mu1 - mu0) / sigma^2 (dX - (mu0 + (mu1 - mu0) Pi) dt)``,
    evaluated on the grid of ``path``.  Unlike :func:`filter_from_observations`
    this is only exact in the limit ``dt -> 0``, which makes the pair a coupled
    test of the discretisation.
    """
    if path.x is None:
        raise MissingObservations("path has no observation values")
    _check_prob("pi0", pi0)
    dt = float(path.times[1] - path.times[0])
    out = np.empty(path.x.size)
    clamps = K.observed_euler(float(pi0), np.diff(path.x), dt, params.mu0, params.mu1,
                              params.sigma, out)
    return PathSample(times=path.times, pi=out, measure=path.measure, x=path.x,
                      clamp_count=int(clamps))


def subsample(path: PathSample, every: int) -> PathSample:
    """Every ``every``-th grid point of an observation path (same Brownian path, coarser grid)."""
    if every < 1:
        raise ConfigViolation(f"every must be >= 1, got {every}")
    pick = slice(None, None, int(every))
    return PathSample(times=path.times[pick], pi=None if path.pi is None else path.pi[pick],
                      measure=path.measure, x=None if path.x is None else path.x[pick])


def first_passage(path: PathSample, threshold) -> float | None:
    """First grid time with belief ``<= threshold``; ``None`` if never within the horizon.

    Also stored on ``path.hit_time``.
    """
    hits = np.flatnonzero(path.pi <= threshold)
    path.hit_time = float(path.times[hits[0]]) if hits.size else None
    return path.hit_time


def write_path_csv(path: PathSample, fh):
    from ._io import fmt

    writer = csv.writer(fh, lineterminator="\n")
    cols = ["t", "pi"] + (["x"] if path.x is not None else [])
    writer.writerow(cols)
    for k in range(path.times.size):
        row = [fmt(path.times[k]), fmt(path.pi[k])]
        if path.x is not None:
            row.append(fmt(path.x[k]))
        writer.writerow(row)
