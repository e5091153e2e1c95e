"""Closed-form equilibrium of the hiring game and its three extensions.

Probabilities are posterior probabilities of the strong type.  Value functions
accept scalars or numpy arrays and return the same shape.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import expit

from .exceptions import AssumptionViolation, DomainViolation
from .model import DerivedQuantities, GameParams, derived_quantities

__all__ = [
    "Stop", "Regime", "Equilibrium", "FiringCostParams", "TypeUncertaintyParams",
    "InterviewParams", "InterviewEquilibrium",
    "stopping_threshold", "employer_value", "employee_value_weak", "indifference_point",
    "weak_type_mixing", "assemble_pbe", "firing_cost_threshold", "employer_value_firing",
    "firing_cost_pbe", "type_uncertainty_pbe", "interview_indifference", "interview_pbe",
]


class Stop(enum.Enum):
    """Degenerate stopping rules."""

    NEVER = "never_stop"
    IMMEDIATE = "stop_immediately"


class Regime(enum.Enum):
    SEMI_SEPARATING = "semi_separating"
    POOLING = "pooling"
    NO_HIRE = "no_hire"


def threshold_to_json(threshold):
    return threshold.value if isinstance(threshold, Stop) else float(threshold)


def threshold_from_json(value):
    if isinstance(value, str):
        return Stop(value)
    return float(value)


@dataclass(frozen=True)
class Equilibrium:
    """Strategy profile, beliefs and stopping rules of a PBE.

    ``a_star`` holds the probabilities of claiming ``c1`` for the weak and the
    strong type, ``belief`` the employer's posterior after ``c0`` and after
    ``c1``.  ``threshold_low``/``threshold_high`` are the firing rules applied
    after ``c0``/``c1``: a probability ``b`` (fire once the belief is ``<= b``)
    or a :class:`Stop` marker.
    """

    a_star: tuple
    belief: tuple
    threshold_low: object
    threshold_high: object
    regime: Regime
    value_weak: float
    value_strong: float | None = None
    p_hat: float | None = None
    hire: bool = True
    employer_value: float | None = None

    def to_dict(self):
        return {
            "a_star": list(self.a_star),
            "belief": list(self.belief),
            "threshold_low": threshold_to_json(self.threshold_low),
            "threshold_high": threshold_to_json(self.threshold_high),
            "regime": self.regime.value,
            "value_weak": self.value_weak,
            "value_strong": self.value_strong,
            "p_hat": self.p_hat,
            "hire": self.hire,
            "employer_value": self.employer_value,
        }


@dataclass(frozen=True)
class FiringCostParams:
    epsilon: float

    def check(self, params: GameParams):
        cap = (params.c1 - params.mu0) / params.r
        if not 0.0 < self.epsilon < cap:
            raise DomainViolation(
                "epsilon", f"firing cost must lie in (0, (c1 - mu0)/r) = (0, {cap:.9g}), "
                           f"got {self.epsilon}")


@dataclass(frozen=True)
class TypeUncertaintyParams:
    """``p1`` = P(strong belief), ``q`` = P(strong type | strong belief)."""

    p1: float
    q: float

    def check(self):
        if not 0.0 < self.p1 < 1.0:
            raise DomainViolation("p1", f"p1 must lie in (0, 1), got {self.p1}")
        if not 0.0 < self.q <= 1.0:
            raise DomainViolation("q", f"q must lie in (0, 1], got {self.q}")

    @property
    def prior(self):
        return self.p1 * self.q


@dataclass(frozen=True)
class InterviewParams:
    """``q`` = P(strong test result | weak type); strong types always pass."""

    q: float

    def check(self, params: GameParams):
        lo = params.c0 / params.c1
        if not lo < self.q < 1.0:
            raise DomainViolation("q", f"interview pass rate must lie in (c0/c1, 1) = "
                                       f"({lo:.9g}, 1), got {self.q}")


@dataclass(frozen=True)
class InterviewEquilibrium:
    """PBE with a test result observed next to the salary claim.

    ``belief`` and ``stopping`` are ordered (c0 & weak result, c0 & strong
    result, c1 & weak result, c1 & strong result).
    """

    a_star: tuple
    belief: tuple
    stopping: tuple
    p_hat_interview: float
    regime: Regime
    value_weak: float

    def to_dict(self):
        return {
            "a_star": list(self.a_star),
            "belief": list(self.belief),
            "stopping": [threshold_to_json(s) for s in self.stopping],
            "p_hat_interview": self.p_hat_interview,
            "regime": self.regime.value,
            "value_weak": self.value_weak,
        }


def _never_stop_value(pi, params: GameParams, salary):
    """Employer's value of keeping the worker forever, ``(mu0 - c + (mu1-mu0) pi) / r``."""
    return (params.mu0 - salary + (params.mu1 - params.mu0) * pi) / params.r


def _bayes_mixing(prior, p_hat, signal=1.0):
    # weak-side probability of claiming c1 that makes the posterior equal p_hat;
    # signal is P(strong type | sender is of the "strong" kind)
    return prior / (1.0 - prior) * ((signal - p_hat) / p_hat)


def stopping_threshold(params: GameParams, derived: DerivedQuantities) -> float:
    """Belief level below which the employer fires a worker paid ``c1``."""
    g1 = derived.gamma1
    return (-(params.c1 - params.mu0) * g1
            / (params.mu1 - params.c1 - (params.mu1 - params.mu0) * g1))


def _continuation(pi, params, derived, b, stop_payoff):
    """Solution of the employer's ODE on (b, 1) with value ``stop_payoff`` and zero slope at b."""
    pi = np.asarray(pi, dtype=float)
    g1 = derived.gamma1
    amp = stop_payoff - _never_stop_value(b, params, params.c1)
    limit = (params.mu1 - params.c1) / params.r
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = pi * (1.0 - b) / (b * (1.0 - pi))
        out = amp * ratio**g1 * (1.0 - pi) / (1.0 - b) + _never_stop_value(pi, params, params.c1)
    return np.where(pi >= 1.0, limit, out)


def employer_value(pi, params: GameParams, derived: DerivedQuantities, b: float):
    """Employer's optimal value after a ``c1`` claim, as a function of the belief.

    Zero on ``[0, b]``; on ``(b, 1)`` it is the smooth-fit solution of the
    stopping problem, rising to ``(mu1 - c1)/r`` at ``pi = 1``.
    """
    pi = np.asarray(pi, dtype=float)
    out = np.where(pi > b, _continuation(pi, params, derived, b, 0.0), 0.0)
    return out[()] if out.ndim == 0 else out


def employee_value_weak(pi, params: GameParams, derived: DerivedQuantities, b: float):
    """Expected discounted salary of a weak type paid ``c1`` until the belief falls to ``b``."""
    pi = np.asarray(pi, dtype=float)
    c = params.c1 / params.r
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = pi * (1.0 - b) / ((1.0 - pi) * b)
        inner = c * (1.0 - ratio**derived.gamma1)
    out = np.where(pi >= 1.0, c, np.where(pi > b, inner, 0.0))
    return out[()] if out.ndim == 0 else out


def _indifference(params, derived, b, pass_rate=1.0):
    # belief at which pass_rate * U(belief) = c0/r, in log-odds to avoid overflow
    shift = math.log1p(-params.c0 / (pass_rate * params.c1)) / derived.gamma1
    return float(expit(math.log(b / (1.0 - b)) + shift))


def indifference_point(params: GameParams, derived: DerivedQuantities, b: float) -> float:
    """Posterior ``p_hat`` with ``U(p_hat) = c0/r``."""
    return _indifference(params, derived, b)


def weak_type_mixing(params: GameParams, derived: DerivedQuantities, b: float,
                     p_hat: float) -> float:
    """Probability that the weak type claims ``c1``.

    Interior exactly when ``p < p_hat``, chosen so that the posterior after a
    ``c1`` claim is ``p_hat``; otherwise 1.
    """
    if params.p < p_hat:
        return _bayes_mixing(params.p, p_hat)
    return 1.0


def _build_pbe(params, derived, b, p_hat, prior, a0):
    pi1 = max(p_hat, prior)
    if prior < p_hat:
        regime = Regime.SEMI_SEPARATING
        # indifferent between c0 forever and U(p_hat) = c0/r
        value_weak = params.c0 / params.r
    else:
        regime = Regime.POOLING
        value_weak = float(employee_value_weak(prior, params, derived, b))
    return Equilibrium(
        a_star=(a0, 1.0),
        belief=(0.0, pi1),
        threshold_low=Stop.NEVER,
        threshold_high=b,
        regime=regime,
        value_weak=value_weak,
        p_hat=p_hat,
        employer_value=float(employer_value(pi1, params, derived, b)),
    )


def assemble_pbe(params: GameParams) -> Equilibrium:
    """Equilibrium of the benchmark game.

    The strong type always claims ``c1``; the weak type mixes with
    :func:`weak_type_mixing`.  After ``c0`` the employer never fires, after
    ``c1`` it fires when the belief reaches :func:`stopping_threshold`.
    ``value_strong`` has no closed form and is left unset (see
    :mod:`hirefire.verification`).
    """
    derived = derived_quantities(params)
    b = stopping_threshold(params, derived)
    p_hat = indifference_point(params, derived, b)
    a0 = weak_type_mixing(params, derived, b, p_hat)
    return _build_pbe(params, derived, b, p_hat, params.p, a0)


def firing_cost_threshold(params: GameParams, derived: DerivedQuantities,
                          fc: FiringCostParams) -> float:
    fc.check(params)
    eps, g1 = fc.epsilon, derived.gamma1
    return (-(params.c1 - params.mu0 - eps * params.r) * g1
            / (params.mu1 - params.c1 + params.r * eps - (params.mu1 - params.mu0) * g1))


def employer_value_firing(pi, params: GameParams, derived: DerivedQuantities,
                          fc: FiringCostParams):
    """Employer's value after a ``c1`` claim when firing costs ``epsilon``.

    Returns ``-epsilon`` on ``[0, b_eps]`` (the value of firing there) and the
    smooth-fit continuation value above.  Not hiring at all (worth 0) is a
    separate decision, see :func:`firing_cost_pbe`.
    """
    b_eps = firing_cost_threshold(params, derived, fc)
    pi = np.asarray(pi, dtype=float)
    out = np.where(pi > b_eps, _continuation(pi, params, derived, b_eps, -fc.epsilon),
                   -fc.epsilon)
    return out[()] if out.ndim == 0 else out


def firing_cost_pbe(params: GameParams, fc: FiringCostParams) -> Equilibrium:
    """Equilibrium with a firing cost.

    Same construction as :func:`assemble_pbe` with the lowered threshold
    ``b_eps``.  If the employer's value at the posterior after ``c1`` is not
    positive, hiring at ``c1`` is unprofitable and the no-hire profile is
    returned: both types claim ``c0``, ``c0`` workers are kept forever and a
    ``c1`` claim is rejected outright.
    """
    derived = derived_quantities(params)
    b_eps = firing_cost_threshold(params, derived, fc)
    p_hat = indifference_point(params, derived, b_eps)
    pi1 = max(p_hat, params.p)
    gate = float(employer_value_firing(pi1, params, derived, fc))
    if gate > 0.0:
        a0 = weak_type_mixing(params, derived, b_eps, p_hat)
        return replace(_build_pbe(params, derived, b_eps, p_hat, params.p, a0),
                       employer_value=gate)
    stay = params.c0 / params.r
    return Equilibrium(
        a_star=(0.0, 0.0),
        belief=(params.p, params.p),
        threshold_low=Stop.NEVER,
        threshold_high=Stop.IMMEDIATE,
        regime=Regime.NO_HIRE,
        value_weak=stay,
        value_strong=stay,
        p_hat=p_hat,
        hire=False,
        employer_value=gate,
    )


def type_uncertainty_pbe(params: GameParams, tu: TypeUncertaintyParams) -> Equilibrium:
    """Equilibrium when the worker only receives a noisy signal of their own type.

    The effective prior ``p1 * q`` replaces ``params.p``.  ``a_star`` is indexed
    by the worker's signal (weak belief, strong belief); ``value_weak`` is the
    value of a worker with the weak belief, who is always a weak type.

    Raises
    ------
    AssumptionViolation
        If ``q <= p_hat``.
    """
    tu.check()
    derived = derived_quantities(params)
    b = stopping_threshold(params, derived)
    p_hat = indifference_point(params, derived, b)
    if not tu.q > p_hat:
        raise AssumptionViolation(
            f"type-uncertainty model needs q > p_hat = {p_hat:.9g}, got q = {tu.q}")
    prior = tu.p1 * tu.q
    if prior < p_hat:
        a0 = _bayes_mixing(tu.p1, p_hat, tu.q)
    else:
        a0 = 1.0
    return _build_pbe(params, derived, b, p_hat, prior, a0)


def interview_indifference(params: GameParams, derived: DerivedQuantities, b: float,
                           iv: InterviewParams) -> float:
    """Posterior ``P_hat`` with ``q * U(P_hat) = c0/r``."""
    iv.check(params)
    return _indifference(params, derived, b, iv.q)


def interview_pbe(params: GameParams, iv: InterviewParams) -> InterviewEquilibrium:
    """Equilibrium with an interview whose result the employer observes.

    A weak test result identifies the weak type, so a ``c1`` claim with a weak
    result is fired at once; with a strong result the usual threshold ``b``
    applies.  The weak type mixes so that the posterior after (``c1``, strong
    result) is ``P_hat``, or claims ``c1`` always when the prior already makes
    that posterior exceed ``P_hat``.
    """
    derived = derived_quantities(params)
    b = stopping_threshold(params, derived)
    P = interview_indifference(params, derived, b, iv)
    p, q = params.p, iv.q
    a_weak = min(p * (1.0 - P) / (P * (1.0 - p) * q), 1.0)
    pooled = p / (p + (1.0 - p) * q)
    pi_strong = max(P, pooled)
    u = float(employee_value_weak(pi_strong, params, derived, b))
    value_weak = (1.0 - a_weak) * params.c0 / params.r + a_weak * q * u
    return InterviewEquilibrium(
        a_star=(a_weak, 1.0),
        belief=(0.0, 0.0, 0.0, pi_strong),
        stopping=(Stop.NEVER, Stop.NEVER, Stop.IMMEDIATE, b),
        p_hat_interview=P,
        regime=Regime.SEMI_SEPARATING if a_weak < 1.0 else Regime.POOLING,
        value_weak=value_weak,
    )


def describe(params: GameParams) -> dict:
    """Diagnostics printed next to an equilibrium: omega, roots, b and p_hat."""
    derived = derived_quantities(params)
    b = stopping_threshold(params, derived)
    return {
        "omega": derived.omega,
        "gamma1": derived.gamma1,
        "gamma2": derived.gamma2,
        "b": b,
        "p_hat": indifference_point(params, derived, b),
    }
