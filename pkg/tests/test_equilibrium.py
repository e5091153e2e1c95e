"""Closed forms checked against root searches and ODE residuals built here from
the generator of the belief diffusion alone."""
import dataclasses
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from hirefire import equilibrium as E
from hirefire.exceptions import AssumptionViolation, DomainViolation
from hirefire.model import derived_quantities, validate_params

P_HAT = (5.0 - math.sqrt(5.0)) / 4.0      # U(p_hat) = 24 for the default parameters


# -- independent oracles -----------------------------------------------------


def phi(pi, gamma):
    """Homogeneous solution pi^gamma (1-pi)^(1-gamma) of the employer's ODE."""
    return pi**gamma * (1.0 - pi) ** (1.0 - gamma)


def dphi(pi, gamma):
    return phi(pi, gamma) * (gamma / pi - (1.0 - gamma) / (1.0 - pi))


def never(pi, params, salary):
    return (params.mu0 - salary + (params.mu1 - params.mu0) * pi) / params.r


def smooth_fit_root(params, stop_payoff=0.0):
    """Boundary where the bounded solution matching ``stop_payoff`` has zero slope."""
    g1 = derived_quantities(params).gamma1
    slope = (params.mu1 - params.mu0) / params.r

    def fit(b):
        amp = (stop_payoff - never(b, params, params.c1)) / phi(b, g1)
        return amp * dphi(b, g1) + slope

    return brentq(fit, 1e-9, 1 - 1e-9, xtol=1e-15, rtol=1e-15)


def ode_residual(f, pi, params, h=1e-4, drift=0.0, source=0.0):
    omega = (params.mu1 - params.mu0) / params.sigma
    d2 = (f(pi + h) - 2 * f(pi) + f(pi - h)) / h**2
    d1 = (f(pi + h) - f(pi - h)) / (2 * h)
    return (0.5 * omega**2 * pi**2 * (1 - pi) ** 2 * d2 + drift * d1
            - params.r * f(pi) + source)


def setup(params):
    d = derived_quantities(params)
    return d, E.stopping_threshold(params, d)


# -- benchmark ---------------------------------------------------------------


def test_threshold_reproduces_plotted_boundary(base):
    d, b = setup(base)
    assert b == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert round(b, 3) == 0.167


def test_homogeneous_solutions_solve_the_ode(base):
    d, _ = setup(base)
    pi = np.linspace(0.1, 0.9, 9)
    for g in (d.gamma1, d.gamma2):
        res = ode_residual(lambda x: phi(x, g), pi, base)
        assert np.max(np.abs(res / phi(pi, g))) < 1e-6


@pytest.mark.parametrize("over", [{}, dict(r=0.2), dict(sigma=0.4, c1=1.65), dict(mu1=3.0)])
def test_threshold_matches_smooth_fit_root(make_params, over):
    params = make_params(**over)
    _, b = setup(params)
    assert b == pytest.approx(smooth_fit_root(params), abs=1e-10)


def test_employer_value_shape(base):
    d, b = setup(base)
    pi = np.linspace(0, 1, 2001)
    v = E.employer_value(pi, base, d, b)
    assert np.all(v[pi <= b] == 0.0)
    assert np.all(np.diff(v) >= -1e-12)
    assert E.employer_value(1.0, base, d, b) == pytest.approx(4.0, abs=1e-12)
    assert E.employer_value(1 - 1e-9, base, d, b) == pytest.approx(4.0, abs=1e-6)
    assert E.employer_value(0.999, base, d, b) == pytest.approx(4.0, abs=0.15)


def test_employer_value_smooth_fit_and_ode(base):
    d, b = setup(base)
    h = 1e-5
    assert E.employer_value(b, base, d, b) == 0.0
    right = (E.employer_value(b + h, base, d, b) - E.employer_value(b, base, d, b)) / h
    assert abs(right) < 1e-3
    pi = np.linspace(b + 0.02, 0.98, 25)
    src = base.mu0 - base.c1 + (base.mu1 - base.mu0) * pi
    res = ode_residual(lambda x: E.employer_value(x, base, d, b), pi, base, source=src)
    assert np.max(np.abs(res)) < 1e-5


def test_weak_value_bvp(base):
    d, b = setup(base)
    omega = d.omega
    u = lambda x: E.employee_value_weak(x, base, d, b)   # noqa: E731
    pi = np.linspace(b + 0.02, 0.98, 25)
    drift = -omega**2 * pi**2 * (1 - pi)
    assert np.max(np.abs(ode_residual(u, pi, base, drift=drift, source=base.c1))) < 1e-4
    assert u(b) == 0.0
    assert u(1 - 1e-12) == pytest.approx(30.0, abs=1e-6)
    assert u(1.0) == 30.0
    assert np.all(np.diff(u(np.linspace(0, 1, 1001))) >= 0)


def test_indifference_point(base):
    d, b = setup(base)
    p_hat = E.indifference_point(base, d, b)
    assert p_hat == pytest.approx(P_HAT, abs=1e-12)
    assert float(E.employee_value_weak(p_hat, base, d, b)) == pytest.approx(24.0, abs=1e-9)
    root = brentq(lambda x: E.employee_value_weak(x, base, d, b) - 24.0, b + 1e-9, 1 - 1e-9,
                  xtol=1e-15)
    assert p_hat == pytest.approx(root, abs=1e-12)
    # the six-digit 0.690986 is a rounding of 0.690983: U there is 24.00006
    assert float(E.employee_value_weak(0.690986, base, d, b)) == pytest.approx(24.0, abs=1e-4)


def test_semi_separating_profile(base):
    eq = E.assemble_pbe(base)
    assert eq.regime is E.Regime.SEMI_SEPARATING
    assert eq.a_star[0] == pytest.approx(0.447214, abs=1e-6)
    assert eq.a_star[1] == 1.0
    assert eq.belief == (0.0, pytest.approx(P_HAT, abs=1e-12))
    assert eq.threshold_low is E.Stop.NEVER
    assert eq.threshold_high == pytest.approx(1 / 6, abs=1e-12)
    assert eq.value_weak == pytest.approx(24.0, abs=1e-12)
    p, a0 = base.p, eq.a_star[0]
    assert p / (p + (1 - p) * a0) == pytest.approx(eq.p_hat, abs=1e-12)


def test_p_hat_does_not_depend_on_prior(make_params):
    a, b = E.assemble_pbe(make_params(p=0.5)), E.assemble_pbe(make_params(p=0.6))
    assert a.p_hat == b.p_hat
    assert b.regime is E.Regime.SEMI_SEPARATING


def test_pooling_regime(make_params):
    params = make_params(p=0.8)
    eq = E.assemble_pbe(params)
    d, b = setup(params)
    assert eq.regime is E.Regime.POOLING
    assert eq.a_star == (1.0, 1.0)
    assert eq.belief == (0.0, 0.8)
    assert eq.value_weak == pytest.approx(float(E.employee_value_weak(0.8, params, d, b)))
    assert eq.value_weak >= 24.0


def test_prior_at_p_hat_is_pooling(make_params):
    eq = E.assemble_pbe(make_params(p=P_HAT + 1e-15))
    assert eq.regime is E.Regime.POOLING


def test_equilibrium_json_roundtrip(base):
    out = E.assemble_pbe(base).to_dict()
    assert out["threshold_low"] == "never_stop"
    assert E.threshold_from_json(out["threshold_low"]) is E.Stop.NEVER
    assert out["regime"] == "semi_separating"


@settings(max_examples=150, deadline=None)
@given(mu0=st.floats(0.5, 3), gap=st.floats(0.05, 2), f1=st.floats(0.05, 0.95),
       f0=st.floats(0.05, 1.0), sigma=st.floats(0.1, 3), r=st.floats(0.005, 0.5),
       p=st.floats(0.01, 0.99))
def test_benchmark_invariants(mu0, gap, f1, f0, sigma, r, p):
    params = validate_params(mu0=mu0, mu1=mu0 + gap, sigma=sigma, p=p, r=r, c0=f0 * mu0,
                             c1=mu0 + f1 * gap)
    d, b = setup(params)
    eq = E.assemble_pbe(params)
    assert 0 < b < eq.p_hat <= 1
    # p_hat can sit closer to 1 than double precision resolves; rounding of
    # pi / (1 - pi) grows like 1 / (1 - p_hat)
    assume(eq.p_hat < 1 - 1e-6)
    assert float(E.employee_value_weak(eq.p_hat, params, d, b)) == pytest.approx(
        params.c0 / params.r, rel=1e-8)
    assert 0 <= eq.a_star[0] <= 1
    assert eq.employer_value > 0
    if eq.regime is E.Regime.SEMI_SEPARATING:
        assert p / (p + (1 - p) * eq.a_star[0]) == pytest.approx(eq.p_hat, rel=1e-9)


# -- firing cost -------------------------------------------------------------


def test_firing_cost_threshold(base):
    d, _ = setup(base)
    b1 = E.firing_cost_threshold(base, d, E.FiringCostParams(1.0))
    assert b1 == pytest.approx(0.074074074, abs=1e-9)
    assert b1 == pytest.approx(smooth_fit_root(base, -1.0), abs=1e-10)
    b05 = E.firing_cost_threshold(base, d, E.FiringCostParams(0.5))
    assert b05 == pytest.approx(smooth_fit_root(base, -0.5), abs=1e-10)
    assert b1 < b05 < 1 / 6


@pytest.mark.parametrize("eps", [0.5, 1.0, 1.9])
def test_firing_cost_value(base, eps):
    d, _ = setup(base)
    fc = E.FiringCostParams(eps)
    be = E.firing_cost_threshold(base, d, fc)
    v = lambda x: E.employer_value_firing(x, base, d, fc)   # noqa: E731
    assert v(be) == pytest.approx(-eps, abs=1e-12)
    assert v(be / 2) == -eps
    h = 1e-5 * be
    assert abs((v(be + h) - v(be)) / h) < 1e-3
    assert v(1 - 1e-10) == pytest.approx(4.0, abs=1e-6)
    pi = np.linspace(be + 0.02, 0.98, 20)
    src = base.mu0 - base.c1 + (base.mu1 - base.mu0) * pi
    assert np.max(np.abs(ode_residual(v, pi, base, source=src))) < 1e-5


def test_firing_cost_profiles(make_params):
    fc = E.FiringCostParams(1.0)
    # with eps = 1 the indifference point drops to 0.4721 < 0.5, so p = 0.5 pools
    eq = E.firing_cost_pbe(make_params(p=0.5), fc)
    assert eq.regime is E.Regime.POOLING
    assert eq.p_hat == pytest.approx(0.472135955, abs=1e-9)
    lo = make_params(p=0.3)
    eq = E.firing_cost_pbe(lo, fc)
    base = E.assemble_pbe(lo)
    assert eq.regime is E.Regime.SEMI_SEPARATING
    assert eq.threshold_high == pytest.approx(0.074074074, abs=1e-9)
    assert eq.a_star[0] == pytest.approx(0.4791574, abs=1e-7)
    assert eq.a_star[0] > base.a_star[0]
    assert 0.3 / (0.3 + 0.7 * eq.a_star[0]) == pytest.approx(eq.p_hat, abs=1e-12)
    assert eq.hire and eq.employer_value > 0


def test_firing_cost_no_hire(make_params):
    params = make_params(c0=0.8, p=0.3)
    fc = E.FiringCostParams(1.0)
    d, _ = setup(params)
    eq = E.firing_cost_pbe(params, fc)
    assert float(E.employer_value_firing(max(eq.p_hat, 0.3), params, d, fc)) < 0
    assert eq.regime is E.Regime.NO_HIRE and not eq.hire
    assert eq.a_star == (0.0, 0.0)
    assert eq.belief == (0.3, 0.3)
    assert eq.threshold_low is E.Stop.NEVER and eq.threshold_high is E.Stop.IMMEDIATE
    assert eq.value_weak == eq.value_strong == pytest.approx(params.c0 / params.r)


def test_no_hire_gate_flips_with_prior(make_params):
    fc = E.FiringCostParams(1.0)
    regimes = [E.firing_cost_pbe(make_params(c0=0.8, p=p), fc).regime for p in (0.3, 0.5)]
    assert regimes == [E.Regime.NO_HIRE, E.Regime.POOLING]


def test_firing_cost_reduces_to_benchmark(base):
    a = E.firing_cost_pbe(base, E.FiringCostParams(1e-9)).to_dict()
    b = E.assemble_pbe(base).to_dict()
    assert a.keys() == b.keys()
    for k in a:
        if isinstance(a[k], (float, int)) and not isinstance(a[k], bool):
            assert a[k] == pytest.approx(b[k], abs=1e-6), k
        elif isinstance(a[k], list):
            assert a[k] == pytest.approx(b[k], abs=1e-6), k
        else:
            assert a[k] == b[k], k


@pytest.mark.parametrize("eps", [0.0, -1.0, 2.5])
def test_firing_cost_domain(base, eps):
    with pytest.raises(DomainViolation):
        E.firing_cost_pbe(base, E.FiringCostParams(eps))


# -- type uncertainty --------------------------------------------------------


def test_type_uncertainty_collapses_to_benchmark(base):
    assert E.type_uncertainty_pbe(base, E.TypeUncertaintyParams(0.5, 1.0)) == E.assemble_pbe(base)


def test_type_uncertainty_mixing(base):
    eq = E.type_uncertainty_pbe(base, E.TypeUncertaintyParams(0.5, 0.8))
    assert eq.regime is E.Regime.SEMI_SEPARATING
    assert eq.a_star[0] == pytest.approx(0.1577709, abs=1e-7)
    assert eq.belief[1] == pytest.approx(P_HAT, abs=1e-12)
    # posterior after c1: strong-belief senders are strong w.p. q, weak-belief ones never
    p1, q, a0 = 0.5, 0.8, eq.a_star[0]
    assert p1 * q / (p1 + (1 - p1) * a0) == pytest.approx(P_HAT, abs=1e-12)


def test_type_uncertainty_pooling(base):
    eq = E.type_uncertainty_pbe(base, E.TypeUncertaintyParams(0.9, 0.8))
    assert eq.regime is E.Regime.POOLING
    assert eq.belief[1] == pytest.approx(0.72)


@pytest.mark.parametrize("q", [0.65, P_HAT])
def test_type_uncertainty_rejects_weak_signal(base, q):
    with pytest.raises(AssumptionViolation):
        E.type_uncertainty_pbe(base, E.TypeUncertaintyParams(0.5, q))


@pytest.mark.parametrize("p1, q", [(0.0, 0.8), (1.0, 0.8), (0.5, 0.0), (0.5, 1.2)])
def test_type_uncertainty_domain(base, p1, q):
    with pytest.raises(DomainViolation):
        E.type_uncertainty_pbe(base, E.TypeUncertaintyParams(p1, q))


# -- interview ---------------------------------------------------------------


def test_interview_indifference(base):
    d, b = setup(base)
    P = E.interview_indifference(base, d, b, E.InterviewParams(0.9))
    assert P == pytest.approx(0.84375, abs=1e-9)
    root = brentq(lambda x: 0.9 * E.employee_value_weak(x, base, d, b) - 24.0, b + 1e-9,
                  1 - 1e-9, xtol=1e-15)
    assert P == pytest.approx(root, abs=1e-12)
    near = E.interview_indifference(base, d, b, E.InterviewParams(1 - 1e-12))
    assert near == pytest.approx(P_HAT, abs=1e-9)


def test_interview_profile(base):
    eq = E.interview_pbe(base, E.InterviewParams(0.9))
    p, q, a = 0.5, 0.9, eq.a_star[0]
    assert a == pytest.approx(0.205761, abs=1e-6)
    assert eq.a_star[1] == 1.0
    assert p / (p + (1 - p) * a * q) == pytest.approx(eq.p_hat_interview, abs=1e-10)
    assert eq.belief[3] == pytest.approx(0.84375, abs=1e-9)
    assert eq.stopping[2] is E.Stop.IMMEDIATE
    assert eq.stopping[3] == pytest.approx(1 / 6)
    # indifference: claiming c1 is worth q U(P_hat) = c0/r
    assert eq.value_weak == pytest.approx(24.0, abs=1e-9)


def test_interview_pooling_when_prior_high(make_params):
    eq = E.interview_pbe(make_params(p=0.9), E.InterviewParams(0.9))
    assert eq.regime is E.Regime.POOLING
    assert eq.a_star == (1.0, 1.0)
    assert eq.belief[3] == pytest.approx(0.9 / (0.9 + 0.1 * 0.9))


@pytest.mark.parametrize("q", [0.7, 0.5, 1.0])
def test_interview_domain(base, q):
    with pytest.raises(DomainViolation):
        E.interview_pbe(base, E.InterviewParams(q))


def test_describe(base):
    out = E.describe(base)
    assert out["omega"] == pytest.approx(0.3)
    assert out["b"] == pytest.approx(1 / 6)
    assert out["p_hat"] == pytest.approx(P_HAT)


def test_value_functions_keep_shape(base):
    d, b = setup(base)
    assert np.ndim(E.employer_value(0.5, base, d, b)) == 0
    assert E.employee_value_weak(np.zeros((2, 3)), base, d, b).shape == (2, 3)
    assert dataclasses.is_dataclass(E.assemble_pbe(base))
