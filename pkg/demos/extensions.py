"""
Three variations on the benchmark
=================================

Firing costs, workers unsure of their own type, and an interview that
reveals weak types with some probability.
"""
from hirefire import validate_params
from hirefire.equilibrium import (FiringCostParams, InterviewParams, TypeUncertaintyParams,
                                  assemble_pbe, firing_cost_pbe, interview_pbe,
                                  type_uncertainty_pbe)

base = dict(mu0=1.4, mu1=1.7, sigma=1.0, r=0.05, c0=1.2, c1=1.5)
params = validate_params(p=0.3, **base)
print("benchmark threshold:", round(assemble_pbe(params).threshold_high, 6))

# Firing costs make the employer more patient
for eps in (0.5, 1.0, 1.4):
    eq = firing_cost_pbe(params, FiringCostParams(eps))
    print(f"epsilon = {eps}: threshold {eq.threshold_high:.6f}, {eq.regime.value}, "
          f"employer value {eq.employer_value:.4f}")

# With a low c0 and a costly firing the employer would rather not hire at c1
cheap = validate_params(mu0=1.4, mu1=1.7, sigma=1.0, p=0.3, r=0.05, c0=0.8, c1=1.5)
print("cheap c0, epsilon = 1:", firing_cost_pbe(cheap, FiringCostParams(1.0)).regime.value)

# Workers who only get a signal of their type: q = 1 is the benchmark again
even = validate_params(p=0.5, **base)
for q in (1.0, 0.9, 0.8):
    eq = type_uncertainty_pbe(even, TypeUncertaintyParams(p1=0.5, q=q))
    print(f"signal precision {q}: a* = ({eq.a_star[0]:.4f}, {eq.a_star[1]:.0f})")

# Interviews: weak types pass with probability q
for q in (0.95, 0.9, 0.85):
    iv = interview_pbe(even, InterviewParams(q))
    print(f"pass rate {q}: posterior target {iv.p_hat_interview:.5f}, "
          f"weak type claims c1 w.p. {iv.a_star[0]:.4f}")
