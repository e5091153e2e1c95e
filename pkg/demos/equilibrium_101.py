"""
Closed-form equilibrium in a few lines
======================================

Firing threshold, salary-claim probabilities and value functions for the
default parameter set.
"""
import numpy as np

from hirefire import assemble_pbe, derived_quantities, validate_params
from hirefire.equilibrium import employee_value_weak, employer_value

params = validate_params(mu0=1.4, mu1=1.7, sigma=1.0, p=0.5, r=0.05, c0=1.2, c1=1.5)
d = derived_quantities(params)
print(f"omega = {d.omega:.4f}, roots = ({d.gamma1:.4f}, {d.gamma2:.4f})")

eq = assemble_pbe(params)
b = eq.threshold_high
print(f"fire a c1 worker once the belief drops to b = {b:.6f}")
print(f"belief after a c1 claim: {eq.belief[1]:.6f} ({eq.regime.value})")
print(f"weak type claims c1 with probability {eq.a_star[0]:.6f}")

# values on a coarse grid: V is the employer's, U the weak worker's after a c1 claim
pi = np.linspace(0.0, 1.0, 11)
V = employer_value(pi, params, d, b)
U = employee_value_weak(pi, params, d, b)
print("\n  pi        V         U")
for row in zip(pi, V, U):
    print("  %.1f  %8.4f  %8.4f" % row)

# a higher prior makes the c1 claim safe for both types
for p in (0.3, 0.69, 0.8):
    e = assemble_pbe(validate_params(1.4, 1.7, 1.0, p, 0.05, 1.2, 1.5))
    print(f"p = {p}: {e.regime.value:16s} a* = ({e.a_star[0]:.3f}, {e.a_star[1]:.0f})")
