"""
Finite differences as a second opinion
======================================

Solve the employer's stopping problem as a discrete obstacle problem and
compare with the closed form.
"""
import time

import numpy as np

from hirefire import derived_quantities, validate_params
from hirefire.equilibrium import employee_value_weak, employer_value, stopping_threshold
from hirefire.oracle import (GridConfig, complementarity_residual, solve_employee_bvp,
                             solve_employer_vi)

params = validate_params(mu0=1.4, mu1=1.7, sigma=1.0, p=0.5, r=0.05, c0=1.2, c1=1.5)
d = derived_quantities(params)
b = stopping_threshold(params, d)

t = time.perf_counter()
sol = solve_employer_vi(params)
print(f"4000 points in {time.perf_counter() - t:.2f}s, {sol.iterations} sweeps")
print(f"boundary {sol.boundary_estimate:.6f} vs closed form {b:.6f}")

x = sol.pi_grid
m = (x > b + 0.01) & (x < 0.99)
print(f"max |V_grid - V| = {np.max(np.abs(sol.values[m] - employer_value(x[m], params, d, b))):.2e}")
print(f"max complementarity residual = {complementarity_residual(sol, params).max():.2e}")

# the worker's problem lives on [b, 1): its grid starts at b
u = solve_employee_bvp(params, b)
xu = u.pi_grid
mu = (xu > b + 0.01) & (xu < 0.99)
print(f"max |U_grid - U| = "
      f"{np.max(np.abs(u.values[mu] - employee_value_weak(xu[mu], params, d, b))):.2e}")

# the boundary estimate is the first grid node above the obstacle: error ~ one grid step
for n in (1000, 2000, 4000, 8000):
    s = solve_employer_vi(params, grid_cfg=GridConfig(n_points=n))
    print(f"n = {n:5d}: boundary error {abs(s.boundary_estimate - b):.2e}")
