"""
Checking the equilibrium by simulation
======================================

Small versions of the verification battery.  The acceptance tests run the
same estimators with 1e5 paths and dt = 1e-3.
"""
from hirefire import SimConfig, validate_params
from hirefire import verification as V

params = validate_params(mu0=1.4, mu1=1.7, sigma=1.0, p=0.5, r=0.05, c0=1.2, c1=1.5)
cfg = SimConfig(dt=0.01, horizon=200.0, seed=42)

rep = V.indifference_check(params, cfg, n_paths=5000)
est = rep["estimate"]
print(f"weak type claiming c1: {est['mean']:.3f} +- {est['stderr']:.3f} "
      f"vs c0/r = {rep['target']:.1f} (pass: {rep['pass']})")
print(f"grid monitoring shifts this by about {rep['budget']['dt_bias']:.3f} at dt = {cfg.dt}")

# The employer cannot gain by firing earlier or later
sweep = V.employer_deviation_sweep(params, cfg, n_paths=5000)
print()
print(sweep.to_csv())

# Weak type: any claim probability gives the same value
weak = V.employee_deviation_sweep(params, cfg, kind="weak", n_paths=5000)
print(weak.to_csv())

# Two estimators of the employer's payoff
for row in V.estimator_agreement(params, cfg, pi_starts=[0.5, 0.9], n_paths=3000)["points"]:
    print(f"pi0 = {row['pi_start']}: type draw {row['type_draw']['mean']:.3f}, "
          f"filter {row['filter']['mean']:.3f}, closed form {row['closed_form']:.3f}")
