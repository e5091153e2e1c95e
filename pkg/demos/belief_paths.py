"""
Simulating beliefs
==================

The employer's posterior that a worker is strong, under three laws: the
employer's own (type unknown) and the two conditional laws.  The last part
rebuilds a belief path from simulated revenue.
"""
import numpy as np

from hirefire import SimConfig, validate_params
from hirefire.filtering import (euler_filter_from_observations, filter_from_observations,
                                first_passage, simulate_filter_path, simulate_observation_path)

params = validate_params(mu0=1.4, mu1=1.7, sigma=1.0, p=0.5, r=0.05, c0=1.2, c1=1.5)
cfg = SimConfig(dt=0.01, horizon=50.0, seed=7)

for measure in ("employer", "given_weak", "given_strong"):
    ends = [simulate_filter_path(0.69, cfg, measure, params, path_index=i).pi[-1]
            for i in range(500)]
    print(f"{measure:13s} mean belief at T=50: {np.mean(ends):.3f}")

# how long until a weak worker is fired?
hits = [first_passage(simulate_filter_path(0.69, cfg, "given_weak", params, path_index=i), 1 / 6)
        for i in range(500)]
times = [t for t in hits if t is not None]
print(f"weak workers fired before T=50: {len(times)}/500, median tenure {np.median(times):.1f}")

# revenue path of a strong worker and the two ways of filtering it
fine = SimConfig(dt=0.001, horizon=20.0, seed=7)
obs = simulate_observation_path(params.mu1, fine, params)
exact = filter_from_observations(obs, 0.5, params)
euler = euler_filter_from_observations(obs, 0.5, params)
print(f"belief after 20 units of revenue: exact {exact.pi[-1]:.4f}, Euler {euler.pi[-1]:.4f}")
print(f"largest disagreement along the path: {np.max(np.abs(exact.pi - euler.pi)):.2e}")
