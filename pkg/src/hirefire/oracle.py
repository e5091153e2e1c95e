"""Finite-difference solutions of the employer's stopping problem and the weak
worker's boundary value problem.

Only the generator of the belief diffusion enters here; the closed forms of
:mod:`hirefire.equilibrium` are never consulted, so these grids serve as an
independent check on them.  The degenerate diffusion coefficient
``omega^2 pi^2 (1-pi)^2 / 2`` vanishes at 0 and 1, hence the grid is truncated
to ``[lo, hi]`` with the limiting values imposed there.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import solve_banded

from ._io import csv_text
from .exceptions import ConfigViolation, DomainViolation, NoConvergence, SingularSystem
from .model import GameParams

__all__ = ["GridConfig", "GridSolution", "solve_employer_vi", "solve_employee_bvp",
           "complementarity_residual"]


@dataclass(frozen=True)
class GridConfig:
    """Grid and PSOR settings.

    ``warm_start`` solves on a ladder of coarser grids (halving down to
    ``coarsest`` points) and interpolates each solution as the starting guess of
    the next level; the finest level is still iterated to ``tol``.
    """

    n_points: int = 4000
    lo: float = 1e-4
    hi: float = 1.0 - 1e-4
    relaxation: float = 1.9
    max_iter: int = 100_000
    tol: float = 1e-10
    warm_start: bool = True
    coarsest: int = 250

    def __post_init__(self):
        if self.n_points < 3:
            raise ConfigViolation("grid needs at least 3 points")
        if not 0.0 < self.lo < self.hi < 1.0:
            raise ConfigViolation(f"need 0 < lo < hi < 1, got [{self.lo}, {self.hi}]")
        if not 0.0 < self.relaxation < 2.0:
            raise ConfigViolation(f"relaxation must lie in (0, 2), got {self.relaxation}")


@dataclass
class GridSolution:
    pi_grid: np.ndarray
    values: np.ndarray
    boundary_estimate: float
    obstacle: float
    iterations: int = 0
    last_update: float = 0.0

    def to_csv(self):
        return csv_text(["pi", "value"], zip(self.pi_grid, self.values))

    def interpolate(self, pi):
        return np.interp(pi, self.pi_grid, self.values)


@njit(cache=True)
def _psor(lower, diag, upper, rhs, obstacle, v, relaxation, tol, max_iter):
    n = v.size
    for it in range(1, max_iter + 1):
        change = 0.0
        for i in range(1, n - 1):
            gs = (rhs[i] - lower[i] * v[i - 1] - upper[i] * v[i + 1]) / diag[i]
            new = v[i] + relaxation * (gs - v[i])
            if new < obstacle:
                new = obstacle
            d = abs(new - v[i])
            if d > change:
                change = d
            v[i] = new
        if change < tol:
            return it, change
    return -1, change


def _employer_system(params, grid):
    """Tridiagonal coefficients of ``-L V = f`` with ``f = mu0 - c1 + (mu1-mu0) pi``."""
    omega = (params.mu1 - params.mu0) / params.sigma
    h = grid[1] - grid[0]
    a = 0.5 * omega**2 * grid**2 * (1.0 - grid) ** 2 / h**2
    rhs = params.mu0 - params.c1 + (params.mu1 - params.mu0) * grid
    return -a, 2.0 * a + params.r, -a, rhs


def _employer_level(params, obstacle, cfg, n, guess):
    grid = np.linspace(cfg.lo, cfg.hi, n)
    lower, diag, upper, rhs = _employer_system(params, grid)
    v = np.maximum(guess(grid), obstacle) if guess is not None else np.full(n, obstacle)
    v[0] = obstacle
    # near 1 the solution is the never-fire value up to a term of order (1-pi)^(1-gamma1)
    v[-1] = max(rhs[-1] / params.r, obstacle)
    its, change = _psor(lower, diag, upper, rhs, float(obstacle), v, cfg.relaxation,
                        cfg.tol, cfg.max_iter)
    if its < 0:
        raise NoConvergence(cfg.max_iter, change)
    return grid, v, its, change


def solve_employer_vi(params: GameParams, obstacle=0.0, grid_cfg: GridConfig | None = None
                      ) -> GridSolution:
    """Employer's optimal stopping value after a ``c1`` claim, on a uniform grid.

    Solves ``max(L V + mu0 - c1 + (mu1 - mu0) pi, obstacle - V) = 0`` by
    projected SOR, where ``obstacle`` is the payoff of firing (0, or minus the
    firing cost).  ``boundary_estimate`` is the first grid point where the
    value exceeds the obstacle by more than ``tol``.
    """
    cfg = grid_cfg or GridConfig()
    obstacle = float(obstacle)
    cap = (params.c1 - params.mu0) / params.r
    if not -cap < obstacle <= 0.0:
        raise DomainViolation("obstacle", f"obstacle must lie in (-{cap:.9g}, 0], got {obstacle}")
    sizes = [cfg.n_points]
    if cfg.warm_start:
        while sizes[-1] // 2 >= cfg.coarsest:
            sizes.append(sizes[-1] // 2)
    guess = None
    total = 0
    for n in reversed(sizes):
        grid, v, its, change = _employer_level(params, obstacle, cfg, n, guess)
        total += its
        guess = (lambda x, g=grid, y=v.copy(): np.interp(x, g, y))
    above = np.flatnonzero(v > obstacle + cfg.tol)
    boundary = float(grid[above[0]]) if above.size else float(grid[-1])
    return GridSolution(pi_grid=grid, values=v, boundary_estimate=boundary, obstacle=obstacle,
                        iterations=total, last_update=float(change))


def complementarity_residual(solution: GridSolution, params: GameParams) -> np.ndarray:
    """Pointwise ``min(|discrete PDE residual| / diag, |V - obstacle|)`` at interior nodes."""
    lower, diag, upper, rhs = _employer_system(params, solution.pi_grid)
    v = solution.values
    res = rhs[1:-1] - (lower[1:-1] * v[:-2] + diag[1:-1] * v[1:-1] + upper[1:-1] * v[2:])
    return np.minimum(np.abs(res) / diag[1:-1], np.abs(v[1:-1] - solution.obstacle))


def solve_employee_bvp(params: GameParams, b, grid_cfg: GridConfig | None = None) -> GridSolution:
    """Weak worker's discounted salary on ``[b, hi]`` when fired at ``b``.

    ``U(b) = 0`` and ``U(hi) = c1/r``.  ``U`` approaches ``c1/r`` only like
    ``(1 - pi)^|gamma1|``, so when ``|gamma1|`` is small ``hi`` must be pushed
    towards 1 for the boundary value to be accurate.  The first-derivative term is centred
    wherever the cell Peclet number is at most one and differenced backwards
    (with its negative drift) elsewhere, so the matrix is always an M-matrix.
    The system is solved directly.
    """
    cfg = grid_cfg or GridConfig()
    if not 0.0 < b < cfg.hi:
        raise DomainViolation("b", f"b must lie in (0, {cfg.hi}), got {b}")
    omega = (params.mu1 - params.mu0) / params.sigma
    grid = np.linspace(b, cfg.hi, cfg.n_points)
    h = grid[1] - grid[0]
    x = grid[1:-1]
    diff = 0.5 * omega**2 * x**2 * (1.0 - x) ** 2 / h**2
    drift = -(omega**2) * x**2 * (1.0 - x) / h
    central = np.abs(drift) <= 2.0 * diff
    sub = np.where(central, diff - 0.5 * drift, diff - drift)     # U_{i-1}
    sup = np.where(central, diff + 0.5 * drift, diff)             # U_{i+1}
    main = np.where(central, -2.0 * diff, -2.0 * diff + drift) - params.r
    rhs = np.full(x.size, -params.c1)
    top = params.c1 / params.r
    rhs[-1] -= sup[-1] * top
    ab = np.zeros((3, x.size))
    ab[0, 1:] = sup[:-1]
    ab[1] = main
    ab[2, :-1] = sub[1:]
    try:
        inner = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(inner)):
        raise SingularSystem("non-finite solution of the tridiagonal system")
    values = np.concatenate([[0.0], inner, [top]])
    return GridSolution(pi_grid=grid, values=values, boundary_estimate=float(b), obstacle=0.0)
