"""Compiled per-path loops for the belief process.

Model codes: 0 Euler under the employer's measure, 1 Euler given the weak
type, 2 Euler given the strong type, 3/4 exact log-odds update given the
weak/strong type.  Every kernel draws its normals from the numpy Generator it
is handed, one per step, so trajectories and Monte Carlo passes built on the
same stream coincide bit for bit.
"""
import math

import numpy as np
from numba import njit

EMPLOYER, EULER_WEAK, EULER_STRONG, EXACT_WEAK, EXACT_STRONG = 0, 1, 2, 3, 4


@njit(cache=True, nogil=True)
def euler_step(pi, dw, dt, omega, model):
    vol = omega * pi * (1.0 - pi)
    if model == EULER_WEAK:
        drift = -omega * omega * pi * pi * (1.0 - pi)
    elif model == EULER_STRONG:
        drift = omega * omega * pi * (1.0 - pi) * (1.0 - pi)
    else:
        drift = 0.0
    return pi + drift * dt + vol * dw


@njit(cache=True, nogil=True)
def _logit(pi):
    if pi <= 0.0:
        return -np.inf
    if pi >= 1.0:
        return np.inf
    return math.log(pi / (1.0 - pi))


@njit(cache=True, nogil=True)
def fill_normals(rng, out):
    for j in range(out.size):
        out[j] = rng.standard_normal()


@njit(cache=True, nogil=True)
def trajectory(pi0, model, omega, dt, dw, out):
    """Belief path driven by Brownian increments ``dw``; returns the clamp count."""
    out[0] = pi0
    pi = pi0
    clamps = 0
    if model >= EXACT_WEAK:
        lo = _logit(pi0)
        shift = (0.5 if model == EXACT_STRONG else -0.5) * omega * omega * dt
        for j in range(dw.size):
            lo = lo + shift + omega * dw[j]
            out[j + 1] = 1.0 / (1.0 + math.exp(-lo))
        return 0
    for j in range(dw.size):
        pi = euler_step(pi, dw[j], dt, omega, model)
        if pi < 0.0:
            pi = 0.0
            clamps += 1
        elif pi > 1.0:
            pi = 1.0
            clamps += 1
        out[j + 1] = pi
    return clamps


@njit(cache=True, nogil=True)
def observed_euler(pi0, dx, dt, mu0, mu1, sigma, out):
    """Euler steps of the filter driven by revenue increments; returns the clamp count."""
    k = (mu1 - mu0) / (sigma * sigma)
    out[0] = pi0
    pi = pi0
    clamps = 0
    for j in range(dx.size):
        pi = pi + k * pi * (1.0 - pi) * (dx[j] - (mu0 + (mu1 - mu0) * pi) * dt)
        if pi < 0.0:
            pi = 0.0
            clamps += 1
        elif pi > 1.0:
            pi = 1.0
            clamps += 1
        out[j + 1] = pi
    return clamps


@njit(cache=True, nogil=True)
def passage(rng, pi0, model, omega, dt, n_steps, decay, thresholds, hit_idx, acc_out):
    """Simulate one belief path until every threshold has been reached.

    ``thresholds`` must be sorted in decreasing order.  On return
    ``hit_idx[i]`` is the first grid index with belief ``<= thresholds[i]``
    (-1 if not reached within ``n_steps``) and ``acc_out[i]`` is
    ``sum_{j < hit} decay**j * pi_j`` (up to ``n_steps`` when not reached).
    Returns the number of clamping events.
    """
    m = thresholds.size
    for i in range(m):
        hit_idx[i] = -1
        acc_out[i] = 0.0
    sq = math.sqrt(dt)
    pi = pi0
    exact = model >= EXACT_WEAK
    lo = _logit(pi0)
    shift = (0.5 if model == EXACT_STRONG else -0.5) * omega * omega * dt
    ptr = 0
    while ptr < m and pi <= thresholds[ptr]:
        hit_idx[ptr] = 0
        ptr += 1
    disc = 1.0
    acc = 0.0
    clamps = 0
    j = 0
    while j < n_steps and ptr < m:
        acc += disc * pi
        disc *= decay
        dw = sq * rng.standard_normal()
        if exact:
            lo = lo + shift + omega * dw
            pi = 1.0 / (1.0 + math.exp(-lo))
        else:
            pi = euler_step(pi, dw, dt, omega, model)
            if pi < 0.0:
                pi = 0.0
                clamps += 1
            elif pi > 1.0:
                pi = 1.0
                clamps += 1
        j += 1
        while ptr < m and pi <= thresholds[ptr]:
            hit_idx[ptr] = j
            acc_out[ptr] = acc
            ptr += 1
        if pi == 0.0 or pi == 1.0:
            # absorbed: remaining thresholds are out of reach
            if pi == 1.0:
                acc += disc * (1.0 - decay ** (n_steps - j)) / (1.0 - decay)
            break
    for i in range(ptr, m):
        acc_out[i] = acc
    return clamps
