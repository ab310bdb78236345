"""Oracles shared between module tests and the acceptance suite."""

import math
from dataclasses import replace

import numpy as np

from assurekit.finite_n import FiniteNSolver, SignalGrid
from assurekit.overton import _DEFAULT_GRID, _q_high_cached
from assurekit.presets import finite_n_params


def enumerate_binomial_outcomes(n, q):
    """All 2^n outcomes with probabilities built trial by trial."""
    probs = np.empty(2 ** n)
    counts = np.empty(2 ** n, dtype=int)
    for bits in range(2 ** n):
        p = 1.0
        k = 0
        for t in range(n):
            if bits >> t & 1:
                p *= q
                k += 1
            else:
                p *= 1.0 - q
        probs[bits] = p
        counts[bits] = k
    return probs, counts


def run_overton_mc(params, prior, T, n_draws=1_000_000, seed=20240817):
    """Simulated success-conditioned prevalence mean vs the quadrature shift.

    Returns (mc_shift, standard_error). Prevalence is drawn from the
    discretized prior so the estimand matches the quadrature target; the
    binomial success draw and event conditioning are fully simulated.
    """
    grid = _DEFAULT_GRID
    w = grid.measure(prior)
    qs = np.array([_q_high_cached(replace(params, pi=float(x)), T)
                   for x in grid.nodes])
    rng = np.random.default_rng(seed)
    idx = rng.choice(grid.nodes.size, size=n_draws, p=w)
    M = rng.binomial(params.N, qs[idx])
    pis = grid.nodes[idx][M >= T]
    prior_mean = float(w @ grid.nodes)
    mc_shift = pis.mean() - prior_mean
    se = pis.std(ddof=1) / math.sqrt(pis.size)
    return mc_shift, se


def run_finite_game_mc(thresholds=(40, 56, 70), n_draws=1_000_000, seed=73):
    """Simulate the full finite-N game per threshold.

    Returns rows (T, p_mc, p_exact, se). The solve uses a refined signal grid
    so the interpolated-strategy kink bias sits inside the Monte Carlo noise
    (the success probability itself is grid-stable to ~1e-7).
    """
    params = replace(finite_n_params(),
                     grid=SignalGrid.default(0.1, n_signal=161, n_theta=101))
    solver = FiniteNSolver(params)
    rng = np.random.default_rng(seed)
    chunk = 20_000
    rows = []
    for T in thresholds:
        prof = solver.solve_profile(T)
        _, p_exact, _ = solver.objective_from_profile(prof)
        hits = 0
        done = 0
        while done < n_draws:
            d = min(chunk, n_draws - done)
            theta = solver.th[rng.choice(solver.th.size, size=d,
                                         p=solver.prior_measure)]
            support = rng.random((d, params.N)) < theta[:, None]
            x = rng.standard_normal((d, params.N))
            m = theta[:, None] + params.sigma_m * rng.standard_normal((d, params.N))
            M = (support & (x >= prof.cutoff_at(m))).sum(axis=1)
            hits += int((M >= T).sum())
            done += d
        p_mc = hits / n_draws
        se = math.sqrt(max(p_mc * (1 - p_mc), 1e-12) / n_draws)
        rows.append((T, p_mc, p_exact, se))
    return rows
