"""Cutoffs, the participation map, fixed points, stability, and trust."""

import math
from dataclasses import replace

import numpy as np
import pytest

import assurekit as ak
from assurekit.core import SafetySpec, binom_pmf, binom_tail, safety_g
from assurekit.equilibrium import (EPS_P, FixedPointResult, participatory_share,
                                   solve_q_low)
from assurekit.presets import baseline_params, whistleblowing_params


# ---------------------------------------------------------------------------
# success probabilities
# ---------------------------------------------------------------------------

def test_success_probs_own_signature_suffices():
    sp = ak.success_probs(0.3, 1, 100)
    assert sp.p_with == 1.0


def test_success_probs_nobody_else():
    sp = ak.success_probs(0.0, 2, 100)
    assert sp.p_with == 0.0 and sp.p_without == 0.0


def test_success_probs_pivotal_identity():
    rng = np.random.default_rng(5)
    for _ in range(25):
        N = int(rng.integers(3, 300))
        T = int(rng.integers(1, N))
        q = float(rng.uniform())
        sp = ak.success_probs(q, T, N)
        assert 0.0 <= sp.p_without <= sp.p_with <= 1.0
        assert abs(sp.pivotal - binom_pmf(N - 1, T - 1, q)) < 1e-12


def test_success_probs_baseline_cross_check():
    # unconditional N-trial success at the participatory equilibrium
    assert binom_tail(100, 47, 0.468) == pytest.approx(0.521, abs=0.01)


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------

def test_cutoff_reduces_to_exposure_term():
    p = baseline_params(s=0.0, w_bar=0.0, k=0.0)
    for q in (0.2, 0.5, 0.9):
        got = ak.type_cutoff(p.alpha_H, q, 30, p)
        assert got == pytest.approx(p.alpha_H * safety_g(q, p.safety), abs=1e-12)


def test_cutoff_gap_is_exposure_gap():
    p = baseline_params()
    q = 0.4
    lo = ak.type_cutoff(0.5, q, 47, p)
    hi = ak.type_cutoff(2.0, q, 47, p)
    assert hi - lo == pytest.approx(1.5 * safety_g(q, p.safety), abs=1e-12)


def test_cutoff_ordering_randomized():
    p = baseline_params()
    rng = np.random.default_rng(17)
    for _ in range(40):
        q = float(rng.uniform(0.05, 0.95))
        T = int(rng.integers(1, p.N))
        if ak.success_probs(q, T, p.N).p_with <= EPS_P:
            continue
        assert ak.type_cutoff(p.alpha_H, q, T, p) >= ak.type_cutoff(p.alpha_L, q, T, p)


def test_cutoff_sentinels():
    p = baseline_params()                    # eta(0) = -0.065 < 0
    assert ak.type_cutoff(p.alpha_H, 0.0, 5, p) == math.inf
    p0 = baseline_params(k=0.0)              # eta(0) = 0 >= 0
    assert ak.type_cutoff(p0.alpha_H, 0.0, 5, p0) == -math.inf


def test_cutoff_baseline_shares():
    p = baseline_params()
    share_L, share_H = ak.type_shares(0.468, 47, p)
    assert share_L == pytest.approx(0.77, abs=0.02)
    assert share_H == pytest.approx(0.64, abs=0.02)


# ---------------------------------------------------------------------------
# trust variant
# ---------------------------------------------------------------------------

def test_trust_reduces_to_baseline_bitwise():
    p = baseline_params()
    for q in (0.1, 0.45, 0.8):
        for a in (p.alpha_L, p.alpha_H):
            assert ak.type_cutoff_with_trust(a, q, 47, p, rho=1.0) == \
                ak.type_cutoff(a, q, 47, p)


def test_trust_hits_vulnerable_harder():
    p = baseline_params()
    q, T = 0.4, 47
    rise_L = (ak.type_cutoff_with_trust(p.alpha_L, q, T, p, rho=0.9)
              - ak.type_cutoff(p.alpha_L, q, T, p))
    rise_H = (ak.type_cutoff_with_trust(p.alpha_H, q, T, p, rho=0.9)
              - ak.type_cutoff(p.alpha_H, q, T, p))
    assert rise_H > rise_L > 0.0


def test_trust_lowers_participatory_equilibrium():
    p = baseline_params()
    q1 = ak.solve_q_high(47, p).q
    q9 = ak.solve_q_high(47, replace(p, rho=0.9)).q
    assert q9 < q1


def test_trust_monotone_and_gap_widens():
    p = baseline_params()
    rhos = (1.0, 0.95, 0.9, 0.85, 0.8)
    qs = [ak.solve_q_high(47, replace(p, rho=r)).q for r in rhos]
    assert all(b <= a + 1e-12 for a, b in zip(qs, qs[1:]))
    gaps = [ak.type_cutoff_with_trust(p.alpha_H, 0.4, 47, p, rho=r)
            - ak.type_cutoff_with_trust(p.alpha_L, 0.4, 47, p, rho=r) for r in rhos]
    assert all(b >= a - 1e-12 for a, b in zip(gaps, gaps[1:]))


def test_trust_curve_bitwise_equal_at_unit_rho():
    p = baseline_params()
    base = ak.optimize_threshold("conditional", p, range(44, 51))
    trust = ak.optimize_threshold("conditional", replace(p, rho=1.0), range(44, 51))
    for a, b in zip(base.points, trust.points):
        assert a.q_high == b.q_high and a.objective == b.objective


# ---------------------------------------------------------------------------
# participation map and fixed points
# ---------------------------------------------------------------------------

def test_map_zero_support():
    p = baseline_params(pi=0.0)
    for q in (0.0, 0.3, 1.0):
        assert ak.participation_map(q, 20, p) == 0.0


def test_map_range_and_zero_start():
    p = baseline_params()
    rng = np.random.default_rng(23)
    for _ in range(40):
        q = float(rng.uniform())
        T = int(rng.integers(1, p.N))
        s = ak.participation_map(q, T, p)
        assert 0.0 <= s <= p.pi + 1e-15
    assert ak.participation_map(0.0, 10, p) == 0.0


def test_fixed_point_baseline():
    p = baseline_params()
    res = ak.solve_q_high(47, p)
    assert res.converged
    assert res.q == pytest.approx(0.468, abs=0.0005)
    assert abs(ak.participation_map(res.q, 47, p) - res.q) < 1e-6


def test_fixed_point_no_support():
    p = baseline_params(pi=0.0)
    res = ak.solve_fixed_point(5, 0.7, p)
    assert res.converged and res.q == pytest.approx(0.0, abs=1e-7)


def test_fixed_point_low_start_reaches_low_branch():
    p = baseline_params()
    res = solve_q_low(47, p)
    fps = ak.enumerate_fixed_points(47, p)
    assert res.converged
    assert res.q == pytest.approx(fps.q_low, abs=1e-6)


def test_fixed_point_failure_is_explicit():
    p = baseline_params()
    res = ak.solve_fixed_point(47, 0.6, p, max_iter=1)
    assert isinstance(res, FixedPointResult)
    assert not res.converged and res.residual > 0


def test_enumerate_baseline_structure():
    p = baseline_params()
    fps = ak.enumerate_fixed_points(47, p)
    assert fps.n_crossings == 3
    assert fps.q_low == pytest.approx(0.0, abs=1e-6)
    assert fps.q_high == pytest.approx(0.468, abs=0.0005)
    assert fps.q_low < fps.q_unstable < fps.q_high
    for pt in fps.points:
        assert pt.residual < 1e-8


def test_enumerate_zero_support():
    fps = ak.enumerate_fixed_points(10, baseline_params(pi=0.0))
    assert len(fps) == 1 and fps.points[0].q == 0.0


def test_enumerate_matches_damped_iteration():
    p = baseline_params()
    for T in range(5, 100, 10):
        fps = ak.enumerate_fixed_points(T, p)
        res = participatory_share(T, p)
        assert abs(fps.q_high - res.q) < 1e-6


def test_tipping_point_separates_basins():
    p = baseline_params()
    for T in (10, 47):
        fps = ak.enumerate_fixed_points(T, p)
        up = ak.solve_fixed_point(T, min(fps.q_unstable + 1e-3, 1.0), p)
        down = ak.solve_fixed_point(T, max(fps.q_unstable - 1e-3, 0.0), p)
        assert up.q == pytest.approx(fps.q_high, abs=1e-6)
        assert down.q == pytest.approx(fps.q_low, abs=1e-6)


def test_q_high_nondecreasing_in_prevalence():
    p = baseline_params()
    qs = [ak.solve_q_high(47, replace(p, pi=pi)).q
          for pi in (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)]
    assert all(b >= a - 1e-9 for a, b in zip(qs, qs[1:]))


def test_type_shares_symmetric_types():
    p = baseline_params(alpha_L=1.0, alpha_H=1.0)
    sl, sh = ak.type_shares(0.4, 30, p)
    assert sl == sh


def test_whistleblowing_shares():
    params = whistleblowing_params(0.15)
    curve = ak.optimize_threshold("conditional", params, range(2, 100))
    q = curve.point_at(curve.argmax_T).q_high
    sl, sh = ak.type_shares(q, curve.argmax_T, params)
    assert sl == pytest.approx(0.528, abs=0.01)
    assert sh == pytest.approx(0.014, abs=0.01)


# ---------------------------------------------------------------------------
# contraction diagnostic
# ---------------------------------------------------------------------------

def test_contraction_no_support():
    d = ak.contraction_diagnostic(10, baseline_params(pi=0.0))
    assert d.sup_abs_slope == 0.0 and d.is_contraction


def test_contraction_safety_off_unique():
    p = baseline_params(safety=SafetySpec.exponential(0.0), pi=0.05)
    d = ak.contraction_diagnostic(10, p)
    assert d.is_contraction
    fps = ak.enumerate_fixed_points(10, p)
    assert fps.n_crossings == 1


def test_no_contraction_at_baseline():
    d = ak.contraction_diagnostic(47, baseline_params())
    assert d.sup_abs_slope > 1.0 and not d.is_contraction
    assert ak.enumerate_fixed_points(47, baseline_params()).n_crossings == 3
