"""Model primitives: safety shapes, signing utility, exact binomial machinery."""

import math

import numpy as np
import pytest
import scipy.stats as st

from assurekit.core import (ModelParams, SafetySpec, Threshold, TypeDistribution,
                            binom_pmf, binom_pmf_vector, binom_tail, eta,
                            norm_cdf, safety_g, trunc_mean_share)
from assurekit.exceptions import ConditioningError, DomainError
from assurekit.presets import baseline_params, whistleblowing_params


# ---------------------------------------------------------------------------
# safety function
# ---------------------------------------------------------------------------

def test_safety_exponential_endpoints():
    spec = SafetySpec.exponential(3.0)
    assert safety_g(0.0, spec) == 1.0
    assert safety_g(1.0, spec) == pytest.approx(0.049787, abs=1e-6)


def test_safety_linear():
    assert safety_g(0.5, SafetySpec.linear(0.9)) == pytest.approx(0.55, abs=1e-15)


def test_safety_step_right_continuous():
    spec = SafetySpec.step(1.0, 0.2, 0.5)
    assert safety_g(0.5 - 1e-12, spec) == 1.0
    assert safety_g(0.5, spec) == 0.2          # value at the jump is the later level
    assert safety_g(0.9, spec) == 0.2


def test_safety_domain_error():
    with pytest.raises(DomainError):
        safety_g(-0.1, SafetySpec.exponential(3.0))
    with pytest.raises(DomainError):
        safety_g(1.5, SafetySpec.linear(0.5))


@pytest.mark.parametrize("spec", [
    SafetySpec.exponential(3.0),
    SafetySpec.exponential(0.0),
    SafetySpec.linear(0.9),
    SafetySpec.step(1.0, math.exp(-3.0), 0.5),
])
def test_safety_nonincreasing_on_grid(spec):
    qs = np.linspace(0.0, 1.0, 1001)
    vals = [safety_g(float(q), spec) for q in qs]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_safety_validation():
    with pytest.raises(DomainError):
        SafetySpec.linear(1.2)
    with pytest.raises(DomainError):
        SafetySpec.step(0.2, 1.0, 0.5)    # increasing step
    with pytest.raises(DomainError):
        SafetySpec(kind="cubic")


# ---------------------------------------------------------------------------
# signing utility
# ---------------------------------------------------------------------------

def test_eta_baseline_values():
    p = baseline_params()
    assert eta(0.0, p) == pytest.approx(-0.065, abs=1e-15)
    assert eta(0.5, p) == pytest.approx(0.11, abs=1e-15)


def test_eta_whistleblowing_friction():
    p = whistleblowing_params(0.15)
    assert eta(0.0, p) == pytest.approx(-0.08, abs=1e-15)


# ---------------------------------------------------------------------------
# binomial machinery
# ---------------------------------------------------------------------------

def test_binom_tail_exact_rational():
    # sum_{k=5}^{10} C(10,k) = 638, over 2^10
    assert binom_tail(10, 5, 0.5) == pytest.approx(638 / 1024, abs=1e-14)


def test_binom_tail_degenerate_edges():
    assert binom_tail(99, 46, 0.0) == 0.0
    assert binom_tail(99, 0, 0.3) == 1.0
    assert binom_tail(5, 6, 0.4) == 0.0


def test_binom_pmf_reported_values():
    assert binom_pmf(99, 49, 0.5) == pytest.approx(0.0796, abs=5e-4)
    assert binom_pmf(9, 4, 0.5) == pytest.approx(126 / 512, abs=1e-14)
    assert binom_pmf(5, 0, 0.0) == 1.0


def test_binom_domain_errors():
    with pytest.raises(DomainError):
        binom_tail(10, 5, 1.2)
    with pytest.raises(DomainError):
        binom_tail(10, 12, 0.5)
    with pytest.raises(DomainError):
        binom_pmf(10, 11, 0.5)
    with pytest.raises(DomainError):
        binom_pmf_vector(200_001, 0.5)


def test_tail_pmf_consistency():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 400))
        k = int(rng.integers(0, n + 1))
        q = float(rng.uniform())
        lhs = binom_tail(n, k, q) - binom_tail(n, k + 1, q)
        assert abs(lhs - binom_pmf(n, k, q)) < 1e-12


def test_tail_monotonicity():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 200))
        k = int(rng.integers(0, n))
        qs = np.sort(rng.uniform(size=6))
        vals = [binom_tail(n, k, float(q)) for q in qs]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        q = float(rng.uniform())
        by_k = [binom_tail(n, kk, q) for kk in range(n + 2)]
        assert all(b <= a + 1e-12 for a, b in zip(by_k, by_k[1:]))


def test_against_scipy():
    rng = np.random.default_rng(13)
    for _ in range(30):
        n = int(rng.integers(1, 1000))
        k = int(rng.integers(0, n + 1))
        q = float(rng.uniform(0.01, 0.99))
        assert binom_tail(n, k, q) == pytest.approx(st.binom.sf(k - 1, n, q), abs=1e-11)
        assert binom_pmf(n, k, q) == pytest.approx(st.binom.pmf(k, n, q), abs=1e-11)


def test_large_population_tail():
    # mode-anchored recurrence stays finite at the N cap
    v = binom_tail(100_000, 50_000, 0.5)
    assert v == pytest.approx(st.binom.sf(49_999, 100_000, 0.5), abs=1e-9)


@pytest.mark.parametrize("n,q,kmin", [(1, 0.3, 1), (2, 0.77, 1), (7, 0.42, 3),
                                      (12, 0.5, 7), (15, 0.31, 5)])
def test_brute_force_enumeration_oracle(n, q, kmin):
    from _helpers import enumerate_binomial_outcomes
    probs, counts = enumerate_binomial_outcomes(n, q)
    tail = probs[counts >= kmin].sum()
    assert abs(binom_tail(n, kmin, q) - tail) < 1e-12
    if tail > 0:
        cond_mean = (counts[counts >= kmin] / n * probs[counts >= kmin]).sum() / tail
        assert abs(trunc_mean_share(n, kmin, q) - cond_mean) < 1e-12


# ---------------------------------------------------------------------------
# truncated mean share
# ---------------------------------------------------------------------------

def test_trunc_mean_no_conditioning_is_mean():
    assert trunc_mean_share(100, 0, 0.37) == pytest.approx(0.37, abs=1e-14)


def test_trunc_mean_degenerate_two():
    assert trunc_mean_share(2, 2, 0.5) == pytest.approx(1.0, abs=1e-14)


def test_trunc_mean_baseline_excess():
    v = trunc_mean_share(100, 47, 0.468)
    assert v >= 0.47
    assert v - 0.468 == pytest.approx(0.038, abs=0.005)


def test_trunc_mean_null_conditioning():
    with pytest.raises(ConditioningError):
        trunc_mean_share(10, 3, 0.0)


def test_trunc_mean_dominates_base_rates():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(2, 150))
        t = int(rng.integers(0, n + 1))
        q = float(rng.uniform(0.02, 0.98))
        if binom_tail(n, t, q) <= 0:
            continue
        v = trunc_mean_share(n, t, q)
        assert v >= max(q, t / n) - 1e-12


# ---------------------------------------------------------------------------
# distributions, parameters, thresholds
# ---------------------------------------------------------------------------

def test_norm_cdf_accuracy():
    xs = np.linspace(-8, 8, 41)
    for x in xs:
        assert abs(norm_cdf(float(x)) - st.norm.cdf(x)) < 1e-12


def test_tabulated_distribution():
    d = TypeDistribution.tabulated([-1.0, 0.0, 2.0], [0.0, 0.25, 1.0])
    assert d.cdf(-5.0) == 0.0
    assert d.cdf(3.0) == 1.0
    assert d.cdf(1.0) == pytest.approx(0.625)
    assert d.survival(0.0) == pytest.approx(0.75)
    with pytest.raises(DomainError):
        TypeDistribution.tabulated([0.0, 0.0], [0.0, 1.0])
    with pytest.raises(DomainError):
        TypeDistribution.tabulated([0.0, 1.0], [0.5, 0.2])


def test_params_validation():
    with pytest.raises(DomainError):
        baseline_params(pi=1.5)
    with pytest.raises(DomainError):
        baseline_params(alpha_L=3.0)      # exceeds alpha_H
    with pytest.raises(DomainError):
        baseline_params(rho=-0.1)
    with pytest.raises(DomainError):
        ModelParams(N=1, pi=0.5, lam=0.5, alpha_L=0.0, alpha_H=1.0,
                    safety=SafetySpec.exponential(1.0), s=0.0, w_bar=0.0, k=0.0)


def test_threshold_bounds():
    t = Threshold(47, 100)
    assert t.tau == pytest.approx(0.47)
    with pytest.raises(DomainError):
        Threshold(0, 100)
    with pytest.raises(DomainError):
        Threshold(100, 100)
