"""Two-type mechanism comparison: survey, open petition, assurance contract.

Region classification follows the boundary conventions exactly as stated:
cascade-connected takes the weak inequality e >= alpha*g(pi*mu), the
coordination gap takes its own weak lower boundary e >= alpha*g(pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import SafetySpec, safety_g
from .exceptions import DomainError, RegionMismatchError

CASCADE_CONNECTED = "cascade_connected"
COORDINATION_GAP = "coordination_gap"
FUNDAMENTALLY_BLOCKED = "fundamentally_blocked"


@dataclass(frozen=True)
class CompareParams:
    """Primitives for the three-mechanism comparison.

    e      common expressive benefit (> 0)
    alpha  vulnerable-type exposure scalar (> 0)
    pi     supporter fraction (0 < pi <= 1)
    mu     invulnerable share among supporters
    k      assurance-contract signing friction
    safety SafetySpec with g(0) = 1, decreasing
    N      population size
    """

    e: float
    alpha: float
    pi: float
    mu: float
    k: float
    safety: SafetySpec
    N: int

    def __post_init__(self):
        if self.e <= 0 or self.alpha <= 0:
            raise DomainError("e and alpha must be positive")
        if not 0.0 < self.pi <= 1.0:
            raise DomainError("pi must lie in (0,1]")
        if not 0.0 <= self.mu <= 1.0:
            raise DomainError("mu must lie in [0,1]")
        if self.k < 0:
            raise DomainError("k must be nonnegative")
        if abs(safety_g(0.0, self.safety) - 1.0) > 1e-12:
            raise DomainError("comparison model requires g(0) = 1")
        if self.N < 2:
            raise DomainError("N must be at least 2")

    @property
    def pioneer_cost(self) -> float:
        """Exposure cost when only the invulnerable base is revealed."""
        return self.alpha * safety_g(self.pi * self.mu, self.safety)

    @property
    def full_coalition_cost(self) -> float:
        """Exposure cost when every supporter is revealed together."""
        return self.alpha * safety_g(self.pi, self.safety)


def classify_region(p: CompareParams) -> str:
    """Exactly one of the three regions for every parameter point."""
    if p.e >= p.pioneer_cost:
        return CASCADE_CONNECTED
    if p.e >= p.full_coalition_cost:
        return COORDINATION_GAP
    return FUNDAMENTALLY_BLOCKED


@dataclass(frozen=True)
class RiskThresholds:
    """Minimal beliefs in the high outcome under each mechanism (region ii).

    p_assurance  belief above which signing the assurance contract is preferred
    p_survey     belief above which post-survey public expression is preferred
    k_max        friction level at which the full-participation signing payoff
                 turns negative (diagnostic; classification is unaffected)
    """

    p_assurance: float
    p_survey: float
    k_max: float


def risk_dominance_thresholds(p: CompareParams) -> RiskThresholds:
    """Belief thresholds in the coordination gap; errors outside region ii."""
    region = classify_region(p)
    if region != COORDINATION_GAP:
        raise RegionMismatchError(f"risk-dominance thresholds need the coordination gap, got {region}")
    gain = p.e - p.full_coalition_cost          # >= 0 inside region ii
    p_assurance = p.k / gain if gain > 0 else math.inf if p.k > 0 else 0.0
    wedge = p.pioneer_cost - p.full_coalition_cost
    if wedge <= 0:
        raise RegionMismatchError("safety-in-numbers wedge vanishes (mu = 1 boundary)")
    p_survey = (p.pioneer_cost - p.e) / wedge
    return RiskThresholds(p_assurance=p_assurance, p_survey=p_survey, k_max=gain)


def cascade_min_base(xi: float, alpha: float, e: float) -> float:
    """Minimal invulnerable base pi*mu for petition-cascade completion, exponential g.

    Returns 0 when alpha <= e (pioneers are already willing).
    """
    if e <= 0:
        raise DomainError("e must be positive")
    if alpha <= e:
        return 0.0
    if xi <= 0:
        raise DomainError("xi must be positive when alpha > e")
    return math.log(alpha / e) / xi


def cascade_min_base_general(safety: SafetySpec, alpha: float, e: float,
                             tol: float = 1e-12) -> float:
    """Minimal base for any nonincreasing g, by monotone bisection.

    Returns math.inf when even a full-population coalition cannot carry the
    pioneer (e < alpha * g(1)).
    """
    if e <= 0 or alpha <= 0:
        raise DomainError("e and alpha must be positive")
    if e >= alpha * safety_g(0.0, safety):
        return 0.0
    if e < alpha * safety_g(1.0, safety):
        return math.inf
    lo, hi = 0.0, 1.0      # g(lo) > e/alpha >= g(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if alpha * safety_g(mid, safety) <= e:
            hi = mid
        else:
            lo = mid
    return hi


def _snap(x: float, tol: float = 1e-9) -> float:
    r = round(x)
    return float(r) if abs(x - r) < tol else x


@dataclass(frozen=True)
class AssuranceInterval:
    """Integer thresholds supporting the full-participation equilibrium in region ii."""

    T_lo: Optional[int]
    T_hi: Optional[int]
    feasible: bool
    region: str

    def values(self) -> range:
        if not self.feasible:
            return range(0)
        return range(self.T_lo, self.T_hi + 1)


def assurance_interval(p: CompareParams) -> AssuranceInterval:
    """Integer T in (pi*mu*N, pi*N]; empty intervals report infeasibility.

    The interval is reported for any region, with the region attached so
    callers can see when it is the operative object (region ii).
    """
    lo = math.floor(_snap(p.pi * p.mu * p.N)) + 1
    hi = math.floor(_snap(p.pi * p.N))
    if lo > hi:
        return AssuranceInterval(T_lo=None, T_hi=None, feasible=False,
                                 region=classify_region(p))
    return AssuranceInterval(T_lo=lo, T_hi=hi, feasible=True,
                             region=classify_region(p))


REGION_CSV_HEADER = ("e", "alpha", "pi", "mu", "region", "p_A", "p_S")


def region_row(p: CompareParams) -> list:
    """One CSV row of the region sweep schema (thresholds blank off-region)."""
    region = classify_region(p)
    if region == COORDINATION_GAP:
        rt = risk_dominance_thresholds(p)
        pa, ps = rt.p_assurance, rt.p_survey
    else:
        pa = ps = ""
    return [p.e, p.alpha, p.pi, p.mu, region, pa, ps]
