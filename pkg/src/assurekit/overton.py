"""Outside-observer updating over support prevalence and the discourse objective.

The observer holds a Beta prior over prevalence pi, agents play the
participatory equilibrium at the true pi, and success (M >= T) is the
observed event. All integrals use a composite-trapezoid rule on a fixed
node grid; expectations are taken under the discretized prior measure so
that total-expectation identities hold to float precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from .core import ModelParams, binom_pmf_vector
from .equilibrium import participatory_share
from .exceptions import ConvergenceError, DegenerateUpdateError, DomainError

QUAD_NODES = 201
QUAD_LO = 1e-6
QUAD_HI = 1.0 - 1e-6


@dataclass(frozen=True)
class BetaPrior:
    """Beta(a, b) prior over a [0,1] quantity (prevalence pi or latent state)."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("Beta prior needs positive shape parameters")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    def log_pdf(self, x: float) -> float:
        if not 0.0 < x < 1.0:
            return -math.inf
        lognorm = (math.lgamma(self.a + self.b) - math.lgamma(self.a)
                   - math.lgamma(self.b))
        return lognorm + (self.a - 1.0) * math.log(x) + (self.b - 1.0) * math.log1p(-x)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.array([math.exp(self.log_pdf(v)) for v in x.ravel()])
        return out.reshape(x.shape)

    def scaled(self, factor: float) -> "BetaPrior":
        """Same mean, concentration multiplied by factor (>1 concentrates)."""
        return BetaPrior(self.a * factor, self.b * factor)


@dataclass(frozen=True)
class OvertonGapSpec:
    """Expression-cost frontier: sensitivity kappa, current cost, tolerance.

    No defaults: these have no calibrated values and must be user-supplied.
    """

    kappa: float
    c_indiv: float
    tau_bar: float

    def __post_init__(self):
        if self.kappa <= 0:
            raise DomainError("kappa must be positive")


class PrevalenceGrid:
    """Trapezoid quadrature nodes on (0,1) shared across thresholds and priors."""

    def __init__(self, n_nodes: int = QUAD_NODES, lo: float = QUAD_LO, hi: float = QUAD_HI):
        if n_nodes < 3:
            raise DomainError("need at least 3 quadrature nodes")
        self.nodes = np.linspace(lo, hi, n_nodes)
        w = np.full(n_nodes, self.nodes[1] - self.nodes[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        self.raw_weights = w

    def measure(self, prior: BetaPrior) -> np.ndarray:
        """Discretized prior probability masses at the nodes (sum to 1)."""
        m = self.raw_weights * prior.pdf(self.nodes)
        return m / m.sum()


_DEFAULT_GRID = PrevalenceGrid()


@lru_cache(maxsize=None)
def _q_high_cached(params: ModelParams, T: int) -> float:
    res = participatory_share(T, params)
    if not res.converged:
        raise ConvergenceError(
            f"participatory equilibrium failed at T={T}, pi={params.pi}",
            last_value=res.q, residual=res.residual, iterations=res.iterations)
    return res.q


def likelihood_success(T: int, pi: float, params: ModelParams) -> float:
    """L_T(pi) = P(M >= T) at the participatory equilibrium for prevalence pi."""
    if not 0.0 <= pi <= 1.0:
        raise DomainError("pi must lie in [0,1]")
    q = _q_high_cached(replace(params, pi=float(pi)), int(T))
    return float(binom_pmf_vector(params.N, q)[T:].sum())


def _likelihood_vector(T: int, params: ModelParams, grid: PrevalenceGrid,
                       likelihood: Optional[Callable[[int, float], float]]) -> np.ndarray:
    fn = likelihood if likelihood is not None else (
        lambda t, p: likelihood_success(t, p, params))
    return np.array([fn(T, float(p)) for p in grid.nodes])


def _shift(T, prior, params, grid, likelihood, success: bool):
    # Event and complement masses are summed directly: the small side is a
    # sum of small positives and stays accurate where 1 - (big side) cancels.
    grid = grid or _DEFAULT_GRID
    w = grid.measure(prior)
    L = _likelihood_vector(T, params, grid, likelihood)
    event = L if success else 1.0 - L
    p_event = float(w @ event)
    p_complement = float(w @ (1.0 - event))
    if p_event <= 0.0 or p_complement <= 0.0:
        raise DegenerateUpdateError(
            f"success probability is degenerate at T={T}; no update possible")
    post_mean = float(w @ (grid.nodes * event)) / p_event
    prior_mean = float(w @ grid.nodes)
    return post_mean - prior_mean, p_event, prior_mean


def posterior_shift_success(T: int, prior: BetaPrior, params: ModelParams, *,
                            grid: Optional[PrevalenceGrid] = None,
                            likelihood=None) -> float:
    """E[pi | M >= T] - E[pi]; positive when success is informative."""
    return _shift(T, prior, params, grid, likelihood, success=True)[0]


def posterior_shift_failure(T: int, prior: BetaPrior, params: ModelParams, *,
                            grid: Optional[PrevalenceGrid] = None,
                            likelihood=None) -> float:
    """E[pi | M < T] - E[pi]; negative under the same nondegeneracy."""
    return _shift(T, prior, params, grid, likelihood, success=False)[0]


@dataclass(frozen=True)
class OvertonPoint:
    T: int
    marginal_success: float
    shift_success: float
    shift_failure: float
    value: float


def overton_point(T: int, prior: BetaPrior, params: ModelParams, *,
                  grid: Optional[PrevalenceGrid] = None,
                  likelihood=None) -> OvertonPoint:
    """Marginal success probability, both posterior shifts, and Psi_O = P * shift."""
    grid = grid or _DEFAULT_GRID
    w = grid.measure(prior)
    L = _likelihood_vector(T, params, grid, likelihood)
    p_succ = float(w @ L)
    p_fail = float(w @ (1.0 - L))
    if p_succ <= 0.0 or p_fail <= 0.0:
        raise DegenerateUpdateError(
            f"success probability is degenerate at T={T}; no update possible")
    prior_mean = float(w @ grid.nodes)
    up = float(w @ (grid.nodes * L)) / p_succ - prior_mean
    down = float(w @ (grid.nodes * (1.0 - L))) / p_fail - prior_mean
    return OvertonPoint(T=int(T), marginal_success=min(p_succ, 1.0), shift_success=up,
                        shift_failure=down, value=p_succ * up)


def psi_overton(T: int, prior: BetaPrior, params: ModelParams, *,
                grid: Optional[PrevalenceGrid] = None, likelihood=None) -> float:
    return overton_point(T, prior, params, grid=grid, likelihood=likelihood).value


@dataclass(frozen=True)
class OvertonCurve:
    points: tuple
    argmax_T: Optional[int]

    CSV_HEADER = ("T", "marginal_success", "delta_pi_success", "delta_pi_failure", "psi_O")

    def value_at(self, T: int) -> float:
        for p in self.points:
            if p.T == T:
                return p.value
        raise KeyError(T)

    def csv_rows(self):
        return [[p.T, p.marginal_success, p.shift_success, p.shift_failure, p.value]
                for p in self.points]


def overton_curve(prior: BetaPrior, params: ModelParams, T_range: Iterable[int], *,
                  grid: Optional[PrevalenceGrid] = None, likelihood=None,
                  points: Optional[Iterable[OvertonPoint]] = None) -> OvertonCurve:
    """Full sweep of the discourse objective; argmax is the smallest maximizer."""
    if points is None:
        points = [overton_point(T, prior, params, grid=grid, likelihood=likelihood)
                  for T in sorted(set(int(t) for t in T_range))]
    points = tuple(points)
    best_T, best_v = None, -math.inf
    for p in points:
        if p.value > best_v:
            best_T, best_v = p.T, p.value
    return OvertonCurve(points=points, argmax_T=best_T)


def posterior_shift_exact_count(T: int, m_count: int, prior: BetaPrior,
                                params: ModelParams, *,
                                grid: Optional[PrevalenceGrid] = None) -> float:
    """Posterior shift conditioning on the exact revealed count M = m_count.

    The coarse event {M >= T} is the default elsewhere; the exact count can
    attenuate or even reverse the update when m_count barely clears T.
    """
    grid = grid or _DEFAULT_GRID
    if not 0 <= m_count <= params.N:
        raise DomainError("count outside [0, N]")
    w = grid.measure(prior)
    L = np.array([
        float(binom_pmf_vector(params.N,
                               _q_high_cached(replace(params, pi=float(p)), int(T)))[m_count])
        for p in grid.nodes])
    p_event = float(w @ L)
    if p_event <= 0.0:
        raise DegenerateUpdateError(f"count {m_count} has probability 0")
    return float(w @ (grid.nodes * L)) / p_event - float(w @ grid.nodes)


@dataclass(frozen=True)
class EntryResult:
    enters: bool
    margin: float


def overton_entry(shift: float, gap: OvertonGapSpec) -> EntryResult:
    """Window entry test: enters iff shift >= (c_indiv - tau_bar) / kappa."""
    margin = shift - (gap.c_indiv - gap.tau_bar) / gap.kappa
    return EntryResult(enters=margin >= 0.0, margin=margin)
