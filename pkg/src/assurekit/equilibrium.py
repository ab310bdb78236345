"""Type-specific cutoffs, the participation map S(q;T), and its fixed points.

The participatory equilibrium is the largest stable fixed point of S; it is
reached by damped iteration from the optimistic start q0 = pi. Imperfect
confidentiality trust (rho < 1) enters through an extra expected leak cost
and reduces exactly to the baseline cutoff at rho = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ModelParams, Threshold, binom_pmf_vector, eta, safety_g
from .exceptions import DomainError

EPS_P = 1e-12          # denominator floor for the own-success probability
DAMPING = 0.3
FP_TOL = 1e-8
MAX_ITER = 500
_BISECT_TOL = 1e-10
_STAB_H = 1e-5
_MERGE_TOL = 1e-9


@dataclass(frozen=True)
class SuccessProbs:
    """Success probabilities relevant to one agent at anticipated share q."""

    p_with: float      # P(M_{-i} >= T-1): success if the agent signs
    p_without: float   # P(M_{-i} >= T): success if the agent abstains
    pivotal: float     # their difference, P(M_{-i} = T-1)


def success_probs(q: float, T: int, N: int) -> SuccessProbs:
    """Own-inclusive and own-exclusive success tails over the N-1 other agents."""
    Threshold(int(T), int(N))
    pv = binom_pmf_vector(N - 1, q)
    p_with = float(pv[T - 1:].sum())
    p_without = float(pv[T:].sum())
    return SuccessProbs(p_with=p_with, p_without=p_without, pivotal=p_with - p_without)


def _cutoff_from_tails(alpha_j: float, q: float, params: ModelParams,
                       p_with: float, p_without: float, rho: float) -> float:
    """Expressive-benefit cutoff given precomputed success tails.

    When the own-success probability degenerates (p_with <= EPS_P) the signing
    gain collapses to eta(q) - (1-rho)*alpha_j*g(q); the cutoff is then a
    signed-infinity sentinel keyed to that expression's sign.
    """
    gq = safety_g(q, params.safety)
    et = eta(q, params)
    if p_with <= EPS_P:
        return -math.inf if et - (1.0 - rho) * alpha_j * gq >= 0.0 else math.inf
    leak = (1.0 - p_with) * (1.0 - rho) / p_with
    return alpha_j * gq * (1.0 + leak) - (p_without * params.s + et) / p_with


def type_cutoff(alpha_j: float, q: float, T: int, params: ModelParams) -> float:
    """Cutoff e*_j(q;T) under perfect trust: sign iff e_i >= e*_j."""
    sp = success_probs(q, T, params.N)
    return _cutoff_from_tails(alpha_j, q, params, sp.p_with, sp.p_without, rho=1.0)


def type_cutoff_with_trust(alpha_j: float, q: float, T: int, params: ModelParams,
                           rho: Optional[float] = None) -> float:
    """Cutoff under confidentiality trust rho <= 1; equals type_cutoff at rho=1."""
    r = params.rho if rho is None else rho
    if not 0.0 <= r <= 1.0:
        raise DomainError("rho must lie in [0,1]")
    sp = success_probs(q, T, params.N)
    return _cutoff_from_tails(alpha_j, q, params, sp.p_with, sp.p_without, rho=r)


def _survival(params: ModelParams, cutoff: float) -> float:
    if cutoff == math.inf:
        return 0.0
    if cutoff == -math.inf:
        return 1.0
    return params.type_dist.survival(cutoff)


def participation_map(q: float, T: int, params: ModelParams) -> float:
    """Implied signing share S(q;T) among the eligible population; in [0, pi]."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"participation share q={q} outside [0,1]")
    pv = binom_pmf_vector(params.N - 1, q)
    p_with = float(pv[T - 1:].sum())
    p_without = float(pv[T:].sum())
    e_lo = _cutoff_from_tails(params.alpha_L, q, params, p_with, p_without, params.rho)
    e_hi = _cutoff_from_tails(params.alpha_H, q, params, p_with, p_without, params.rho)
    return params.pi * ((1.0 - params.lam) * _survival(params, e_lo)
                        + params.lam * _survival(params, e_hi))


@dataclass(frozen=True)
class FixedPointResult:
    """Outcome of one damped fixed-point iteration; never a silent answer."""

    q: float
    iterations: int
    residual: float
    converged: bool


def solve_fixed_point(T: int, q0: float, params: ModelParams, *,
                      damping: float = DAMPING, tol: float = FP_TOL,
                      max_iter: int = MAX_ITER) -> FixedPointResult:
    """Damped iteration q <- (1-d)q + d*S(q;T) from q0 until |S(q)-q| < tol."""
    Threshold(int(T), params.N)
    if not 0.0 <= q0 <= 1.0:
        raise DomainError("q0 must lie in [0,1]")
    q = float(q0)
    residual = math.inf
    for it in range(max_iter):
        s_q = participation_map(q, T, params)
        residual = abs(s_q - q)
        if residual < tol:
            return FixedPointResult(q=q, iterations=it, residual=residual, converged=True)
        q = (1.0 - damping) * q + damping * s_q
    return FixedPointResult(q=q, iterations=max_iter, residual=residual, converged=False)


def solve_q_high(T: int, params: ModelParams, **kwargs) -> FixedPointResult:
    """Participatory-equilibrium share: damped iteration from the optimistic start q0=pi."""
    return solve_fixed_point(T, params.pi, params, **kwargs)


def solve_q_low(T: int, params: ModelParams, **kwargs) -> FixedPointResult:
    """Low-equilibrium share: damped iteration from the pessimistic start q0=0."""
    return solve_fixed_point(T, 0.0, params, **kwargs)


def participatory_share(T: int, params: ModelParams, **kwargs) -> FixedPointResult:
    """Largest stable fixed point, with a robust fallback.

    Damped iteration from q0=pi is the fast path. Near a tangency where the
    high equilibrium disappears, that iteration crawls through the ghost of
    the merged fixed points and can exhaust its budget; the fallback then
    locates the largest stable fixed point by grid scan and bisection.
    """
    res = solve_fixed_point(T, params.pi, params, **kwargs)
    if res.converged:
        return res
    fps = enumerate_fixed_points(T, params)
    if fps.q_high is None:
        return res
    residual = abs(participation_map(fps.q_high, T, params) - fps.q_high)
    return FixedPointResult(q=fps.q_high, iterations=res.iterations,
                            residual=residual, converged=residual < FP_TOL)


@dataclass(frozen=True)
class FixedPoint:
    q: float
    stable: bool
    residual: float
    derivative: float


@dataclass(frozen=True)
class FixedPointSet:
    """All fixed points of S(.;T) found on a fine grid, with designated points.

    `jumps` holds basin boundaries where S crosses the diagonal by a numerical
    step (success numerically impossible, so the map snaps between 0 and pi as
    the net signing utility changes sign). They are not fixed points (their
    residual is large) but they separate basins exactly like an unstable one,
    and q_unstable falls back to such a crossing when no interior unstable
    fixed point exists.
    """

    points: tuple
    q_low: Optional[float]
    q_unstable: Optional[float]
    q_high: Optional[float]
    jumps: tuple = ()

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n_crossings(self) -> int:
        """Diagonal crossings detected on the grid (fixed points plus jumps);
        this is what a plain sign-change count reports."""
        return len(self.points) + len(self.jumps)


def _slope(T: int, params: ModelParams, q: float, h: float = _STAB_H) -> float:
    lo, hi = max(0.0, q - h), min(1.0, q + h)
    return (participation_map(hi, T, params) - participation_map(lo, T, params)) / (hi - lo)


def enumerate_fixed_points(T: int, params: ModelParams,
                           grid_points: int = 2000) -> FixedPointSet:
    """Scan a uniform grid for roots of S(q)-q, refine by bisection, classify stability.

    Stability is判 by the central-difference slope S'(q*): stable iff S' < 1.
    Roots closer than 1e-9 are merged (guards duplicate brackets at grid seams).
    """
    qs = np.linspace(0.0, 1.0, grid_points)
    f = np.array([participation_map(q, T, params) - q for q in qs])

    roots = [float(qs[i]) for i in range(grid_points) if abs(f[i]) < 1e-13]
    for i in range(grid_points - 1):
        if f[i] == 0.0 or f[i] * f[i + 1] >= 0.0:
            continue
        lo, hi, flo = qs[i], qs[i + 1], f[i]
        while hi - lo > _BISECT_TOL:
            mid = 0.5 * (lo + hi)
            fm = participation_map(mid, T, params) - mid
            if fm == 0.0:
                lo = hi = mid
                break
            if flo * fm < 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        roots.append(0.5 * (lo + hi))

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and abs(r - merged[-1]) <= _MERGE_TOL:
            continue
        merged.append(r)

    points = []
    jumps = []
    for r in merged:
        res = abs(participation_map(r, T, params) - r)
        if res >= FP_TOL:
            jumps.append(r)      # diagonal crossed by a numerical step
            continue
        der = _slope(T, params, r)
        points.append(FixedPoint(q=r, stable=der < 1.0, residual=res, derivative=der))

    stable = [p.q for p in points if p.stable]
    q_low = min(stable) if stable else None
    q_high = max(stable) if stable else None
    q_unstable = None
    if q_low is not None and q_high is not None and q_low < q_high:
        between = [p.q for p in points if not p.stable and q_low < p.q < q_high]
        if between:
            q_unstable = between[0]
        else:
            boundary = [j for j in jumps if q_low < j < q_high]
            if boundary:
                q_unstable = boundary[0]
    return FixedPointSet(points=tuple(points), q_low=q_low,
                         q_unstable=q_unstable, q_high=q_high, jumps=tuple(jumps))


def type_shares(q_star: float, T: int, params: ModelParams) -> tuple[float, float]:
    """Signing shares within the low- and high-vulnerability supportive types."""
    pv = binom_pmf_vector(params.N - 1, q_star)
    p_with = float(pv[T - 1:].sum())
    p_without = float(pv[T:].sum())
    e_lo = _cutoff_from_tails(params.alpha_L, q_star, params, p_with, p_without, params.rho)
    e_hi = _cutoff_from_tails(params.alpha_H, q_star, params, p_with, p_without, params.rho)
    return _survival(params, e_lo), _survival(params, e_hi)


@dataclass(frozen=True)
class ContractionDiagnostic:
    sup_abs_slope: float
    is_contraction: bool


def contraction_diagnostic(T: int, params: ModelParams,
                           grid_points: int = 2001) -> ContractionDiagnostic:
    """sup_q |S'(q;T)| by central differences on a uniform grid; contraction iff < 1."""
    qs = np.linspace(0.0, 1.0, grid_points)
    s = np.array([participation_map(q, T, params) for q in qs])
    h = qs[1] - qs[0]
    interior = np.abs(s[2:] - s[:-2]) / (2.0 * h)
    edges = [abs(s[1] - s[0]) / h, abs(s[-1] - s[-2]) / h]
    sup = float(max(interior.max(initial=0.0), *edges))
    return ContractionDiagnostic(sup_abs_slope=sup, is_contraction=sup < 1.0)
