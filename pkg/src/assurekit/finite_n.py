"""Finite-population benchmark: exact pivotality with posterior updating over a
latent support state, the projected signal-indexed cutoff fixed point, the
reduced-form scalar cutoff, and the associated threshold objectives.

Agents see private signals m = theta + sigma_m * eps and best-respond with a
cutoff in reputational type per signal. Because the constant net signing
utility eta is positive in the benchmark calibration, agents with hopeless
signals sign for free, so the equilibrium cutoff profile is monotone
NONdecreasing in the signal; the solver projects onto that cone. The
reputational and stigma margins are weighted by the success tail without the
agent's own signature, P(M_-i >= T); the own-signature effect enters through
the pivotal term piv * v_bar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import (MAX_N, TypeDistribution, binom_pmf, binom_pmf_matrix,
                   binom_pmf_vector, norm_pdf)
from .exceptions import (ConvergenceError, DomainError, InstabilityError,
                         NoEquilibriumError)
from .overton import BetaPrior

DAMPING = 0.3
TOL = 1e-8
MAX_ITER = 500


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def _trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    w = np.empty_like(nodes)
    w[1:-1] = (nodes[2:] - nodes[:-2]) / 2.0
    w[0] = (nodes[1] - nodes[0]) / 2.0
    w[-1] = (nodes[-1] - nodes[-2]) / 2.0
    return w


class SignalGrid:
    """Quadrature nodes for the signal space and the latent state."""

    def __init__(self, m_nodes, theta_nodes):
        self.m_nodes = np.asarray(m_nodes, dtype=float)
        self.theta_nodes = np.asarray(theta_nodes, dtype=float)
        if self.m_nodes.size < 2 or np.any(np.diff(self.m_nodes) <= 0):
            raise DomainError("signal nodes must be strictly increasing")
        if np.any(np.diff(self.theta_nodes) <= 0):
            raise DomainError("theta nodes must be strictly increasing")
        if np.any(self.theta_nodes <= 0) or np.any(self.theta_nodes >= 1):
            raise DomainError("theta nodes must lie strictly inside (0,1)")
        self.m_weights = _trapezoid_weights(self.m_nodes)
        self.theta_weights = _trapezoid_weights(self.theta_nodes)

    @classmethod
    def default(cls, sigma_m: float, n_signal: int = 41, n_theta: int = 101,
                span_sds: float = 4.0) -> "SignalGrid":
        m = np.linspace(-span_sds * sigma_m, 1.0 + span_sds * sigma_m, n_signal)
        th = np.linspace(1e-6, 1.0 - 1e-6, n_theta)
        return cls(m, th)

    @property
    def K(self) -> int:
        return self.m_nodes.size


@dataclass(frozen=True)
class FiniteNParams:
    """Benchmark primitives. eta is a constant net signing utility here,
    unlike the baseline's participation-dependent schedule."""

    N: int
    theta_prior: BetaPrior
    v_bar: float
    s: float
    eta: float
    sigma_m: float
    type_dist: TypeDistribution = field(default_factory=TypeDistribution.standard_normal)
    grid: Optional[SignalGrid] = None
    epsilon_trim: float = 1e-9
    X_clip: float = 10.0

    def __post_init__(self):
        if not 2 <= self.N <= MAX_N:
            raise DomainError("N outside [2, cap]")
        if self.sigma_m <= 0:
            raise DomainError("sigma_m must be positive")
        if self.epsilon_trim <= 0 or self.X_clip <= 0:
            raise DomainError("epsilon_trim and X_clip must be positive")
        if self.v_bar < 0 or self.s < 0:
            raise DomainError("v_bar and s must be nonnegative")
        if self.grid is None:
            object.__setattr__(self, "grid", SignalGrid.default(self.sigma_m))


# ---------------------------------------------------------------------------
# isotonic projection (weighted least squares, pool-adjacent-violators)
# ---------------------------------------------------------------------------

def isotonic_project(v, weights=None) -> np.ndarray:
    """Nearest nonincreasing vector in weighted least squares (PAV).

    Idempotent; already-monotone inputs pass through unchanged.
    """
    y = np.asarray(v, dtype=float)
    n = y.size
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.size != n or np.any(w <= 0):
        raise DomainError("weights must be positive and match the vector length")
    # project -y onto the nondecreasing cone, then negate back
    ny = -y
    means: list[float] = []
    wts: list[float] = []
    counts: list[int] = []
    for yi, wi in zip(ny, w):
        m, ww, c = float(yi), float(wi), 1
        while means and means[-1] > m:
            m0, w0, c0 = means.pop(), wts.pop(), counts.pop()
            m = (m * ww + m0 * w0) / (ww + w0)
            ww += w0
            c += c0
        means.append(m)
        wts.append(ww)
        counts.append(c)
    out = np.empty(n)
    i = 0
    for m, c in zip(means, counts):
        out[i:i + c] = m
        i += c
    return -out


def _project_nondecreasing(v: np.ndarray, weights=None) -> np.ndarray:
    return -isotonic_project(-np.asarray(v, dtype=float), weights)


# ---------------------------------------------------------------------------
# cutoff-profile solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PivotalStats:
    piv: float      # E[P(M_-i = T-1 | theta) | m]
    p_plus: float   # E[P(M_-i >= T-1 | theta) | m]
    p_zero: float   # E[P(M_-i >= T | theta) | m]


@dataclass(frozen=True)
class CutoffProfile:
    """Signal-indexed cutoffs x*(m_k; T), monotone nondecreasing in the signal."""

    T: int
    m_nodes: np.ndarray
    cutoffs: np.ndarray
    residual: float
    iterations: int
    converged: bool

    def cutoff_at(self, m) -> np.ndarray:
        """Piecewise-linear interpolation, clamped to the end nodes."""
        return np.interp(np.asarray(m, dtype=float), self.m_nodes, self.cutoffs)


class FiniteNSolver:
    """Shared quadrature state for one FiniteNParams environment."""

    def __init__(self, params: FiniteNParams):
        self.params = params
        g = params.grid
        self.m = g.m_nodes
        self.th = g.theta_nodes
        self.wm = g.m_weights
        prior_pdf = params.theta_prior.pdf(self.th)
        mass = g.theta_weights * prior_pdf
        self.prior_measure = mass / mass.sum()
        self.prior_mean = float(self.prior_measure @ self.th)
        # signal likelihood matrix f(m_k | theta_j)
        z = (self.m[:, None] - self.th[None, :]) / params.sigma_m
        self.f_m_theta = np.exp(-0.5 * z * z) / (params.sigma_m * math.sqrt(2 * math.pi))
        post = self.f_m_theta * mass[None, :]
        sums = post.sum(axis=1, keepdims=True)
        # a signal node whose likelihood underflows everywhere carries no
        # information (and no quadrature weight); give it the prior
        dead = (sums == 0.0).ravel()
        post[dead] = self.prior_measure
        sums[dead] = 1.0
        self.posterior = post / sums

    # -- posterior and participation -------------------------------------

    def theta_posterior(self, m: float) -> np.ndarray:
        """Posterior weights over the theta nodes after observing signal m."""
        z = (m - self.th) / self.params.sigma_m
        lik = np.exp(-0.5 * z * z)
        w = lik * self.prior_measure
        total = w.sum()
        if total <= 0.0:
            raise DomainError(f"signal {m} has no posterior mass on the grid")
        return w / total

    def _survival(self, cutoffs: np.ndarray) -> np.ndarray:
        return 1.0 - self.params.type_dist.cdf_array(cutoffs)

    def alpha_vector(self, profile_cutoffs: np.ndarray) -> np.ndarray:
        """alpha(theta; T) on the theta grid: prob that one agent signs."""
        surv = self._survival(np.asarray(profile_cutoffs, dtype=float))
        return self.th * ((self.wm * surv) @ self.f_m_theta)

    def alpha_theta(self, theta: float, profile: CutoffProfile) -> float:
        """Scalar alpha(theta; T): theta times the mean signing survival."""
        if not 0.0 <= theta <= 1.0:
            raise DomainError("theta must lie in [0,1]")
        surv = self._survival(profile.cutoffs)
        z = (self.m - theta) / self.params.sigma_m
        fm = np.exp(-0.5 * z * z) / (self.params.sigma_m * math.sqrt(2 * math.pi))
        return float(theta * np.sum(self.wm * surv * fm))

    # -- exact pivotal machinery ------------------------------------------

    def _tail_stats(self, alpha: np.ndarray, T: int):
        pm = binom_pmf_matrix(self.params.N - 1, alpha)
        pmf_piv = pm[:, T - 1]
        tail_T = pm[:, T:].sum(axis=1)
        tail_T1 = tail_T + pmf_piv           # exact: p_plus = piv + p_zero
        return pmf_piv, tail_T1, tail_T

    def pivotal_stats(self, m: float, T: int, profile: CutoffProfile) -> PivotalStats:
        """Posterior-weighted exact pivotal mass and success tails at signal m."""
        w = self.theta_posterior(m)
        alpha = self.alpha_vector(profile.cutoffs)
        piv, t1, t0 = self._tail_stats(alpha, T)
        return PivotalStats(piv=float(w @ piv), p_plus=float(w @ t1), p_zero=float(w @ t0))

    def best_response_update(self, cutoffs: np.ndarray, T: int) -> np.ndarray:
        """Raw updated cutoff vector on the signal grid (trimmed, clipped).

        The reputational and stigma margins use the no-own-signature success
        tail p_zero; this is the selection that reproduces the benchmark
        calibration. Where the trimmed denominator floors out, the sign of
        the numerator (eta, in the hopeless limit) decides, so the raw value
        clips at -X or +X.
        """
        p = self.params
        alpha = self.alpha_vector(np.asarray(cutoffs, dtype=float))
        piv_n, t1_n, t0_n = self._tail_stats(alpha, T)
        piv = self.posterior @ piv_n
        p_zero = self.posterior @ t0_n
        raw = -(piv * p.v_bar + p_zero * p.s + p.eta) / np.maximum(p_zero, p.epsilon_trim)
        return np.clip(raw, -p.X_clip, p.X_clip)

    def solve_profile(self, T: int, *, damping: float = DAMPING, tol: float = TOL,
                      max_iter: int = MAX_ITER) -> CutoffProfile:
        """Damped iteration of the projected best-response operator."""
        if not 1 <= T < self.params.N:
            raise DomainError(f"T={T} outside [1, N-1]")
        x = np.zeros(self.m.size)
        residual = math.inf
        for it in range(max_iter):
            bx = _project_nondecreasing(self.best_response_update(x, T))
            residual = float(np.max(np.abs(bx - x)))
            if residual < tol:
                return CutoffProfile(T=T, m_nodes=self.m, cutoffs=x,
                                     residual=residual, iterations=it, converged=True)
            x = (1.0 - damping) * x + damping * bx
        return CutoffProfile(T=T, m_nodes=self.m, cutoffs=x,
                             residual=residual, iterations=max_iter, converged=False)

    # -- observer objective ------------------------------------------------

    def likelihood_theta(self, T_eff: int, profile: CutoffProfile) -> np.ndarray:
        """P(M >= T_eff | theta) over the theta grid, N trials at alpha(theta)."""
        alpha = self.alpha_vector(profile.cutoffs)
        if T_eff > self.params.N:
            return np.zeros_like(alpha)
        pm = binom_pmf_matrix(self.params.N, alpha)
        return pm[:, T_eff:].sum(axis=1)

    def objective_from_profile(self, profile: CutoffProfile, floor_M: int = 0):
        """(value, success_prob, delta_theta) for effective threshold max(T, floor)."""
        T_eff = max(profile.T, floor_M)
        L = self.likelihood_theta(T_eff, profile)
        p = float(self.prior_measure @ L)
        if p <= 0.0 or p >= 1.0:
            return 0.0, p, 0.0
        post_mean = float(self.prior_measure @ (self.th * L)) / p
        delta = post_mean - self.prior_mean
        return p * delta, p, delta


@dataclass(frozen=True)
class FiniteNPoint:
    T: int
    objective: float
    success_prob: float
    delta_theta: float
    residual: float
    iterations: int
    ok: bool = True


@dataclass(frozen=True)
class FiniteNCurve:
    points: tuple
    argmax_T: Optional[int]

    CSV_HEADER = ("T", "objective", "success_prob", "delta_theta", "residual", "iterations")

    def value_at(self, T: int) -> float:
        for p in self.points:
            if p.T == T:
                return p.objective
        raise KeyError(T)

    def csv_rows(self):
        return [[p.T, p.objective, p.success_prob, p.delta_theta, p.residual, p.iterations]
                for p in self.points]


def _argmax(points: Sequence[FiniteNPoint]) -> Optional[int]:
    best_T, best_v = None, -math.inf
    for p in points:
        if p.ok and p.objective > best_v:
            best_T, best_v = p.T, p.objective
    return best_T


def psi_finite_n(T: int, params: FiniteNParams, floor_M: int = 0,
                 solver: Optional[FiniteNSolver] = None) -> FiniteNPoint:
    """Solve the profile at T and evaluate P(M >= max(T, floor)) * Delta_theta."""
    solver = solver or FiniteNSolver(params)
    prof = solver.solve_profile(T)
    if not prof.converged:
        return FiniteNPoint(T=T, objective=0.0, success_prob=0.0, delta_theta=0.0,
                            residual=prof.residual, iterations=prof.iterations, ok=False)
    value, p, delta = solver.objective_from_profile(prof, floor_M)
    return FiniteNPoint(T=T, objective=value, success_prob=p, delta_theta=delta,
                        residual=prof.residual, iterations=prof.iterations)


def finite_n_curves(params: FiniteNParams, T_range: Iterable[int],
                    floors: Sequence[int] = (0,),
                    solver: Optional[FiniteNSolver] = None) -> dict[int, FiniteNCurve]:
    """One profile solve per T, evaluated under each durability floor."""
    solver = solver or FiniteNSolver(params)
    Ts = sorted(set(int(t) for t in T_range))
    buckets: dict[int, list] = {f: [] for f in floors}
    for T in Ts:
        prof = solver.solve_profile(T)
        for f in floors:
            if not prof.converged:
                buckets[f].append(FiniteNPoint(T=T, objective=0.0, success_prob=0.0,
                                               delta_theta=0.0, residual=prof.residual,
                                               iterations=prof.iterations, ok=False))
                continue
            value, p, delta = solver.objective_from_profile(prof, f)
            buckets[f].append(FiniteNPoint(T=T, objective=value, success_prob=p,
                                           delta_theta=delta, residual=prof.residual,
                                           iterations=prof.iterations))
    return {f: FiniteNCurve(points=tuple(pts), argmax_T=_argmax(pts))
            for f, pts in buckets.items()}


# ---------------------------------------------------------------------------
# reduced-form scalar cutoff
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedFormParams:
    """Scalar-cutoff environment: known prevalence, constant eta."""

    N: int
    pi: float
    s: float
    eta: float
    type_dist: TypeDistribution = field(default_factory=TypeDistribution.standard_normal)
    X_clip: float = 10.0

    def __post_init__(self):
        if not 0.0 <= self.pi <= 1.0:
            raise DomainError("pi must lie in [0,1]")


def _scalar_H(x: float, rf: ReducedFormParams, T: int) -> float:
    q = rf.pi * (1.0 - rf.type_dist.cdf(x))
    pv = binom_pmf_vector(rf.N - 1, q)
    p_with = float(pv[T - 1:].sum())
    p_without = float(pv[T:].sum())
    return x * p_with + rf.s * p_without + rf.eta


def scalar_cutoff(rf: ReducedFormParams, T: int, *, prescan: int = 101,
                  tol: float = 1e-10) -> float:
    """Bisection root of H(x) = x*p_with + s*p_without + eta on [-X, X].

    A 101-point pre-scan locates the first sign change from the left, which
    selects the highest-participation root when several exist. Raises
    NoEquilibriumError when H never changes sign in the bracket.
    """
    if not 1 <= T < rf.N:
        raise DomainError(f"T={T} outside [1, N-1]")
    xs = np.linspace(-rf.X_clip, rf.X_clip, prescan)
    hs = [_scalar_H(float(x), rf, T) for x in xs]
    for i in range(prescan - 1):
        if hs[i] == 0.0:
            return float(xs[i])
        if hs[i] * hs[i + 1] < 0.0:
            lo, hi, flo = float(xs[i]), float(xs[i + 1]), hs[i]
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = _scalar_H(mid, rf, T)
                if fm == 0.0:
                    return mid
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            return 0.5 * (lo + hi)
    if hs[-1] == 0.0:
        return float(xs[-1])
    raise NoEquilibriumError(
        f"H has no sign change on [-{rf.X_clip}, {rf.X_clip}] at T={T}")


@dataclass(frozen=True)
class ComparativeStatic:
    derivative: float
    H_x: float


def comparative_statics(rf: ReducedFormParams, T: int, which: str,
                        x_star: Optional[float] = None,
                        h: float = 1e-6) -> ComparativeStatic:
    """Implicit-function derivative of the cutoff in s or eta at the solved root.

    dx*/ds = -p_without / H_x and dx*/deta = -1 / H_x, with H_x evaluated by
    central differences. Raises InstabilityError when H_x <= 0.
    """
    if which not in ("s", "eta"):
        raise DomainError("which must be 's' or 'eta'")
    x = scalar_cutoff(rf, T) if x_star is None else float(x_star)
    H_x = (_scalar_H(x + h, rf, T) - _scalar_H(x - h, rf, T)) / (2.0 * h)
    if H_x <= 0.0:
        raise InstabilityError(f"H_x = {H_x} <= 0 at x* = {x}; IFT inapplicable")
    if which == "eta":
        return ComparativeStatic(derivative=-1.0 / H_x, H_x=H_x)
    q = rf.pi * (1.0 - rf.type_dist.cdf(x))
    p_without = float(binom_pmf_vector(rf.N - 1, q)[T:].sum())
    return ComparativeStatic(derivative=-p_without / H_x, H_x=H_x)


def reduced_form_curve(params: FiniteNParams, T_range: Iterable[int],
                       solver: Optional[FiniteNSolver] = None) -> FiniteNCurve:
    """Matched-prevalence comparison: scalar cutoffs at pi = prior mean, scored
    with the same prior-shift objective as the signal-indexed benchmark."""
    solver = solver or FiniteNSolver(params)
    rf = ReducedFormParams(N=params.N, pi=params.theta_prior.mean, s=params.s,
                           eta=params.eta, type_dist=params.type_dist,
                           X_clip=params.X_clip)
    pts = []
    for T in sorted(set(int(t) for t in T_range)):
        try:
            x_star = scalar_cutoff(rf, T)
        except NoEquilibriumError:
            pts.append(FiniteNPoint(T=T, objective=0.0, success_prob=0.0,
                                    delta_theta=0.0, residual=math.inf,
                                    iterations=0, ok=False))
            continue
        share = 1.0 - params.type_dist.cdf(x_star)
        alpha = solver.th * share
        pm = binom_pmf_matrix(params.N, alpha)
        L = pm[:, T:].sum(axis=1)
        p = float(solver.prior_measure @ L)
        if p <= 0.0 or p >= 1.0:
            pts.append(FiniteNPoint(T=T, objective=0.0, success_prob=p,
                                    delta_theta=0.0, residual=0.0, iterations=0))
            continue
        delta = float(solver.prior_measure @ (solver.th * L)) / p - solver.prior_mean
        pts.append(FiniteNPoint(T=T, objective=p * delta, success_prob=p,
                                delta_theta=delta, residual=0.0, iterations=0))
    return FiniteNCurve(points=tuple(pts), argmax_T=_argmax(pts))


# ---------------------------------------------------------------------------
# local-limit pivotal approximation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PivotalApprox:
    exact: float
    approx: float
    gap: float


def pivotal_approx_check(n: int, T: int, q: float) -> PivotalApprox:
    """Exact pivotal pmf P(X = T-1) vs the normal local-limit value at T-1."""
    if not 0.05 <= q <= 0.95:
        raise DomainError("local-limit check requires q in [0.05, 0.95]")
    exact = binom_pmf(n, T - 1, q)
    var = n * q * (1.0 - q)
    approx = norm_pdf((T - 1 - n * q) / math.sqrt(var)) / math.sqrt(var)
    return PivotalApprox(exact=exact, approx=approx, gap=abs(exact - approx))
