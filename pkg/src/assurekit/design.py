"""Threshold-design objectives: conditional, ex-ante (seeded), and durable variants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .core import ModelParams, Threshold, binom_pmf_vector, trunc_mean_share
from .equilibrium import (enumerate_fixed_points, participatory_share,
                          solve_fixed_point)
from .exceptions import DomainError

# ---------------------------------------------------------------------------
# seeding and opposition primitives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeedModel:
    """Distribution of the pre-recruited committed-signer count k.

    Reduced form: the only thing that matters downstream is
    P(k >= ceil(N * q_unstable)).
    """

    kind: str
    k: int = 0
    mu: float = 0.0
    n_pool: int = 0
    p_recruit: float = 0.0

    def __post_init__(self):
        if self.kind not in ("deterministic", "poisson", "binomial"):
            raise DomainError(f"unknown seed model {self.kind!r}")
        if min(self.k, self.mu, self.n_pool, self.p_recruit) < 0:
            raise DomainError("seed model parameters must be nonnegative")

    @classmethod
    def deterministic(cls, k: int) -> "SeedModel":
        return cls(kind="deterministic", k=int(k))

    @classmethod
    def poisson(cls, mu: float) -> "SeedModel":
        return cls(kind="poisson", mu=float(mu))

    @classmethod
    def binomial(cls, n_pool: int, p_recruit: float) -> "SeedModel":
        if not 0.0 <= p_recruit <= 1.0:
            raise DomainError("p_recruit must lie in [0,1]")
        return cls(kind="binomial", n_pool=int(n_pool), p_recruit=float(p_recruit))

    def prob_at_least(self, c: int) -> float:
        """P(k >= c), exact."""
        if c <= 0:
            return 1.0
        if self.kind == "deterministic":
            return 1.0 if self.k >= c else 0.0
        if self.kind == "poisson":
            if self.mu == 0.0:
                return 0.0
            # exact lower sum in extended precision; c is at most N+1
            acc = np.longdouble(0.0)
            term = np.longdouble(math.exp(-self.mu))
            for j in range(c):
                acc += term
                term *= np.longdouble(self.mu) / np.longdouble(j + 1)
            return float(max(0.0, min(1.0, 1.0 - float(acc))))
        if c > self.n_pool:
            return 0.0
        return float(binom_pmf_vector(self.n_pool, self.p_recruit)[c:].sum())


@dataclass(frozen=True)
class OppositionSpec:
    """Reduced-form opposition: capacity omega, bearable burden c_bar.

    Default burden rule is equal division omega/M; a user table r(m) for
    m = 1..N (nonincreasing in m) may be supplied instead.
    """

    omega: float
    c_bar: float
    burden_table: Optional[tuple] = None

    def __post_init__(self):
        if self.omega < 0:
            raise DomainError("omega must be nonnegative")
        if self.c_bar <= 0:
            raise DomainError("c_bar must be positive")
        if self.burden_table is not None:
            t = np.asarray(self.burden_table, float)
            if np.any(np.diff(t) > 0):
                raise DomainError("burden table must be nonincreasing in M")


def durability_floor(opp: OppositionSpec, N: int) -> int:
    """Minimum revealed coalition size with bearable per-endorser burden.

    Returns 0 when there is no floor, N+1 when durability is unreachable.
    """
    if opp.burden_table is not None:
        table = opp.burden_table
        if len(table) < N:
            raise DomainError("burden table must cover m = 1..N")
        for m in range(1, N + 1):
            if table[m - 1] <= opp.c_bar:
                return m
        return N + 1
    if opp.omega == 0.0:
        return 0
    floor = math.ceil(opp.omega / opp.c_bar)
    return min(floor, N + 1)


# ---------------------------------------------------------------------------
# objective evaluations
# ---------------------------------------------------------------------------


def excess_share(T: int, q: float, N: int) -> float:
    """Excess revealed coalition share: E[M/N | M >= T] - q, nonnegative."""
    return trunc_mean_share(N, T, q) - q


@dataclass(frozen=True)
class DesignPoint:
    """One threshold's evaluation: objective value plus its components."""

    T: int
    tau: float
    q_high: float
    success_prob: float
    delta: float
    objective: float
    sigma: float = 1.0
    ok: bool = True
    note: str = ""


def _solve_selected(T: int, params: ModelParams, selection: str):
    if selection == "high":
        return participatory_share(T, params)
    return solve_fixed_point(T, 0.0, params)


def _tail_and_delta(N: int, T_eff: int, q: float) -> tuple[float, float]:
    if T_eff > N:
        return 0.0, 0.0
    pmf = binom_pmf_vector(N, q)
    p = float(pmf[T_eff:].sum())
    if p <= 0.0:
        return 0.0, 0.0
    m = np.arange(T_eff, N + 1, dtype=np.longdouble)
    cond_mean = float((m / N * pmf[T_eff:]).sum() / pmf[T_eff:].sum())
    return p, cond_mean - q


def conditional_point(T: int, params: ModelParams, *, selection: str = "high",
                      floor_M: int = 0, sigma: float = 1.0) -> DesignPoint:
    """Evaluate P(M >= max(T, floor_M)) * Delta at the selected equilibrium of T.

    floor_M > T turns this into the durable objective; sigma != 1 scales it
    into the ex-ante objective. Solver failures yield ok=False entries.
    """
    Threshold(int(T), params.N)
    res = _solve_selected(T, params, selection)
    if not res.converged:
        return DesignPoint(T=T, tau=T / params.N, q_high=res.q, success_prob=0.0,
                           delta=0.0, objective=0.0, sigma=sigma, ok=False,
                           note=f"fixed point residual {res.residual:.2e} after {res.iterations} iterations")
    T_eff = max(T, floor_M)
    p, delta = _tail_and_delta(params.N, T_eff, res.q)
    return DesignPoint(T=T, tau=T / params.N, q_high=res.q, success_prob=p,
                       delta=delta, objective=sigma * p * delta, sigma=sigma)


def psi_conditional(T: int, params: ModelParams) -> float:
    """Conditional design objective at the participatory equilibrium."""
    return conditional_point(T, params).objective


def sigma_coordination(T: int, seed: SeedModel, params: ModelParams) -> float:
    """P(seed count clears the tipping point); 1 when the basin is unique."""
    fps = enumerate_fixed_points(T, params)
    if fps.q_unstable is None:
        return 1.0
    need = math.ceil(params.N * fps.q_unstable)
    return seed.prob_at_least(need)


def ex_ante_point(T: int, seed: SeedModel, params: ModelParams) -> DesignPoint:
    sigma = sigma_coordination(T, seed, params)
    return conditional_point(T, params, sigma=sigma)


def psi_ex_ante(T: int, seed: SeedModel, params: ModelParams) -> float:
    """Ex-ante objective sigma(T) * Psi_H(T)."""
    return ex_ante_point(T, seed, params).objective


def durable_point(T: int, opp: OppositionSpec, params: ModelParams) -> DesignPoint:
    return conditional_point(T, params, floor_M=durability_floor(opp, params.N))


def psi_durable(T: int, opp: OppositionSpec, params: ModelParams) -> float:
    """Durable objective with effective threshold max(T, M_O(omega))."""
    return durable_point(T, opp, params).objective


# ---------------------------------------------------------------------------
# curve optimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DesignCurve:
    """Per-threshold evaluations of one objective plus its argmax."""

    objective: str
    points: tuple
    argmax_T: Optional[int]
    warn: bool

    CSV_HEADER = ("T", "tau", "q_high", "success_prob", "delta", "objective", "flags")

    def value_at(self, T: int) -> float:
        for p in self.points:
            if p.T == T:
                return p.objective
        raise KeyError(T)

    def point_at(self, T: int) -> DesignPoint:
        for p in self.points:
            if p.T == T:
                return p
        raise KeyError(T)

    def csv_rows(self):
        rows = []
        for p in self.points:
            flags = "ok" if p.ok else f"failed:{p.note}"
            rows.append([p.T, p.tau, p.q_high, p.success_prob, p.delta, p.objective, flags])
        return rows


def _make_evaluator(objective: str, params: ModelParams,
                    seed: Optional[SeedModel],
                    opposition: Optional[OppositionSpec]) -> Callable[[int], DesignPoint]:
    if objective == "conditional":
        return lambda T: conditional_point(T, params)
    if objective == "ex_ante":
        if seed is None:
            raise DomainError("ex_ante objective needs a seed model")
        return lambda T: ex_ante_point(T, seed, params)
    if objective == "durable":
        if opposition is None:
            raise DomainError("durable objective needs an opposition spec")
        floor = durability_floor(opposition, params.N)
        return lambda T: conditional_point(T, params, floor_M=floor)
    if objective == "conditional_low":
        return lambda T: conditional_point(T, params, selection="low")
    raise DomainError(f"unknown objective {objective!r}")


def optimize_threshold(objective: str, params: ModelParams,
                       T_range: Iterable[int], *,
                       seed: Optional[SeedModel] = None,
                       opposition: Optional[OppositionSpec] = None,
                       points: Optional[Sequence[DesignPoint]] = None) -> DesignCurve:
    """Evaluate the objective on every T in T_range; argmax is the smallest maximizer.

    Pass precomputed `points` (e.g. from a parallel map) to skip evaluation.
    """
    Ts = sorted(set(int(T) for T in T_range))
    if not Ts or Ts[0] < 1 or Ts[-1] >= params.N:
        raise DomainError(f"T range must be nonempty within [1, N-1]; got {Ts[:1]}..{Ts[-1:]}")
    if points is None:
        evaluate = _make_evaluator(objective, params, seed, opposition)
        points = [evaluate(T) for T in Ts]
    best_T, best_v = None, -math.inf
    warn = False
    for p in points:
        if not p.ok:
            warn = True
            continue
        if p.objective > best_v:
            best_T, best_v = p.T, p.objective
    return DesignCurve(objective=objective, points=tuple(points),
                       argmax_T=best_T, warn=warn)
