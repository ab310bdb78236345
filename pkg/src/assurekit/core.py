"""Model primitives: parameters, safety functions, signing utility, exact binomial machinery.

Everything in this module is a pure function of its arguments. Binomial
quantities are computed exactly (mode-anchored multiplicative recurrence,
extended-precision accumulation), never by normal approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConditioningError, DomainError

MAX_N = 100_000

_SQRT2 = math.sqrt(2.0)


def norm_cdf(x: float) -> float:
    """Standard normal CDF, erf-based, absolute accuracy well below 1e-12."""
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# safety-in-numbers cost multiplier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SafetySpec:
    """Shape of the exposure-cost multiplier g(q), nonincreasing in the share q.

    Kinds:
      exponential(xi): g(q) = exp(-xi * q), g(0) = 1
      linear(slope):   g(q) = 1 - slope * q
      step(level_lo, level_hi, breakpoint): level_lo for q < breakpoint,
        level_hi for q >= breakpoint (right-continuous at the jump);
        requires level_lo >= level_hi.
    """

    kind: str
    xi: float = 0.0
    slope: float = 0.0
    level_lo: float = 1.0
    level_hi: float = 1.0
    breakpoint: float = 0.5

    def __post_init__(self):
        if self.kind not in ("exponential", "linear", "step"):
            raise DomainError(f"unknown safety kind {self.kind!r}")
        for name in ("xi", "slope", "level_lo", "level_hi", "breakpoint"):
            if getattr(self, name) < 0:
                raise DomainError(f"safety parameter {name} must be nonnegative")
        if self.kind == "linear" and self.slope > 1.0:
            raise DomainError("linear slope > 1 makes g negative on [0,1]")
        if self.kind == "step" and self.level_lo < self.level_hi:
            raise DomainError("step safety must be nonincreasing (level_lo >= level_hi)")

    @classmethod
    def exponential(cls, xi: float) -> "SafetySpec":
        return cls(kind="exponential", xi=xi)

    @classmethod
    def linear(cls, slope: float) -> "SafetySpec":
        return cls(kind="linear", slope=slope)

    @classmethod
    def step(cls, level_lo: float, level_hi: float, breakpoint: float) -> "SafetySpec":
        return cls(kind="step", level_lo=level_lo, level_hi=level_hi, breakpoint=breakpoint)

    def g(self, q: float) -> float:
        return safety_g(q, self)


def safety_g(q: float, spec: SafetySpec) -> float:
    """Exposure-cost multiplier at anticipated participation share q in [0,1]."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"participation share q={q} outside [0,1]")
    if spec.kind == "exponential":
        return math.exp(-spec.xi * q)
    if spec.kind == "linear":
        return 1.0 - spec.slope * q
    return spec.level_lo if q < spec.breakpoint else spec.level_hi


# ---------------------------------------------------------------------------
# expressive-benefit type distribution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeDistribution:
    """Continuous CDF of the idiosyncratic type.

    Default is the standard normal. A tabulated alternative takes
    (abscissae, cdf values) and interpolates piecewise-linearly, which keeps
    the CDF continuous and nondecreasing; outside the table it is clamped
    to the end values.
    """

    kind: str = "standard_normal"
    grid: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("standard_normal", "tabulated"):
            raise DomainError(f"unknown type distribution {self.kind!r}")
        if self.kind == "tabulated":
            xs, ps = np.asarray(self.grid, float), np.asarray(self.values, float)
            if xs.size < 2 or xs.size != ps.size:
                raise DomainError("tabulated CDF needs matching grids of length >= 2")
            if np.any(np.diff(xs) <= 0):
                raise DomainError("tabulated abscissae must be strictly increasing")
            if np.any(np.diff(ps) < 0) or ps[0] < 0 or ps[-1] > 1:
                raise DomainError("tabulated CDF must be nondecreasing within [0,1]")

    @classmethod
    def standard_normal(cls) -> "TypeDistribution":
        return cls()

    @classmethod
    def tabulated(cls, xs, ps) -> "TypeDistribution":
        return cls(kind="tabulated", grid=tuple(float(x) for x in xs),
                   values=tuple(float(p) for p in ps))

    def cdf(self, x: float) -> float:
        if self.kind == "standard_normal":
            if x == math.inf:
                return 1.0
            if x == -math.inf:
                return 0.0
            return norm_cdf(x)
        xs, ps = self.grid, self.values
        if x <= xs[0]:
            return ps[0]
        if x >= xs[-1]:
            return ps[-1]
        return float(np.interp(x, xs, ps))

    def survival(self, x: float) -> float:
        return 1.0 - self.cdf(x)

    def cdf_array(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "standard_normal":
            out = np.array([self.cdf(v) for v in x.ravel()])
            return out.reshape(x.shape)
        return np.interp(x, self.grid, self.values,
                         left=self.values[0], right=self.values[-1])


# ---------------------------------------------------------------------------
# parameters and thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """All primitives of one contract environment.

    N        eligible population size (>= 2)
    pi       support prevalence in [0,1]
    lam      share of supporters with high vulnerability, in [0,1]
    alpha_L  low-vulnerability exposure scalar  (alpha_H >= alpha_L >= 0)
    alpha_H  high-vulnerability exposure scalar
    safety   SafetySpec for the multiplier g(q)
    s        abstention stigma on success, >= 0 (constant)
    w_bar    warm-glow slope of the net signing utility eta(q) = w_bar*q - k
    k        signing friction >= 0
    rho      confidentiality trust in [0,1]; 1 means no leak risk
    """

    N: int
    pi: float
    lam: float
    alpha_L: float
    alpha_H: float
    safety: SafetySpec
    s: float
    w_bar: float
    k: float
    rho: float = 1.0
    type_dist: TypeDistribution = field(default_factory=TypeDistribution.standard_normal)

    def __post_init__(self):
        if not (isinstance(self.N, int) and 2 <= self.N <= MAX_N):
            raise DomainError(f"N must be an integer in [2, {MAX_N}], got {self.N}")
        if not 0.0 <= self.pi <= 1.0:
            raise DomainError("pi must lie in [0,1]")
        if not 0.0 <= self.lam <= 1.0:
            raise DomainError("lam must lie in [0,1]")
        if not 0.0 <= self.alpha_L <= self.alpha_H:
            raise DomainError("need alpha_H >= alpha_L >= 0")
        if self.s < 0 or self.w_bar < 0 or self.k < 0:
            raise DomainError("s, w_bar, k must be nonnegative")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError("rho must lie in [0,1]")


@dataclass(frozen=True)
class Threshold:
    """Assurance threshold T with its population share tau = T/N; 1 <= T < N."""

    T: int
    N: int

    def __post_init__(self):
        if not (isinstance(self.T, int) and 1 <= self.T < self.N):
            raise DomainError(f"threshold T={self.T} outside [1, N-1] for N={self.N}")

    @property
    def tau(self) -> float:
        return self.T / self.N


def check_threshold(T: int, N: int) -> None:
    Threshold(int(T), int(N))


def eta(q: float, params: ModelParams) -> float:
    """Net signing utility w_bar*q - k; negative at q=0 whenever k > 0."""
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"participation share q={q} outside [0,1]")
    return params.w_bar * q - params.k


# ---------------------------------------------------------------------------
# exact binomial machinery
# ---------------------------------------------------------------------------

def _check_binom_args(n: int, q: float) -> None:
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= MAX_N):
        raise DomainError(f"trial count n={n} outside [0, {MAX_N}]")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"success probability q={q} outside [0,1]")


def binom_pmf_vector(n: int, q: float) -> np.ndarray:
    """Full Binomial(n, q) pmf as a normalized longdouble vector of length n+1.

    Anchored at the mode and extended outward with the multiplicative
    recurrence pmf(k+1)/pmf(k) = ((n-k)/(k+1)) * (q/(1-q)), so no factorials
    are formed and far-tail terms underflow gracefully to zero.
    """
    _check_binom_args(n, q)
    if q == 0.0:
        out = np.zeros(n + 1, dtype=np.longdouble)
        out[0] = 1.0
        return out
    if q == 1.0:
        out = np.zeros(n + 1, dtype=np.longdouble)
        out[n] = 1.0
        return out
    mode = min(n, int((n + 1) * q))
    log_anchor = (math.lgamma(n + 1) - math.lgamma(mode + 1) - math.lgamma(n - mode + 1)
                  + mode * math.log(q) + (n - mode) * math.log1p(-q))
    anchor = np.longdouble(math.exp(log_anchor))
    out = np.empty(n + 1, dtype=np.longdouble)
    out[mode] = anchor
    r = np.longdouble(q) / np.longdouble(1.0 - q)
    if mode < n:
        k = np.arange(mode, n, dtype=np.longdouble)
        up = np.cumprod((n - k) / (k + 1.0) * r)
        out[mode + 1:] = anchor * up
    if mode > 0:
        k = np.arange(mode, 0, -1, dtype=np.longdouble)
        down = np.cumprod(k / (n - k + 1.0) / r)
        out[mode - 1::-1] = anchor * down
    total = out.sum()
    if total > 0:
        out /= total
    return out


def binom_pmf(n: int, k: int, q: float) -> float:
    """P(X = k) for X ~ Binomial(n, q)."""
    _check_binom_args(n, q)
    if not 0 <= k <= n:
        raise DomainError(f"k={k} outside [0, n]")
    return float(binom_pmf_vector(n, q)[k])


def binom_tail(n: int, k_min: int, q: float) -> float:
    """P(X >= k_min) for X ~ Binomial(n, q); 1 at k_min <= 0, 0 at k_min = n+1."""
    _check_binom_args(n, q)
    if not 0 <= k_min <= n + 1:
        raise DomainError(f"k_min={k_min} outside [0, n+1]")
    if k_min <= 0:
        return 1.0
    if k_min == n + 1:
        return 0.0
    return float(binom_pmf_vector(n, q)[k_min:].sum())


def binom_pmf_matrix(n: int, qs) -> np.ndarray:
    """Row-stacked pmf vectors for many success probabilities (float64 result)."""
    qs = np.asarray(qs, dtype=float)
    out = np.empty((qs.size, n + 1), dtype=float)
    for i, q in enumerate(qs.ravel()):
        out[i] = binom_pmf_vector(n, float(q)).astype(float)
    return out


def binom_tail_array(n: int, k_min: int, qs) -> np.ndarray:
    """P(X >= k_min) evaluated at many success probabilities."""
    if k_min <= 0:
        return np.ones(np.asarray(qs, float).size)
    if k_min == n + 1:
        return np.zeros(np.asarray(qs, float).size)
    return binom_pmf_matrix(n, qs)[:, k_min:].sum(axis=1)


def trunc_mean_share(N: int, T: int, q: float) -> float:
    """E[M/N | M >= T] for M ~ Binomial(N, q); exact summation.

    Raises ConditioningError when P(M >= T) = 0.
    """
    _check_binom_args(N, q)
    if not 0 <= T <= N:
        raise DomainError(f"T={T} outside [0, N]")
    pmf = binom_pmf_vector(N, q)
    tail = pmf[T:].sum()
    if float(tail) <= 0.0:
        raise ConditioningError(f"P(M >= {T}) = 0 under Binomial({N}, {q})")
    m = np.arange(T, N + 1, dtype=np.longdouble)
    return float((m / N * pmf[T:]).sum() / tail)
