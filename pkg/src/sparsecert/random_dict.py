"""Deterministic concentration formulas and Monte Carlo checks for Gaussian
random dictionaries.

For an n x m dictionary with iid N(0, 1/n) entries the extreme singular
values of column subsets concentrate, which turns the combinatorial
amplification constants into closed-form targets with deviation slacks
(r1, r2). This module evaluates those targets, the union-bound failure
probability attached to them, the asymptotic-regime condition, and the
sparsity-limit curve, plus empirical tail checks of the underlying
singular-value concentration inequalities (Davidson and Szarek).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, PreconditionError
from .matops import check_matrix
from .seeding import stream

# Binomial sums beyond this switch the failure-probability report to log space.
_EXACT_SUM_LIMIT = 1e15


@dataclass(frozen=True)
class RandomDictSpec:
    """Shape of a Gaussian random dictionary (m > n)."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m <= self.n:
            raise InvalidInputError(f"need m > n >= 1, got n={self.n}, m={self.m}")


def _check_slacks(n: int, j: int, r1: float, r2: float) -> None:
    if r1 < 0.0:
        raise DomainError(f"r1 must be >= 0, got {r1}")
    limit = 1.0 - math.sqrt(j / n)
    if not 0.0 <= r2 < limit:
        raise DomainError(f"r2={r2} outside [0, 1 - sqrt({j}/{n})) = [0, {limit:.6g})")


def eta_seq(n: int, m: int, j: int, r1: float = 0.0, r2: float = 0.0) -> float:
    """Concentration target (1 + sqrt((m-j)/n) + r1) / (1 - sqrt(j/n) - r2).

    With r1 = r2 = 0 this is the almost-sure limit of the worst
    complement-to-subset singular value ratio at cardinality j.
    """
    RandomDictSpec(n, m)
    if j < 1 or j > n - 1:
        raise DomainError(f"j={j} outside 1..{n - 1}")
    _check_slacks(n, j, r1, r2)
    return (1.0 + math.sqrt((m - j) / n) + r1) / (1.0 - math.sqrt(j / n) - r2)


def gamma_seq(n: int, m: int, j: int, r1: float = 0.0, r2: float = 0.0) -> float:
    """sqrt((m - j) (1 + eta^2)) on the concentration target; strictly
    increasing in j and always above sqrt(m)."""
    eta = eta_seq(n, m, j, r1, r2)
    return math.sqrt((m - j) * (1.0 + eta * eta))


def gamma_analog(x: float, p: float, a: float, b: float) -> float:
    """Continuous analog of :func:`gamma_seq`: strictly increasing on [0, b^2).

    With p = m/n, a = 1 + r1, b = 1 - r2, sqrt(n) times this function at
    x = j/n reproduces gamma_seq(n, m, j, r1, r2) exactly.
    """
    if a < 0.0 or b <= 0.0 or p < b * b:
        raise DomainError(f"need a >= 0 and p >= b^2 > 0, got a={a}, b={b}, p={p}")
    if not 0.0 <= x < b * b:
        raise DomainError(f"x={x} outside [0, b^2) = [0, {b * b:.6g})")
    ratio = (a + math.sqrt(p - x)) / (b - math.sqrt(x))
    return math.sqrt((p - x) * (1.0 + ratio * ratio))


def binom_upper_log(m: int, j: int) -> float:
    """log of the elementary upper estimate e^(j ln(m/j) + j) for C(m, j)."""
    if j < 1 or j > m:
        raise InvalidInputError(f"j={j} outside 1..{m}")
    return j * math.log(m / j) + j


@dataclass(frozen=True)
class RegimeCheck:
    ok: bool
    margin: float


def regime_check(u: float, v: float, r1: float, r2: float) -> RegimeCheck:
    """Whether the exponential-decay regime applies: u (1 + ln v) < min(r1, r2)^2 / 2.

    ``u`` is the sparsity fraction (twice the support size over n), ``v`` the
    columns-per-support ratio. The margin (right side minus left side) is
    returned for diagnostics; it crosses zero exactly where the boolean flips.
    """
    if not 0.0 < u < 1.0:
        raise DomainError(f"u={u} outside (0, 1)")
    if v <= 0.0:
        raise DomainError(f"v={v} must be positive")
    if r1 <= 0.0:
        raise DomainError(f"r1={r1} must be positive")
    if not 0.0 < r2 < 1.0 - math.sqrt(u):
        raise DomainError(f"r2={r2} outside (0, 1 - sqrt(u)) = (0, {1 - math.sqrt(u):.6g})")
    lhs = u * (1.0 + math.log(v))
    rhs = min(r1 * r1, r2 * r2) / 2.0
    return RegimeCheck(ok=lhs < rhs, margin=rhs - lhs)


@dataclass(frozen=True)
class ProbBoundReport:
    """Right-hand side of the union failure-probability bound at cardinality ell.

    ``binom_sum`` is the exact sum of C(m, j) for j = 1..ell as a float (inf
    once it overflows); ``log_binom_sum`` and ``log_failure_prob`` stay
    finite, so the report remains meaningful in the overflow regime.
    ``vacuous`` flags a right-hand side of at least 1, which certifies
    nothing.
    """

    n: int
    m: int
    ell: int
    r1: float
    r2: float
    gamma_value: float
    binom_sum: float
    log_binom_sum: float
    binom_upper_log_terms: tuple[float, ...]
    failure_prob_rhs: float
    log_failure_prob: float
    vacuous: bool
    regime_ok: bool
    regime_margin: float


def failure_bound(n: int, m: int, ell: int, r1: float, r2: float) -> ProbBoundReport:
    """Union-bound failure probability for the slacked amplification constant.

    The chance that the dictionary's amplification constant at cardinality
    ell exceeds gamma_seq(n, m, ell, r1, r2) is below
    (sum of C(m, j) for j <= ell) * (e^(-n r1^2 / 2) + e^(-n r2^2 / 2)).
    Requires r1 > 0 and 0 < r2 < 1 - sqrt(ell/n).
    """
    RandomDictSpec(n, m)
    if ell < 1 or ell > n - 1:
        raise PreconditionError(f"ell={ell} outside 1..{n - 1}")
    if r1 <= 0.0 or r2 <= 0.0:
        raise PreconditionError(f"need r1 > 0 and r2 > 0, got r1={r1}, r2={r2}")
    _check_slacks(n, ell, r1, r2)

    gamma_value = gamma_seq(n, m, ell, r1, r2)
    exact_sum = sum(math.comb(m, j) for j in range(1, ell + 1))
    log_sum = math.log(exact_sum)  # exact integer, log is safe at any size
    log_tail = np.logaddexp(-n * r1 * r1 / 2.0, -n * r2 * r2 / 2.0)
    log_rhs = log_sum + float(log_tail)
    if exact_sum <= _EXACT_SUM_LIMIT:
        binom_sum = float(exact_sum)
        rhs = binom_sum * (math.exp(-n * r1 * r1 / 2.0) + math.exp(-n * r2 * r2 / 2.0))
    else:
        binom_sum = float(exact_sum) if exact_sum < 2.0**1023 else math.inf
        rhs = math.exp(log_rhs) if log_rhs < 709.0 else math.inf

    u = ell / n
    v = m / ell
    try:
        regime = regime_check(u, v, r1, r2)
    except DomainError:
        regime = RegimeCheck(ok=False, margin=-math.inf)
    return ProbBoundReport(
        n=n,
        m=m,
        ell=ell,
        r1=r1,
        r2=r2,
        gamma_value=gamma_value,
        binom_sum=binom_sum,
        log_binom_sum=log_sum,
        binom_upper_log_terms=tuple(binom_upper_log(m, j) for j in range(1, ell + 1)),
        failure_prob_rhs=rhs,
        log_failure_prob=log_rhs,
        vacuous=rhs >= 1.0,
        regime_ok=regime.ok,
        regime_margin=regime.margin,
    )


def sparsity_supremum(beta: float, c: float) -> float:
    """Largest admissible sparsity fraction for the exponential regime.

    Solves u (1 + ln(beta/u)) = c^2 (1 - sqrt(u))^2 / 2 on (0, 1) by
    bisection. The solution is unique because the left side over the right
    side is strictly increasing in u; the returned root has equation
    residual below 1e-12.
    """
    if beta < 1.0:
        raise DomainError(f"beta={beta} must be >= 1")
    if not 0.0 < c <= 1.0:
        raise DomainError(f"c={c} outside (0, 1]")

    def f(u: float) -> float:
        return u * (1.0 + math.log(beta / u)) - c * c * (1.0 - math.sqrt(u)) ** 2 / 2.0

    lo, hi = 1e-12, (1.0 - 1e-12) ** 2
    flo = f(lo)
    if flo > 0.0:  # the left side already dominates at the bracket edge
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-16 * hi:
            break
    root = 0.5 * (lo + hi)
    if abs(f(root)) >= 1e-12:
        raise DomainError(f"bisection residual {f(root):.3e} too large at u={root}")
    return root


def gaussian_dictionary(n: int, m: int, seed: int, normalize: bool = False) -> np.ndarray:
    """Deterministic n x m draw with iid N(0, 1/n) entries.

    ``normalize=True`` rescales each column to unit norm afterwards; note
    that normalization couples the entries, so the concentration formulas
    above apply to the unnormalized draw only. The stream algorithm is
    recorded in :data:`sparsecert.seeding.RNG_ALGORITHM`.
    """
    RandomDictSpec(n, m)
    rng = stream(seed)
    a = rng.standard_normal((n, m)) / math.sqrt(n)
    if normalize:
        a /= np.linalg.norm(a, axis=0)
    return a


def sampled_eta(a, j: int, samples: int, seed: int) -> float:
    """Monte Carlo estimate of the cardinality-j amplification ratio.

    Samples random j-column subsets instead of enumerating them, so the
    result is a lower bound in expectation; meant for convergence reporting
    on dictionaries too large for the exhaustive scan.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    if j < 1 or j >= m:
        raise InvalidInputError(f"j={j} outside 1..{m - 1}")
    if samples < 1:
        raise InvalidInputError("samples must be positive")
    rng = stream(seed)
    best = 0.0
    cols = np.arange(m)
    for _ in range(samples):
        subset = np.sort(rng.permutation(cols)[:j])
        comp = np.setdiff1d(cols, subset, assume_unique=True)
        smin = np.linalg.svd(m_arr[:, subset], compute_uv=False)[-1]
        smax = np.linalg.svd(m_arr[:, comp], compute_uv=False)[0]
        if smin > 0.0:
            best = max(best, smax / smin)
    return best


@dataclass(frozen=True)
class TailCheckResult:
    """Empirical exceedance frequencies against the concentration bound."""

    n: int
    p: int
    r: float
    trials: int
    seed: int
    threshold_max: float
    threshold_min: float
    freq_max: float
    freq_min: float
    prob_bound: float
    sampling_slack: float
    sigma_max: np.ndarray
    sigma_min: np.ndarray

    @property
    def within_bound(self) -> bool:
        limit = self.prob_bound + self.sampling_slack
        return self.freq_max <= limit and self.freq_min <= limit


def szarek_check(n: int, p: int, r: float, trials: int, seed: int) -> TailCheckResult:
    """Monte Carlo check of the Davidson-Szarek singular value tail bounds.

    Draws n x p matrices with iid N(0, 1/n) entries and counts how often
    sigma_max exceeds its upper threshold and sigma_min undershoots its
    lower one; both frequencies must stay within e^(-n r^2 / 2) plus a
    three-sigma binomial sampling allowance. Wide shapes (p > n) use the
    transposed-rescaled reduction, which only shifts the thresholds.
    """
    if n < 1 or p < 1:
        raise InvalidInputError(f"need n, p >= 1, got n={n}, p={p}")
    if r <= 0.0:
        raise InvalidInputError(f"r={r} must be positive")
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    if p <= n:
        thr_max = 1.0 + math.sqrt(p / n) + r
        thr_min = 1.0 - math.sqrt(p / n) - r
    else:
        thr_max = math.sqrt(p / n) + 1.0 + r
        thr_min = math.sqrt(p / n) - 1.0 - r
    smax = np.empty(trials)
    smin = np.empty(trials)
    for t in range(trials):
        x = stream(seed, t).standard_normal((n, p)) / math.sqrt(n)
        s = np.linalg.svd(x, compute_uv=False)
        smax[t] = s[0]
        smin[t] = s[-1]
    bound = math.exp(-n * r * r / 2.0)
    slack = 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
    return TailCheckResult(
        n=n,
        p=p,
        r=r,
        trials=trials,
        seed=seed,
        threshold_max=thr_max,
        threshold_min=thr_min,
        freq_max=float(np.mean(smax > thr_max)),
        freq_min=float(np.mean(smin < thr_min)),
        prob_bound=bound,
        sampling_slack=slack,
        sigma_max=smax,
        sigma_min=smin,
    )
