"""Worst-case spectral constants of a dictionary.

For an n x m dictionary these are combinatorial quantities over column
subsets: the Kruskal rank and spark, the per-cardinality minimum singular
value (the left asymmetric restricted isometry constant), the worst ratio
of a complement's largest singular value to a subset's smallest, the
derived amplification sequence and its running maxima, and the maximum
pseudoinverse Frobenius norm over all subsets of at most n columns.

All scans are exhaustive and guarded by a subset budget that converts
combinatorial blowups into :class:`BudgetExceededError` instead of hangs.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .errors import BudgetExceededError, PreconditionError
from .matops import RANK_RTOL, check_matrix, resolve_budget, subset_count

# Column norms within this tolerance of 1 mark the dictionary as normalized.
UNIT_NORM_TOL = 1e-8


def unit_norm_columns(a, tol: float = UNIT_NORM_TOL) -> bool:
    """True when every column has unit Euclidean norm within ``tol``."""
    m = check_matrix(a)
    return bool(np.max(np.abs(np.linalg.norm(m, axis=0) - 1.0)) <= tol)


def rank_tolerance(a: np.ndarray) -> float:
    """Absolute singular-value cutoff below which a subset counts as dependent.

    Scaled by the largest singular value of the whole dictionary, which
    dominates that of every submatrix.
    """
    return RANK_RTOL * float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class KruskalRank:
    """Kruskal rank result.

    ``q`` is the largest verified cardinality at which every column subset
    is independent; when ``complete`` is False the scan ran out of budget
    and ``q`` is only a certified lower bound (``spark`` is then unknown).
    A spark of min(n, m) + 1 means no dependent subset exists within the
    scannable range; for m > n that value is the true spark.
    """

    q: int
    spark: int | None
    complete: bool


class EtaResult(NamedTuple):
    value: float
    subset: tuple[int, ...]


@dataclass(frozen=True)
class SpectralProfile:
    """Per-cardinality spectral constants of one dictionary, j = 1..depth."""

    n: int
    m: int
    q: int
    spark: int | None
    rank_complete: bool
    depth: int
    sigma_min_seq: np.ndarray
    eta_seq: np.ndarray
    gamma_seq: np.ndarray
    gamma_bar_seq: np.ndarray
    gamma_bar_prime_seq: np.ndarray
    unit_columns: bool

    def _at(self, seq: np.ndarray, j: int) -> float:
        if j < 1 or j > self.depth:
            raise PreconditionError(f"j={j} outside profile depth 1..{self.depth}")
        return float(seq[j - 1])

    def sigma_min(self, j: int) -> float:
        return self._at(self.sigma_min_seq, j)

    def eta(self, j: int) -> float:
        return self._at(self.eta_seq, j)

    def gamma(self, j: int) -> float:
        return self._at(self.gamma_seq, j)

    def gamma_bar(self, j: int) -> float:
        return self._at(self.gamma_bar_seq, j)

    def gamma_bar_prime(self, j: int) -> float:
        return self._at(self.gamma_bar_prime_seq, j)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("j,sigma_min_j,eta_j,gamma_j,gamma_bar_j,gamma_bar_prime_j\n")
        for i in range(self.depth):
            row = (
                self.sigma_min_seq[i],
                self.eta_seq[i],
                self.gamma_seq[i],
                self.gamma_bar_seq[i],
                self.gamma_bar_prime_seq[i],
            )
            out.write(f"{i + 1}," + ",".join(f"{v:.17g}" for v in row) + "\n")
        return out.getvalue()


class _BudgetMeter:
    """Tracks subsets examined against the per-call budget."""

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def charge(self, count: int, what: str) -> None:
        if self.used + count > self.limit:
            raise BudgetExceededError(
                f"{what} needs {count} more subsets "
                f"(used {self.used} of budget {self.limit})",
                required=self.used + count,
                budget=self.limit,
            )
        self.used += count

    def affords(self, count: int) -> bool:
        return self.used + count <= self.limit


def kruskal_rank(a, budget: int | None = None) -> KruskalRank:
    """Largest q such that every q-column submatrix has full column rank.

    Scans cardinalities in increasing order; if the subset budget runs out
    the result carries ``complete=False`` and ``q`` is a certified lower
    bound. Otherwise spark = q + 1 when a dependent subset was found, and
    min(n, m) + 1 when none exists in the scannable range.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    tol = rank_tolerance(m_arr)
    meter = _BudgetMeter(resolve_budget(budget))
    jmax = min(n, m)
    q = 0
    for j in range(1, jmax + 1):
        count = subset_count(m, j)
        if not meter.affords(count):
            return KruskalRank(q=q, spark=None, complete=False)
        meter.charge(count, f"rank scan at j={j}")
        smin, _ = backend.scan_sigma_min(m_arr, j)
        if smin <= tol:
            return KruskalRank(q=q, spark=j, complete=True)
        q = j
    return KruskalRank(q=q, spark=jmax + 1, complete=True)


def sigma_min_j(a, j: int, budget: int | None = None) -> float:
    """Smallest singular value over all j-column submatrices.

    For j up to the Kruskal rank this equals the minimum of |Ax| / |x| over
    j-sparse x, i.e. the left asymmetric restricted isometry constant.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    if j < 1 or j > m:
        raise PreconditionError(f"j={j} outside 1..{m}")
    meter = _BudgetMeter(resolve_budget(budget))
    meter.charge(subset_count(m, j), f"sigma_min scan at j={j}")
    value, _ = backend.scan_sigma_min(m_arr, j)
    return value


def eta_j(a, j: int, budget: int | None = None) -> EtaResult:
    """Worst ratio sigma_max(complement) / sigma_min(subset) over j-column subsets.

    Defined for j up to the Kruskal rank, where every subset has a positive
    smallest singular value. Also returns the attaining subset; ties go to
    the lexicographically first one.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    if j < 1 or j >= m:
        raise PreconditionError(f"j={j} outside 1..{m - 1} (complement must be non-empty)")
    meter = _BudgetMeter(resolve_budget(budget))
    meter.charge(subset_count(m, j), f"sigma_min scan at j={j}")
    tol = rank_tolerance(m_arr)
    smin, _ = backend.scan_sigma_min(m_arr, j)
    if smin <= tol:
        rank = kruskal_rank(m_arr, budget=budget)
        raise PreconditionError(
            f"j={j} exceeds the Kruskal rank q={rank.q}"
            + ("" if rank.complete else " (lower bound, rank scan hit budget)")
        )
    meter.charge(subset_count(m, j), f"eta scan at j={j}")
    value, subset = backend.scan_eta(m_arr, j)
    return EtaResult(value=value, subset=tuple(int(i) for i in subset))


def gamma_profile(a, depth: int, budget: int | None = None) -> SpectralProfile:
    """Spectral profile up to the requested cardinality.

    Fills sigma_min, eta and gamma sequences for j = 1..depth, plus running
    maxima of gamma with and without the sqrt(m) floor. Requires depth at
    most the Kruskal rank; leftover budget extends the rank scan past depth
    so the profile can report the true q when affordable.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    jmax = min(n, m)
    if depth < 1 or depth >= m or depth > jmax:
        rank = kruskal_rank(m_arr, budget=budget)  # error path only
        raise PreconditionError(
            f"depth={depth} outside 1..{min(jmax, m - 1)} (Kruskal rank q={rank.q})"
        )
    tol = rank_tolerance(m_arr)
    meter = _BudgetMeter(resolve_budget(budget))

    sigma_seq = np.empty(depth)
    eta_seq = np.empty(depth)
    for j in range(1, depth + 1):
        meter.charge(subset_count(m, j), f"sigma_min scan at j={j}")
        smin, _ = backend.scan_sigma_min(m_arr, j)
        if smin <= tol:
            raise PreconditionError(f"depth={depth} exceeds the Kruskal rank q={j - 1}")
        sigma_seq[j - 1] = smin
        meter.charge(subset_count(m, j), f"eta scan at j={j}")
        eta_seq[j - 1], _ = backend.scan_eta(m_arr, j)

    q = depth
    spark: int | None = None
    complete = False
    for j in range(depth + 1, jmax + 1):
        count = subset_count(m, j)
        if not meter.affords(count):
            break
        meter.charge(count, f"rank scan at j={j}")
        smin, _ = backend.scan_sigma_min(m_arr, j)
        if smin <= tol:
            spark = j
            complete = True
            break
        q = j
    else:
        spark = jmax + 1
        complete = True

    gamma_seq = np.sqrt((m - np.arange(1, depth + 1)) * (1.0 + eta_seq**2))
    gamma_bar = np.maximum.accumulate(gamma_seq)
    gamma_bar_prime = np.maximum(math.sqrt(m), gamma_bar)
    return SpectralProfile(
        n=n,
        m=m,
        q=q,
        spark=spark,
        rank_complete=complete,
        depth=depth,
        sigma_min_seq=sigma_seq,
        eta_seq=eta_seq,
        gamma_seq=gamma_seq,
        gamma_bar_seq=gamma_bar,
        gamma_bar_prime_seq=gamma_bar_prime,
        unit_columns=unit_norm_columns(m_arr),
    )


def g_constant(a, budget: int | None = None) -> float:
    """Maximum pseudoinverse Frobenius norm over all subsets of <= n columns.

    Requires every such subset to have full column rank (the unique
    representation property); a dependent subset raises
    :class:`PreconditionError`.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    meter = _BudgetMeter(resolve_budget(budget))
    total = sum(subset_count(m, j) for j in range(1, min(n, m) + 1))
    meter.charge(total, "pseudoinverse scan over all subsets of <= n columns")
    value, singular, _ = backend.scan_g(m_arr, rank_tolerance(m_arr))
    if singular:
        raise PreconditionError(
            "dictionary violates the unique representation property: "
            "a subset of <= n columns is rank deficient"
        )
    return value
