"""Certified upper bounds on the distance between a candidate solution of
A s = x and the unknown sparsest solution.

Every bound is driven by one order statistic of the candidate: the
magnitude of its (floor(ell/2) + 1)-th largest entry. The certificates
record which dictionary preconditions were verified and which hypotheses
(sparsity of the unknown solution, noise budgets) are taken on trust from
the caller; those are never silently assumed away.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import backend
from .analysis import (
    SpectralProfile,
    g_constant,
    gamma_profile,
    kruskal_rank,
    rank_tolerance,
    unit_norm_columns,
)
from .errors import BudgetExceededError, DomainError, InvalidInputError, PreconditionError
from .matops import check_matrix, check_vector, resolve_budget, subset_count


class Theorem(str, Enum):
    """Which bound a certificate carries."""

    FIRST_BOUND = "FirstBound"
    LOOSE_SIGMA = "LooseSigma"
    TIGHT_GAMMA = "TightGamma"
    NOISY_LOOSE = "NoisyLoose"
    NOISY_TIGHT = "NoisyTight"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool


@dataclass(frozen=True)
class BoundCertificate:
    """One certified bound, with its verified checks and trusted assumptions.

    ``bound`` is None when a dictionary precondition failed and the bound
    was withheld; the failing check is then visible in ``checks``.
    """

    theorem: Theorem
    ell: int
    alpha: float
    delta_total: float
    bound: float | None
    assumptions: tuple[str, ...]
    checks: tuple[Check, ...]

    @property
    def withheld(self) -> bool:
        return self.bound is None

    def to_json(self) -> str:
        """Single-line record with stable key order for diff-based tests."""
        record = {
            "theorem": self.theorem.value,
            "ell": self.ell,
            "alpha": self.alpha,
            "delta": self.delta_total,
            "bound": self.bound,
            "assumptions": list(self.assumptions),
            "checks": [{"name": c.name, "pass": c.passed} for c in self.checks],
        }
        return json.dumps(record, separators=(", ", ": "))


def h_stat(s, k: int) -> float:
    """Magnitude of the k-th largest-magnitude entry of ``s``.

    Well defined under ties: only the sorted magnitude values matter.
    """
    v = check_vector(s)
    if k < 1 or k > v.size:
        raise InvalidInputError(f"k={k} outside 1..{v.size}")
    return float(np.sort(np.abs(v))[v.size - k])


def alpha_stat(s, ell: int) -> float:
    """The threshold h(floor(ell/2) + 1, s) that drives every bound."""
    return h_stat(s, ell // 2 + 1)


def _sparsity_assumption(ell: int) -> str:
    return f"the sparsest solution has at most floor({ell}/2)={ell // 2} nonzero entries"


def _noise_assumptions(epsilon: float, delta: float) -> tuple[str, ...]:
    return (
        f"measurement noise norm is at most epsilon={epsilon:.17g}",
        f"candidate residual norm |A s_hat - x| is at most delta={delta:.17g}",
    )


def _check_ell(ell: int, profile: SpectralProfile) -> None:
    if ell < 1 or ell > profile.q:
        suffix = "" if profile.rank_complete else " (lower bound, rank scan hit budget)"
        raise PreconditionError(f"ell={ell} outside 1..q={profile.q}{suffix}")
    if ell > profile.depth:
        raise PreconditionError(f"profile depth {profile.depth} too shallow for ell={ell}")


def _check_noise(epsilon: float, delta: float) -> float:
    if not (math.isfinite(epsilon) and math.isfinite(delta)) or epsilon < 0 or delta < 0:
        raise InvalidInputError(f"epsilon={epsilon} and delta={delta} must be finite and >= 0")
    return epsilon + delta


def first_bound(a, profile: SpectralProfile, s_hat, budget: int | None = None) -> BoundCertificate:
    """Pseudoinverse-norm bound: (G + 1) * m * h(floor(n/2) + 1, s_hat).

    G is the maximum pseudoinverse Frobenius norm over all subsets of at
    most n columns. Needs unit-norm columns and the unique representation
    property; if either check fails the certificate reports it and the
    bound is withheld rather than raised, so callers can inspect the
    failure.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    s = check_vector(s_hat, m)
    alpha = h_stat(s, n // 2 + 1)
    checks = [
        Check("unit_norm_columns", profile.unit_columns),
        Check("unique_representation_property", profile.q == n),
    ]
    assumptions = (_sparsity_assumption(n),)
    if not all(c.passed for c in checks):
        return BoundCertificate(
            Theorem.FIRST_BOUND, n, alpha, 0.0, None, assumptions, tuple(checks)
        )
    g = g_constant(m_arr, budget=budget)
    return BoundCertificate(
        Theorem.FIRST_BOUND,
        n,
        alpha,
        0.0,
        (g + 1.0) * m * alpha,
        assumptions,
        tuple(checks),
    )


def loose_bound(profile: SpectralProfile, s_hat, ell: int) -> BoundCertificate:
    """Minimum-singular-value bound: (1 / sigma_min^(ell) + 1) * m * alpha.

    Refuses dictionaries without unit-norm columns instead of normalizing
    them silently; the tight bound covers the general case.
    """
    if not profile.unit_columns:
        raise PreconditionError("loose bound requires unit-norm columns")
    _check_ell(ell, profile)
    s = check_vector(s_hat, profile.m)
    alpha = alpha_stat(s, ell)
    bound = (1.0 / profile.sigma_min(ell) + 1.0) * profile.m * alpha
    return BoundCertificate(
        Theorem.LOOSE_SIGMA,
        ell,
        alpha,
        0.0,
        bound,
        (_sparsity_assumption(ell),),
        (Check("unit_norm_columns", True), Check("ell_within_kruskal_rank", True)),
    )


def tight_bound(
    profile: SpectralProfile, s_hat, ell: int, normalized: bool | None = None
) -> BoundCertificate:
    """Amplification bound gamma_bar * alpha, the tight counterpart of
    :func:`loose_bound`.

    Without unit-norm columns the running maximum includes the sqrt(m)
    floor. ``normalized`` overrides the flag detected on the profile.
    """
    _check_ell(ell, profile)
    if normalized is None:
        normalized = profile.unit_columns
    if normalized and not profile.unit_columns:
        raise PreconditionError("normalized=True but the profiled dictionary is not unit-norm")
    s = check_vector(s_hat, profile.m)
    alpha = alpha_stat(s, ell)
    factor = profile.gamma_bar(ell) if normalized else profile.gamma_bar_prime(ell)
    return BoundCertificate(
        Theorem.TIGHT_GAMMA,
        ell,
        alpha,
        0.0,
        factor * alpha,
        (_sparsity_assumption(ell),),
        (
            Check("ell_within_kruskal_rank", True),
            Check("unit_norm_columns", bool(normalized)),
        ),
    )


def noisy_loose_bound(
    profile: SpectralProfile, s_hat, ell: int, epsilon: float, delta: float
) -> BoundCertificate:
    """Noisy extension of :func:`loose_bound` with combined budget
    Delta = epsilon + delta: adds Delta / sigma_min^(ell).

    Only the sum enters the formula, so callers that know just the total
    may put it in either argument. With Delta = 0 this reduces exactly to
    the noiseless loose bound; with alpha = 0 it is the stability bound
    Delta / sigma_min^(ell).
    """
    total = _check_noise(epsilon, delta)
    base = loose_bound(profile, s_hat, ell)
    bound = base.bound + total / profile.sigma_min(ell)
    return BoundCertificate(
        Theorem.NOISY_LOOSE,
        ell,
        base.alpha,
        total,
        bound,
        base.assumptions + _noise_assumptions(epsilon, delta),
        base.checks,
    )


def noisy_tight_bound(
    a,
    s_hat,
    ell: int,
    epsilon: float,
    delta: float,
    normalized: bool | None = None,
    budget: int | None = None,
) -> BoundCertificate:
    """Noisy tight bound via exhaustive worst-case search.

    The candidate threshold and the noise budget interact with the
    dictionary here, so the maximization over subset sizes j <= ell and
    j-column subsets must be redone for every problem; the result is the
    square root of the worst value of

        (1 + r^2) (m - j) alpha^2 + 2 r sqrt(m - j) alpha Delta
        + Delta^2 / sigma_min^2,

    with r the complement-to-subset singular value ratio. Without unit-norm
    columns the floor m * alpha^2 joins the maximization.
    """
    m_arr = check_matrix(a)
    n, m = m_arr.shape
    if ell < 1 or ell > min(n, m - 1):
        raise PreconditionError(f"ell={ell} outside 1..{min(n, m - 1)}")
    s = check_vector(s_hat, m)
    total = _check_noise(epsilon, delta)
    if normalized is None:
        normalized = unit_norm_columns(m_arr)
    alpha = alpha_stat(s, ell)

    limit = resolve_budget(budget)
    needed = 2 * sum(subset_count(m, j) for j in range(1, ell + 1))
    if needed > limit:
        raise BudgetExceededError(
            f"noisy tight-bound scan needs {needed} subsets, budget is {limit}",
            required=needed,
            budget=limit,
        )
    worst, singular = backend.scan_noisy_tight(
        m_arr, ell, alpha, total, rank_tolerance(m_arr)
    )
    if singular:
        rank = kruskal_rank(m_arr, budget=budget)
        raise PreconditionError(f"ell={ell} exceeds the Kruskal rank q={rank.q}")
    squared = worst if normalized else max(m * alpha**2, worst)
    return BoundCertificate(
        Theorem.NOISY_TIGHT,
        ell,
        alpha,
        total,
        math.sqrt(squared),
        (_sparsity_assumption(ell),) + _noise_assumptions(epsilon, delta),
        (
            Check("ell_within_kruskal_rank", True),
            Check("unit_norm_columns", bool(normalized)),
        ),
    )


# ---------------------------------------------------------------------------
# Worst-case construction achieving equality in the tight bound.
# ---------------------------------------------------------------------------

# Largest opening angle (degrees) for which the pair term dominates the
# amplification sequence of the three-column construction below.
THETA_MAX_DEGREES = math.degrees(math.acos((math.sqrt(17.0) - 1.0) / 4.0))


@dataclass(frozen=True)
class TightnessExample:
    """A 2x3 instance where the tight bound is attained with equality."""

    theta_degrees: float
    alpha: float
    beta: float
    dictionary: np.ndarray
    s0: np.ndarray
    s_hat: np.ndarray
    x: np.ndarray
    gamma_bar: float
    gamma_bar_closed_form: float
    error_norm: float
    bound: float
    equality_residual: float
    s0_residual: float
    s_hat_residual: float


def tightness_example(theta_degrees: float, alpha: float) -> TightnessExample:
    """Build the rotation-family instance attaining the tight bound.

    Three unit columns at angles controlled by theta; the true solution
    uses the first column only, the candidate mixes the other two yet
    solves the same system exactly. Valid for 0 < theta < THETA_MAX_DEGREES
    (about 38.6683 degrees), where the worst pair fixes the amplification
    constant in closed form as sqrt(1 + 1/(1 - cos theta)).
    """
    if not (0.0 < theta_degrees < THETA_MAX_DEGREES):
        raise DomainError(
            f"theta={theta_degrees} degrees outside (0, {THETA_MAX_DEGREES:.4f})"
        )
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive and finite, got {alpha}")
    th = math.radians(theta_degrees)
    beta = alpha / (2.0 * math.sin(th / 2.0))
    a = np.array(
        [
            [1.0, math.cos(th), math.sin(th / 2.0)],
            [0.0, math.sin(th), -math.cos(th / 2.0)],
        ]
    )
    s0 = np.array([beta, 0.0, 0.0])
    s_hat = np.array([0.0, beta, alpha])
    x = a @ s0

    profile = gamma_profile(a, depth=2)
    cert = tight_bound(profile, s_hat, ell=2, normalized=True)
    closed_form = math.sqrt(1.0 + 1.0 / (1.0 - math.cos(th)))
    error = float(np.linalg.norm(s_hat - s0))
    return TightnessExample(
        theta_degrees=theta_degrees,
        alpha=alpha,
        beta=beta,
        dictionary=a,
        s0=s0,
        s_hat=s_hat,
        x=x,
        gamma_bar=profile.gamma_bar(2),
        gamma_bar_closed_form=closed_form,
        error_norm=error,
        bound=cert.bound,
        equality_residual=abs(error - cert.bound) / cert.bound,
        s0_residual=float(np.linalg.norm(a @ s0 - x)),
        s_hat_residual=float(np.linalg.norm(a @ s_hat - x)),
    )
