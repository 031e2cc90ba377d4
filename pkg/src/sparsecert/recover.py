"""Test-problem generation and a smoothed-l0 solver.

The solver exists to produce realistic approximately-sparse candidates for
the certification pipeline; it maximizes a Gaussian surrogate of the
negative l0 norm over the affine solution set with a graduated smoothing
schedule, starting from the minimum-l2 solution. Other solvers can be
plugged in anywhere a candidate vector is accepted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ParseError, SingularityError
from .matops import check_matrix, check_vector, read_matrix, write_matrix
from .seeding import RNG_ALGORITHM, stream

FEASIBILITY_RTOL = 1e-10


@dataclass(frozen=True)
class ProblemInstance:
    """One synthetic sparse-recovery problem.

    ``x`` equals dictionary @ s0 plus a noise vector of norm exactly
    ``noise_norm`` (zero in the noiseless case). The support indices are
    ascending and s0 has exactly p nonzeros.
    """

    dictionary: np.ndarray
    s0: np.ndarray
    x: np.ndarray
    p: int
    seed: int
    noise_norm: float
    support: tuple[int, ...]
    normalized: bool

    @property
    def n(self) -> int:
        return self.dictionary.shape[0]

    @property
    def m(self) -> int:
        return self.dictionary.shape[1]


def make_instance(
    n: int,
    m: int,
    p: int,
    epsilon: float,
    seed: int,
    normalize_columns: bool = True,
) -> ProblemInstance:
    """Draw a dictionary, a p-sparse solution and its (optionally noisy) image.

    Deterministic given the seed; draw order is fixed (entries, support,
    magnitudes, noise direction) so instances are stable fixtures. Entries
    are standard normal, optionally column-normalized; support positions
    are a uniform sample without replacement; nonzero magnitudes are
    standard normal; the noise direction is uniform on the sphere, scaled
    to norm exactly epsilon.
    """
    if m <= n or n < 1:
        raise InvalidInputError(f"need m > n >= 1, got n={n}, m={m}")
    if p < 1 or p > m:
        raise InvalidInputError(f"p={p} outside 1..{m}")
    if epsilon < 0 or not math.isfinite(epsilon):
        raise InvalidInputError(f"epsilon={epsilon} must be finite and >= 0")
    rng = stream(seed)
    a = rng.standard_normal((n, m))
    if normalize_columns:
        a /= np.linalg.norm(a, axis=0)
    support = np.sort(rng.permutation(m)[:p])
    s0 = np.zeros(m)
    s0[support] = rng.standard_normal(p)
    x = a @ s0
    if epsilon > 0:
        direction = rng.standard_normal(n)
        x = x + epsilon * direction / np.linalg.norm(direction)
    return ProblemInstance(
        dictionary=a,
        s0=s0,
        x=x,
        p=p,
        seed=int(seed),
        noise_norm=float(epsilon),
        support=tuple(int(i) for i in support),
        normalized=normalize_columns,
    )


def _row_rank_pinv(a: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= 1e-12 * s[0] or a.shape[0] > a.shape[1]:
        raise SingularityError(
            f"dictionary must have full row rank, sigma_min={s[-1]:.3e}",
            sigma=float(s[-1]),
        )
    return np.linalg.pinv(a)


def min_l2_solve(a, x) -> np.ndarray:
    """Minimum-Euclidean-norm solution of the underdetermined system."""
    m_arr = check_matrix(a)
    v = check_vector(x, m_arr.shape[0])
    return _row_rank_pinv(m_arr) @ v


def sl0_solve(
    a,
    x,
    sigma_min: float = 1e-3,
    sigma_decrease: float = 0.5,
    inner_iters: int = 3,
    mu: float = 2.0,
) -> np.ndarray:
    """Smoothed-l0 estimate of the sparsest solution of A s = x.

    Starts from the minimum-l2 solution and, for a decreasing sequence of
    smoothing widths sigma, alternates gradient ascent on
    sum(exp(-s_i^2 / (2 sigma^2))) with projection back onto the solution
    set. A coarse final sigma (for example 0.1) leaves a deliberately
    approximate, non-sparse-in-the-exact-sense estimate; a tiny one drives
    the output toward the sparsest solution on recoverable instances.

    The returned vector always satisfies |A s - x| <= 1e-10 |x|.
    """
    if sigma_min <= 0 or not 0 < sigma_decrease < 1 or inner_iters < 1 or mu <= 0:
        raise InvalidInputError("bad solver parameters")
    m_arr = check_matrix(a)
    v = check_vector(x, m_arr.shape[0])
    pinv = _row_rank_pinv(m_arr)
    s = pinv @ v
    sigma = 2.0 * float(np.max(np.abs(s)))
    # schedule runs down to and including sigma_min itself
    while sigma > 0.0:
        for _ in range(inner_iters):
            s = s - mu * s * np.exp(-(s**2) / (2.0 * sigma**2))
            s = s - pinv @ (m_arr @ s - v)
        if sigma <= sigma_min:
            break
        sigma = max(sigma * sigma_decrease, sigma_min)
    s = s - pinv @ (m_arr @ s - v)
    residual = np.linalg.norm(m_arr @ s - v)
    if residual > FEASIBILITY_RTOL * max(np.linalg.norm(v), 1e-300):
        raise SingularityError(f"projection failed to reach feasibility: residual {residual:.3e}")
    return s


# ---------------------------------------------------------------------------
# Instance files: the dictionary in the matrix text format plus a JSON
# sidecar carrying everything needed to rebuild the instance exactly.
# ---------------------------------------------------------------------------


def write_instance(instance: ProblemInstance, matrix_path, sidecar_path) -> None:
    write_matrix(matrix_path, instance.dictionary)
    record = {
        "rng": RNG_ALGORITHM,
        "seed": instance.seed,
        "n": instance.n,
        "m": instance.m,
        "p": instance.p,
        "epsilon": instance.noise_norm,
        "normalized": instance.normalized,
        "support": list(instance.support),
        "s0": [float(v) for v in instance.s0],
        "x": [float(v) for v in instance.x],
    }
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=1)
        fh.write("\n")


def read_instance(matrix_path, sidecar_path) -> ProblemInstance:
    a = read_matrix(matrix_path)
    try:
        with open(sidecar_path, "r", encoding="utf-8") as fh:
            record = json.load(fh)
        return ProblemInstance(
            dictionary=a,
            s0=np.asarray(record["s0"], dtype=np.float64),
            x=np.asarray(record["x"], dtype=np.float64),
            p=int(record["p"]),
            seed=int(record["seed"]),
            noise_norm=float(record["epsilon"]),
            support=tuple(int(i) for i in record["support"]),
            normalized=bool(record["normalized"]),
        )
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad instance sidecar {sidecar_path}: {exc}") from exc
