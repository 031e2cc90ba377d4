"""Dense small-matrix operations: singular spectra, pseudoinverse norms,
column-subset extraction and enumeration, and a text format for matrices.

Everything here is a pure function of its inputs. Singular values are
computed by LAPACK through numpy; ``oracle_spectrum`` provides an
algorithmically independent cross-check route (characteristic polynomial
of the Gram matrix with closed-form roots) for matrices whose short side
is at most 4.
"""

from __future__ import annotations

import itertools
import math
import os
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    BudgetExceededError,
    InvalidInputError,
    ParseError,
    SingularityError,
    UnsupportedSizeError,
)

DEFAULT_BUDGET = 10_000_000
BUDGET_ENV_VAR = "SPARSECERT_BUDGET"

# Singular values at or below RANK_RTOL * sigma_max count as zero.
RANK_RTOL = 1e-12


def resolve_budget(budget: int | None) -> int:
    """Effective subset-enumeration budget: explicit arg, else env var, else default."""
    if budget is not None:
        if budget < 1:
            raise InvalidInputError(f"budget must be positive, got {budget}")
        return int(budget)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise InvalidInputError(f"{BUDGET_ENV_VAR}={env!r} is not an integer") from exc
        if value < 1:
            raise InvalidInputError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
        return value
    return DEFAULT_BUDGET


def check_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a 2-D float64 array with finite entries."""
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise InvalidInputError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] == 0 or m.shape[1] == 0:
        raise InvalidInputError(f"matrix has a zero dimension: shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix contains NaN or Inf entries")
    return m


def check_vector(v, length: int | None = None) -> np.ndarray:
    """Validate and return ``v`` as a 1-D float64 array with finite entries."""
    a = np.asarray(v, dtype=np.float64).reshape(-1)
    if a.size == 0:
        raise InvalidInputError("vector is empty")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("vector contains NaN or Inf entries")
    if length is not None and a.size != length:
        raise InvalidInputError(f"vector has length {a.size}, expected {length}")
    return a


def singular_spectrum(a) -> np.ndarray:
    """All min(rows, cols) singular values of ``a`` in descending order.

    A zero (within floating point) trailing value signals rank deficiency.
    """
    m = check_matrix(a)
    return np.linalg.svd(m, compute_uv=False)


def pseudoinverse_frobenius(a, rank_rtol: float = RANK_RTOL) -> float:
    """Frobenius norm of the Moore-Penrose pseudoinverse of ``a``.

    Equals sqrt(sum of 1/sigma_i^2) over the singular values. Requires full
    row rank or full column rank: a singular value at or below
    ``rank_rtol * sigma_max`` raises :class:`SingularityError` carrying the
    offending value.
    """
    s = singular_spectrum(a)
    tol = rank_rtol * s[0]
    if s[-1] <= tol:
        raise SingularityError(
            f"matrix is rank deficient: sigma_min={s[-1]:.3e} <= {tol:.3e}",
            sigma=float(s[-1]),
        )
    return float(np.sqrt(np.sum(1.0 / s**2)))


def check_subset(indices: Iterable[int], parent_cols: int) -> tuple[int, ...]:
    """Validate a column subset: non-empty, strictly increasing, in range."""
    idx = tuple(int(i) for i in indices)
    if not idx:
        raise InvalidInputError("column subset is empty")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise InvalidInputError(f"column subset {idx} is not strictly increasing")
    if idx[0] < 0 or idx[-1] >= parent_cols:
        raise InvalidInputError(f"column subset {idx} out of range for {parent_cols} columns")
    return idx


def take_columns(a, indices: Iterable[int]) -> np.ndarray:
    """The submatrix of ``a`` formed by the given column indices, in order."""
    m = check_matrix(a)
    idx = check_subset(indices, m.shape[1])
    return m[:, list(idx)].copy()


def complement_indices(indices: Iterable[int], parent_cols: int) -> tuple[int, ...]:
    """Columns of the parent matrix that are not in ``indices``, ascending."""
    idx = set(check_subset(indices, parent_cols))
    return tuple(i for i in range(parent_cols) if i not in idx)


def subset_count(cols: int, j: int) -> int:
    return math.comb(cols, j)


def enumerate_subsets(cols: int, j: int, budget: int | None = None) -> Iterator[tuple[int, ...]]:
    """All C(cols, j) column subsets of size ``j`` in lexicographic order.

    The order is part of the contract: downstream argmax/argmin tie-breaking
    picks the first subset in this order. Raises
    :class:`BudgetExceededError` up front if the count exceeds the budget.
    """
    if j < 1 or j > cols:
        raise InvalidInputError(f"subset size {j} out of range 1..{cols}")
    count = subset_count(cols, j)
    limit = resolve_budget(budget)
    if count > limit:
        raise BudgetExceededError(
            f"enumerating C({cols},{j})={count} subsets exceeds budget {limit}",
            required=count,
            budget=limit,
        )
    return itertools.combinations(range(cols), j)


# ---------------------------------------------------------------------------
# Independent spectral oracle: characteristic polynomial of the Gram matrix,
# closed-form roots for degree <= 4, polished by a few Newton steps. Shares
# no code with the LAPACK route above.
# ---------------------------------------------------------------------------


def _charpoly_coeffs(g: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients of symmetric g (k <= 4).

    Returned as [1, c_{k-1}, ..., c_0] with det(lambda I - g) convention,
    built from sums of principal minors.
    """
    k = g.shape[0]
    if k == 1:
        return np.array([1.0, -g[0, 0]])
    if k == 2:
        tr = g[0, 0] + g[1, 1]
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        return np.array([1.0, -tr, det])

    def minor_det(rows):
        sub = g[np.ix_(rows, rows)]
        if len(rows) == 2:
            return sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0]
        return (
            sub[0, 0] * (sub[1, 1] * sub[2, 2] - sub[1, 2] * sub[2, 1])
            - sub[0, 1] * (sub[1, 0] * sub[2, 2] - sub[1, 2] * sub[2, 0])
            + sub[0, 2] * (sub[1, 0] * sub[2, 1] - sub[1, 1] * sub[2, 0])
        )

    e1 = float(np.trace(g))
    e2 = sum(minor_det(list(r)) for r in itertools.combinations(range(k), 2))
    if k == 3:
        e3 = minor_det([0, 1, 2])
        return np.array([1.0, -e1, e2, -e3])
    e3 = sum(minor_det(list(r)) for r in itertools.combinations(range(k), 3))
    e4 = float(np.linalg.det(g))  # 4x4 determinant; direct cofactor expansion adds nothing
    return np.array([1.0, -e1, e2, -e3, e4])


def _real_cubic_roots(b: float, c: float, d: float) -> list[float]:
    """Real roots of x^3 + b x^2 + c x + d, trigonometric method.

    Assumes the caller wants all real roots; for the symmetric matrices fed
    through here all roots are real, so the discriminant is clamped.
    """
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    if abs(p) < 1e-14 * max(1.0, abs(q)) ** (2.0 / 3.0):
        r = -q
        root = math.copysign(abs(r) ** (1.0 / 3.0), r)
        return [root - shift] * 3
    m = 2.0 * math.sqrt(max(-p, 0.0) / 3.0) if p < 0 else 0.0
    if m == 0.0:
        # p > 0: single real root via hyperbolic form
        t = 2.0 * math.sqrt(p / 3.0)
        arg = 3.0 * q / (p * t)
        root = -t * math.sinh(math.asinh(arg) / 3.0)
        return [root - shift]
    arg = 3.0 * q / (p * m)
    arg = min(1.0, max(-1.0, arg))
    phi = math.acos(arg) / 3.0
    return [m * math.cos(phi - 2.0 * math.pi * i / 3.0) - shift for i in range(3)]


def _real_quartic_roots(b: float, c: float, d: float, e: float) -> list[float]:
    """Real roots of x^4 + b x^3 + c x^2 + d x + e via a resolvent cubic.

    Depresses the quartic, factors it into two quadratics with the largest
    root of the resolvent, and clamps discriminants (symmetric input implies
    all-real roots up to rounding).
    """
    shift = b / 4.0
    p = c - 3.0 * b * b / 8.0
    q = b**3 / 8.0 - b * c / 2.0 + d
    r = -3.0 * b**4 / 256.0 + b * b * c / 16.0 - b * d / 4.0 + e
    scale = max(1.0, abs(p), abs(r) ** 0.5)
    roots: list[float] = []
    if abs(q) <= 1e-14 * scale**1.5:
        # biquadratic: y^4 + p y^2 + r
        disc = max(p * p / 4.0 - r, 0.0)
        s = math.sqrt(disc)
        for z in (-p / 2.0 + s, -p / 2.0 - s):
            z = max(z, 0.0)
            roots.extend([math.sqrt(z), -math.sqrt(z)])
    else:
        cubic = _real_cubic_roots(2.0 * p, p * p - 4.0 * r, -q * q)
        z = max(cubic)
        z = max(z, 0.0)
        s = math.sqrt(z)
        if s == 0.0:
            s = 1e-300  # q != 0 forces z > 0; guard exact-zero division regardless
        u = (p + z - q / s) / 2.0
        v = (p + z + q / s) / 2.0
        # factorization (y^2 + s y + u)(y^2 - s y + v)
        for half_b, cc in ((s / 2.0, u), (-s / 2.0, v)):
            disc = max(half_b * half_b - cc, 0.0)
            sq = math.sqrt(disc)
            roots.extend([-half_b + sq, -half_b - sq])
    return [y - shift for y in roots]


def _newton_polish(coeffs: np.ndarray, roots: list[float]) -> list[float]:
    """Refine closed-form roots in place; a polish only, never a search.

    Near multiple roots the derivative vanishes and a raw Newton step can
    fly off, so steps are capped and only kept when they reduce |p|.
    """
    deriv = np.polyder(coeffs)
    polished = []
    for x in roots:
        for _ in range(3):
            fx = float(np.polyval(coeffs, x))
            dfx = float(np.polyval(deriv, x))
            if fx == 0.0 or dfx == 0.0:
                break
            step = fx / dfx
            if abs(step) > 1e-3 * (1.0 + abs(x)):
                break
            candidate = x - step
            if abs(float(np.polyval(coeffs, candidate))) > abs(fx):
                break
            x = candidate
            if abs(step) <= 1e-16 * max(1.0, abs(x)):
                break
        polished.append(x)
    return polished


def oracle_spectrum(a) -> np.ndarray:
    """Singular values via the Gram characteristic polynomial, short side <= 4.

    Uses whichever of M^T M or M M^T is smaller, solves the characteristic
    polynomial in closed form (degree <= 4) and polishes each root with
    Newton steps on the polynomial itself. Independent of the LAPACK path in
    :func:`singular_spectrum`; agreement within 1e-10 absolute is the test
    contract between the two.
    """
    m = check_matrix(a)
    k = min(m.shape)
    if k > 4:
        raise UnsupportedSizeError(f"oracle supports short side <= 4, got {k}")
    g = m.T @ m if m.shape[1] <= m.shape[0] else m @ m.T
    # rescale to O(1) eigenvalues so the root-solver thresholds are meaningful
    scale = float(np.max(np.abs(g)))
    if scale == 0.0:
        return np.zeros(k)
    g = g / scale
    coeffs = _charpoly_coeffs(g)
    if k == 1:
        eigs = [float(g[0, 0])]
    elif k == 2:
        # stable symmetric 2x2 form avoids cancellation in the discriminant
        half_tr = (g[0, 0] + g[1, 1]) / 2.0
        disc = math.hypot((g[0, 0] - g[1, 1]) / 2.0, g[0, 1])
        eigs = [half_tr + disc, half_tr - disc]
    elif k == 3:
        eigs = _real_cubic_roots(*coeffs[1:])
        if len(eigs) < 3:  # p > 0 cannot happen for symmetric input; guard anyway
            eigs = eigs * 3
        eigs = _newton_polish(coeffs, eigs)
    else:
        eigs = _real_quartic_roots(*coeffs[1:])
        eigs = _newton_polish(coeffs, eigs)
    eigs = np.clip(np.sort(np.asarray(eigs))[::-1], 0.0, None)
    return np.sqrt(scale * eigs[:k])


# ---------------------------------------------------------------------------
# Matrix text format: first line "rows cols", then one whitespace-separated
# row per line. Scientific notation accepted; writer emits 17 significant
# digits so values round-trip exactly.
# ---------------------------------------------------------------------------


def format_matrix(a) -> str:
    m = check_matrix(a)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines.extend(" ".join(f"{v:.17g}" for v in row) for row in m)
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty matrix file")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"first line must be 'rows cols', got {lines[0]!r}")
    try:
        rows, cols = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ParseError(f"non-integer dimensions in header {lines[0]!r}") from exc
    if rows < 1 or cols < 1:
        raise ParseError(f"dimensions must be positive, got {rows}x{cols}")
    if len(lines) - 1 != rows:
        raise ParseError(f"expected {rows} data rows, found {len(lines) - 1}")
    data = []
    for i, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if len(fields) != cols:
            raise ParseError(f"line {i}: expected {cols} values, found {len(fields)}")
        try:
            data.append([float(f) for f in fields])
        except ValueError as exc:
            raise ParseError(f"line {i}: unparseable number") from exc
    m = np.array(data, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise ParseError("matrix file contains non-finite values")
    return m


def write_matrix(path, a) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(a))


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix(fh.read())


def write_vector(path, v) -> None:
    """Store a vector as a one-row matrix in the text format."""
    write_matrix(path, check_vector(v).reshape(1, -1))


def read_vector(path) -> np.ndarray:
    """Read a vector stored as a one-row or one-column matrix."""
    m = read_matrix(path)
    if 1 not in m.shape:
        raise ParseError(f"expected a vector file (one row or column), got shape {m.shape}")
    return m.reshape(-1)
