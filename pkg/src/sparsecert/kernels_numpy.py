"""Pure-numpy subset-scan kernels (batched LAPACK singular values).

Fallback twin of :mod:`sparsecert.kernels_numba`; both expose the same four
scan functions and agree within floating-point tolerance. Subsets are
visited in lexicographic order and all arg-reductions keep the first
occurrence, so results are deterministic.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

# Soft cap on scratch elements per chunk, keeps peak memory flat.
_CHUNK_ELEMS = 4_000_000


def _chunked_combinations(m: int, j: int, width: int):
    """Yield (offset, combs) blocks of the C(m, j) lex-ordered subsets."""
    per = max(1, _CHUNK_ELEMS // max(1, width))
    it = itertools.combinations(range(m), j)
    offset = 0
    while True:
        block = list(itertools.islice(it, per))
        if not block:
            return
        yield offset, np.asarray(block, dtype=np.int64)
        offset += len(block)


def _batch_svals(a: np.ndarray, combs: np.ndarray) -> np.ndarray:
    """Descending singular values of A[:, c] for every subset row c."""
    batch = np.moveaxis(a[:, combs], 0, 1)  # (count, n, j) slices == A[:, subset]
    return np.linalg.svd(batch, compute_uv=False)


def _complements(combs: np.ndarray, m: int) -> np.ndarray:
    count, j = combs.shape
    mask = np.ones((count, m), dtype=bool)
    mask[np.arange(count)[:, None], combs] = False
    return np.broadcast_to(np.arange(m), (count, m))[mask].reshape(count, m - j)


def scan_sigma_min(a: np.ndarray, j: int) -> tuple[float, np.ndarray]:
    """Minimum over all j-column subsets of the smallest singular value."""
    n, m = a.shape
    best = math.inf
    best_subset = None
    for _, combs in _chunked_combinations(m, j, n * j):
        smin = _batch_svals(a, combs)[:, -1]
        k = int(np.argmin(smin))
        if smin[k] < best:
            best = float(smin[k])
            best_subset = combs[k].copy()
    return best, best_subset


def scan_eta(a: np.ndarray, j: int) -> tuple[float, np.ndarray]:
    """Maximum over j-column subsets B of sigma_max(complement) / sigma_min(B).

    The caller must ensure every j-column subset has full rank; a zero
    sigma_min simply produces an infinite ratio here.
    """
    n, m = a.shape
    best = -math.inf
    best_subset = None
    for _, combs in _chunked_combinations(m, j, n * m):
        smin = _batch_svals(a, combs)[:, -1]
        comps = _complements(combs, m)
        smax = _batch_svals(a, comps)[:, 0]
        with np.errstate(divide="ignore"):
            ratio = smax / smin
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best = float(ratio[k])
            best_subset = combs[k].copy()
    return best, best_subset


def scan_g(a: np.ndarray, tol_abs: float) -> tuple[float, bool, np.ndarray | None]:
    """Maximum pseudoinverse Frobenius norm over all subsets of <= n columns.

    Returns (value, singular, argmax_subset); ``singular`` is set as soon as
    any scanned subset has a singular value at or below ``tol_abs``, in which
    case the value is meaningless and the scan stops.
    """
    n, m = a.shape
    best = -math.inf
    best_subset = None
    for j in range(1, min(n, m) + 1):
        for _, combs in _chunked_combinations(m, j, n * j):
            s = _batch_svals(a, combs)
            if np.any(s[:, -1] <= tol_abs):
                return best, True, best_subset
            val = np.sqrt(np.sum(1.0 / s**2, axis=1))
            k = int(np.argmax(val))
            if val[k] > best:
                best = float(val[k])
                best_subset = combs[k].copy()
    return best, False, best_subset


def scan_noisy_tight(
    a: np.ndarray, ell: int, alpha: float, delta: float, tol_abs: float
) -> tuple[float, bool]:
    """Worst case over j <= ell and j-column subsets B of the noisy quadratic
    (1 + r^2) (m-j) alpha^2 + 2 r sqrt(m-j) alpha delta + delta^2 / smin^2,
    with r = sigma_max(complement) / sigma_min(B).
    """
    n, m = a.shape
    best = -math.inf
    for j in range(1, ell + 1):
        for _, combs in _chunked_combinations(m, j, n * m):
            smin = _batch_svals(a, combs)[:, -1]
            if np.any(smin <= tol_abs):
                return best, True
            comps = _complements(combs, m)
            smax = _batch_svals(a, comps)[:, 0]
            ratio = smax / smin
            ms = float(m - j)
            val = (
                (1.0 + ratio**2) * ms * alpha**2
                + 2.0 * ratio * math.sqrt(ms) * alpha * delta
                + delta**2 / smin**2
            )
            best = max(best, float(np.max(val)))
    return best, False
