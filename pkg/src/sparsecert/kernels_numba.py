"""Numba-jitted subset-scan kernels.

Hot twin of :mod:`sparsecert.kernels_numpy`. Singular values come from a
one-sided Jacobi orthogonalization written for tiny dense blocks: it is
allocation-free in the inner loop and beats repeated LAPACK dispatch on the
matrix sizes these scans visit (tens of rows at most). The wide side is
handled by transposing into the workspace first, which leaves singular
values unchanged.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_JACOBI_TOL = 1e-15
_JACOBI_SWEEPS = 60


@njit(cache=True)
def _jacobi_orthogonalize(work, rows, cols):
    """Rotate column pairs of work[:rows, :cols] until mutually orthogonal."""
    for _ in range(_JACOBI_SWEEPS):
        off = 0.0
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                app = 0.0
                aqq = 0.0
                apq = 0.0
                for r in range(rows):
                    wp = work[r, p]
                    wq = work[r, q]
                    app += wp * wp
                    aqq += wq * wq
                    apq += wp * wq
                denom = math.sqrt(app * aqq)
                if denom > 0.0 and abs(apq) > _JACOBI_TOL * denom:
                    rel = abs(apq) / denom
                    if rel > off:
                        off = rel
                    tau = (aqq - app) / (2.0 * apq)
                    sgn = 1.0 if tau >= 0.0 else -1.0
                    t = sgn / (abs(tau) + math.sqrt(1.0 + tau * tau))
                    cs = 1.0 / math.sqrt(1.0 + t * t)
                    sn = cs * t
                    for r in range(rows):
                        wp = work[r, p]
                        wq = work[r, q]
                        work[r, p] = cs * wp - sn * wq
                        work[r, q] = sn * wp + cs * wq
        if off < _JACOBI_TOL:
            break


@njit(cache=True)
def _extremes(work, rows, cols):
    """(sigma_min, sigma_max) of the orthogonalized block: column norms."""
    _jacobi_orthogonalize(work, rows, cols)
    smin = np.inf
    smax = 0.0
    for c in range(cols):
        s = 0.0
        for r in range(rows):
            s += work[r, c] * work[r, c]
        s = math.sqrt(s)
        if s < smin:
            smin = s
        if s > smax:
            smax = s
    return smin, smax


@njit(cache=True)
def _fill_subset(a, idx, j, work, transpose):
    n = a.shape[0]
    for c in range(j):
        col = idx[c]
        if transpose:
            for r in range(n):
                work[c, r] = a[r, col]
        else:
            for r in range(n):
                work[r, c] = a[r, col]


@njit(cache=True)
def _fill_complement(a, idx, j, work, transpose):
    """Copy the complement columns of idx into work, transposed if wide."""
    n, m = a.shape
    pos = 0
    nxt = 0
    for col in range(m):
        if nxt < j and idx[nxt] == col:
            nxt += 1
            continue
        if transpose:
            for r in range(n):
                work[pos, r] = a[r, col]
        else:
            for r in range(n):
                work[r, pos] = a[r, col]
        pos += 1


@njit(cache=True)
def _advance(idx, j, m):
    """Step idx to the next lexicographic combination; False when exhausted."""
    i = j - 1
    while i >= 0 and idx[i] == m - j + i:
        i -= 1
    if i < 0:
        return False
    idx[i] += 1
    for k in range(i + 1, j):
        idx[k] = idx[k - 1] + 1
    return True


@njit(cache=True)
def _scan_sigma_min(a, j):
    n, m = a.shape
    idx = np.arange(j)
    best_idx = np.arange(j)
    # wide subsets go in transposed so column norms are true singular values
    wide = j > n
    if wide:
        work = np.empty((j, n))
    else:
        work = np.empty((n, j))
    best = np.inf
    while True:
        _fill_subset(a, idx, j, work, wide)
        if wide:
            smin, _ = _extremes(work, j, n)
        else:
            smin, _ = _extremes(work, n, j)
        if smin < best:
            best = smin
            best_idx[:] = idx
        if not _advance(idx, j, m):
            break
    return best, best_idx


@njit(cache=True)
def _scan_eta(a, j):
    n, m = a.shape
    idx = np.arange(j)
    best_idx = np.arange(j)
    work_b = np.empty((n, j))
    crows = m - j
    wide = crows > n
    if wide:
        work_c = np.empty((crows, n))
    else:
        work_c = np.empty((n, crows))
    best = -np.inf
    while True:
        _fill_subset(a, idx, j, work_b, False)
        smin, _ = _extremes(work_b, n, j)
        _fill_complement(a, idx, j, work_c, wide)
        if wide:
            _, smax = _extremes(work_c, crows, n)
        else:
            _, smax = _extremes(work_c, n, crows)
        ratio = smax / smin if smin > 0.0 else np.inf
        if ratio > best:
            best = ratio
            best_idx[:] = idx
        if not _advance(idx, j, m):
            break
    return best, best_idx


@njit(cache=True)
def _scan_g(a, tol_abs):
    n, m = a.shape
    best = -np.inf
    best_j = 0
    best_idx = np.zeros(n, dtype=np.int64)
    for j in range(1, min(n, m) + 1):
        idx = np.arange(j)
        work = np.empty((n, j))
        while True:
            _fill_subset(a, idx, j, work, False)
            _jacobi_orthogonalize(work, n, j)
            acc = 0.0
            singular = False
            for c in range(j):
                s = 0.0
                for r in range(n):
                    s += work[r, c] * work[r, c]
                if math.sqrt(s) <= tol_abs:
                    singular = True
                    break
                acc += 1.0 / s
            if singular:
                return best, True, best_j, best_idx
            val = math.sqrt(acc)
            if val > best:
                best = val
                best_j = j
                for c in range(j):
                    best_idx[c] = idx[c]
            if not _advance(idx, j, m):
                break
    return best, False, best_j, best_idx


@njit(cache=True)
def _scan_noisy_tight(a, ell, alpha, delta, tol_abs):
    n, m = a.shape
    best = -np.inf
    for j in range(1, ell + 1):
        idx = np.arange(j)
        work_b = np.empty((n, j))
        crows = m - j
        wide = crows > n
        if wide:
            work_c = np.empty((crows, n))
        else:
            work_c = np.empty((n, crows))
        ms = float(m - j)
        sqrt_ms = math.sqrt(ms)
        while True:
            _fill_subset(a, idx, j, work_b, False)
            smin, _ = _extremes(work_b, n, j)
            if smin <= tol_abs:
                return best, True
            _fill_complement(a, idx, j, work_c, wide)
            if wide:
                _, smax = _extremes(work_c, crows, n)
            else:
                _, smax = _extremes(work_c, n, crows)
            ratio = smax / smin
            val = (
                (1.0 + ratio * ratio) * ms * alpha * alpha
                + 2.0 * ratio * sqrt_ms * alpha * delta
                + (delta * delta) / (smin * smin)
            )
            if val > best:
                best = val
            if not _advance(idx, j, m):
                break
    return best, False


# Thin wrappers so both backends present identical signatures and outputs.


def scan_sigma_min(a: np.ndarray, j: int) -> tuple[float, np.ndarray]:
    value, subset = _scan_sigma_min(np.ascontiguousarray(a), j)
    return float(value), subset


def scan_eta(a: np.ndarray, j: int) -> tuple[float, np.ndarray]:
    value, subset = _scan_eta(np.ascontiguousarray(a), j)
    return float(value), subset


def scan_g(a: np.ndarray, tol_abs: float) -> tuple[float, bool, np.ndarray | None]:
    value, singular, jbest, idx = _scan_g(np.ascontiguousarray(a), tol_abs)
    subset = idx[:jbest].copy() if jbest > 0 else None
    return float(value), bool(singular), subset


def scan_noisy_tight(
    a: np.ndarray, ell: int, alpha: float, delta: float, tol_abs: float
) -> tuple[float, bool]:
    value, singular = _scan_noisy_tight(
        np.ascontiguousarray(a), ell, float(alpha), float(delta), tol_abs
    )
    return float(value), bool(singular)
