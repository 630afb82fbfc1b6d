"""Hot numeric kernels: squared-distance and centroid accumulation loops.

Each kernel has a numba ``@njit`` build and a pure-numpy build. The numba
path is used when numba imports cleanly and the environment variable
``MACOIR_NUMBA`` is not set to ``0``/``false``/``off``. Both paths use
float64 accumulation and break distance ties identically (lowest index),
so cluster assignments agree between them; see ``benchmarks/kernel_bench.py``
for a speed comparison.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_enabled() -> bool:
    flag = os.environ.get("MACOIR_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via MACOIR_NUMBA=0 instead
    njit = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and _numba_enabled()


# ---------------------------------------------------------------------------
# pure-numpy builds


def _pairwise_sqdist_np(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _sqdist_to_vec_np(points: np.ndarray, v: np.ndarray) -> np.ndarray:
    diff = points - v[None, :]
    return np.einsum("nd,nd->n", diff, diff)


def _assign_nearest_np(points: np.ndarray, centroids: np.ndarray):
    sq = _pairwise_sqdist_np(points, centroids)
    labels = np.argmin(sq, axis=1)  # first occurrence = lowest centroid index
    return labels.astype(np.int64), sq[np.arange(points.shape[0]), labels]


def _centroid_sums_np(points: np.ndarray, labels: np.ndarray, k: int):
    sums = np.zeros((k, points.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, counts


# ---------------------------------------------------------------------------
# numba builds

if HAS_NUMBA:

    @njit(cache=True)
    def _pairwise_sqdist_nb(points, centroids):  # pragma: no cover - jitted
        n, d = points.shape
        k = centroids.shape[0]
        out = np.empty((n, k), dtype=np.float64)
        for i in range(n):
            for j in range(k):
                acc = 0.0
                for t in range(d):
                    diff = points[i, t] - centroids[j, t]
                    acc += diff * diff
                out[i, j] = acc
        return out

    @njit(cache=True)
    def _sqdist_to_vec_nb(points, v):  # pragma: no cover - jitted
        n, d = points.shape
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            acc = 0.0
            for t in range(d):
                diff = points[i, t] - v[t]
                acc += diff * diff
            out[i] = acc
        return out

    @njit(cache=True)
    def _assign_nearest_nb(points, centroids):  # pragma: no cover - jitted
        n, d = points.shape
        k = centroids.shape[0]
        labels = np.empty(n, dtype=np.int64)
        dists = np.empty(n, dtype=np.float64)
        for i in range(n):
            best = np.inf
            best_j = 0
            for j in range(k):
                acc = 0.0
                for t in range(d):
                    diff = points[i, t] - centroids[j, t]
                    acc += diff * diff
                if acc < best:  # strict: ties keep the lowest centroid index
                    best = acc
                    best_j = j
            labels[i] = best_j
            dists[i] = best
        return labels, dists

    @njit(cache=True)
    def _centroid_sums_nb(points, labels, k):  # pragma: no cover - jitted
        n, d = points.shape
        sums = np.zeros((k, d), dtype=np.float64)
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            j = labels[i]
            counts[j] += 1
            for t in range(d):
                sums[j, t] += points[i, t]
        return sums, counts


# ---------------------------------------------------------------------------
# dispatch


def _as64(a: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def pairwise_sqdist(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance between every point and every centroid."""
    points, centroids = _as64(points), _as64(centroids)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError(
            f"dimension mismatch: points are {points.shape[1]}-dim, "
            f"centroids are {centroids.shape[1]}-dim"
        )
    if USE_NUMBA:
        return _pairwise_sqdist_nb(points, centroids)
    return _pairwise_sqdist_np(points, centroids)


def sqdist_to_vec(points: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from every point to one vector."""
    points, v = _as64(points), _as64(v)
    if points.shape[1] != v.shape[0]:
        raise ValueError(
            f"dimension mismatch: points are {points.shape[1]}-dim, query is {v.shape[0]}-dim"
        )
    if USE_NUMBA:
        return _sqdist_to_vec_nb(points, v)
    return _sqdist_to_vec_np(points, v)


def assign_nearest(points: np.ndarray, centroids: np.ndarray):
    """Nearest-centroid labels plus the squared distance to that centroid.

    Ties are broken by the lowest centroid index on both code paths.
    """
    points, centroids = _as64(points), _as64(centroids)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError("dimension mismatch between points and centroids")
    if USE_NUMBA:
        return _assign_nearest_nb(points, centroids)
    return _assign_nearest_np(points, centroids)


def centroid_sums(points: np.ndarray, labels: np.ndarray, k: int):
    """Per-cluster coordinate sums and member counts (float64 accumulation)."""
    points = _as64(points)
    labels = np.ascontiguousarray(labels, dtype=np.int64)
    if USE_NUMBA:
        return _centroid_sums_nb(points, labels, k)
    return _centroid_sums_np(points, labels, k)
