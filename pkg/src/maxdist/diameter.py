"""Exact sample diameter, maximum norm and threshold pair counts.

The fast routines visit points in order of decreasing norm and stop as
soon as the triangle bound ``|x - y| <= |x| + |y|`` rules out every
remaining pair. For light-tailed samples only a handful of points near
the maximum norm are ever compared. :func:`diameter_naive` scans all
pairs and is kept as the reference the pruned version is tested against.

Distances are compared as squared sums accumulated coordinate by
coordinate in a fixed order, so both routines produce bit-identical
values for the same pair. Ties in the maximum go to the lexicographically
smallest ``(i, j)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .errors import PreconditionError
from .radial_models import PointCloud

# Relative slack on the triangle bound. Rounding in the cached norms and in
# the squared-distance sums is a few ulps; pruning only when the bound is
# below the target by this factor keeps the pruned search exact.
_PRUNE_SLACK = 1e-10


@dataclass(frozen=True)
class DiameterResult:
    value: float
    pair: tuple
    comparisons: int

    def to_dict(self):
        return {"value": self.value, "i": self.pair[0], "j": self.pair[1], "comparisons": self.comparisons}


@dataclass(frozen=True)
class PairCounts:
    w_n: int
    w_prime_n: int
    threshold: float
    cap: float = None


def _as_cloud(points) -> PointCloud:
    return points if isinstance(points, PointCloud) else PointCloud(points)


def _descending_order(norms):
    # stable sort on -norm: equal norms keep index order
    return np.argsort(-norms, kind="stable")


@nb.njit(cache=True, nogil=True)
def _sqdist(x, i, j):
    s = 0.0
    for k in range(x.shape[1]):
        t = x[i, k] - x[j, k]
        s += t * t
    return s


@nb.njit(cache=True, nogil=True)
def _pruned_diameter_kernel(x, norms, order, slack):
    n = order.shape[0]
    best = -1.0
    bi = -1
    bj = -1
    comps = 0
    for a in range(n):
        i = order[a]
        ni = norms[i]
        if best >= 0.0 and 4.0 * ni * ni * slack < best:
            break
        for b in range(a + 1, n):
            j = order[b]
            s = ni + norms[j]
            if best >= 0.0 and s * s * slack < best:
                break
            dsq = _sqdist(x, i, j)
            comps += 1
            p = min(i, j)
            q = max(i, j)
            if dsq > best or (dsq == best and (p < bi or (p == bi and q < bj))):
                best = dsq
                bi = p
                bj = q
    return best, bi, bj, comps


@nb.njit(cache=True, nogil=True)
def _pruned_count_kernel(x, norms, order, threshold, cap, use_cap, slack):
    n = order.shape[0]
    w = 0
    wp = 0
    prune = threshold >= 0.0
    thr_sq = threshold * threshold
    for a in range(n):
        i = order[a]
        ni = norms[i]
        if prune and 4.0 * ni * ni * slack < thr_sq:
            break
        for b in range(a + 1, n):
            j = order[b]
            s = ni + norms[j]
            if prune and s * s * slack < thr_sq:
                break
            if np.sqrt(_sqdist(x, i, j)) > threshold:
                w += 1
                if not use_cap or (ni <= cap and norms[j] <= cap):
                    wp += 1
    return w, wp


def diameter_naive(points) -> DiameterResult:
    """Maximum over all ``n(n-1)/2`` pairs; the reference implementation."""
    cloud = _as_cloud(points)
    x = cloud.coordinates
    n, d = x.shape
    if n < 2:
        raise PreconditionError("diameter needs at least two points", "too-few-points")
    best, bi, bj = -1.0, -1, -1
    for i in range(n - 1):
        acc = np.zeros(n - i - 1)
        for k in range(d):
            t = x[i, k] - x[i + 1 :, k]
            acc += t * t
        j = int(np.argmax(acc))  # first maximizer = smallest j
        if acc[j] > best:
            best, bi, bj = float(acc[j]), i, i + 1 + j
    return DiameterResult(float(np.sqrt(best)), (bi, bj), n * (n - 1) // 2)


def diameter_pruned(points) -> DiameterResult:
    """Exact diameter by norm-ordered search with triangle-bound pruning.

    Worst case (all norms equal) is still every pair; typical light- or
    heavy-tailed samples need a vanishing fraction of them.
    """
    cloud = _as_cloud(points)
    if cloud.n < 2:
        raise PreconditionError("diameter needs at least two points", "too-few-points")
    order = _descending_order(cloud.norms)
    best, bi, bj, comps = _pruned_diameter_kernel(
        cloud.coordinates, cloud.norms, order, 1.0 + _PRUNE_SLACK
    )
    return DiameterResult(float(np.sqrt(best)), (int(bi), int(bj)), int(comps))


def max_norm(points):
    """``(value, index)`` of the largest norm, smallest index on ties."""
    cloud = _as_cloud(points)
    if cloud.n < 1:
        raise PreconditionError("max_norm needs a nonempty point cloud", "empty-sample")
    k = int(np.argmax(cloud.norms))
    return float(cloud.norms[k]), k


def count_pairs(points, threshold: float, cap: float = None) -> PairCounts:
    """Count pairs farther apart than ``threshold``.

    ``w_prime_n`` additionally requires both norms to be at most ``cap``.
    """
    cloud = _as_cloud(points)
    if cloud.n < 2:
        raise PreconditionError("count_pairs needs at least two points", "too-few-points")
    order = _descending_order(cloud.norms)
    use_cap = cap is not None
    w, wp = _pruned_count_kernel(
        cloud.coordinates,
        cloud.norms,
        order,
        float(threshold),
        float(cap) if use_cap else 0.0,
        use_cap,
        1.0 + _PRUNE_SLACK,
    )
    return PairCounts(int(w), int(wp), float(threshold), cap)


def count_pairs_naive(points, threshold: float, cap: float = None) -> PairCounts:
    """All-pairs version of :func:`count_pairs`, for checking."""
    cloud = _as_cloud(points)
    x, norms = cloud.coordinates, cloud.norms
    n, d = x.shape
    if n < 2:
        raise PreconditionError("count_pairs needs at least two points", "too-few-points")
    w = wp = 0
    for i in range(n - 1):
        acc = np.zeros(n - i - 1)
        for k in range(d):
            t = x[i, k] - x[i + 1 :, k]
            acc += t * t
        hit = np.sqrt(acc) > threshold
        w += int(hit.sum())
        if cap is None:
            wp += int(hit.sum())
        elif norms[i] <= cap:
            wp += int((hit & (norms[i + 1 :] <= cap)).sum())
    return PairCounts(w, wp, float(threshold), cap)


def pair_angle(points, i: int, j: int) -> float:
    """Angle in ``[0, pi]`` between points ``i`` and ``j`` seen from the origin."""
    cloud = _as_cloud(points)
    ni, nj = cloud.norms[i], cloud.norms[j]
    if ni == 0 or nj == 0:
        raise PreconditionError("angle is undefined for a zero vector", "undefined-angle")
    c = float(np.dot(cloud.coordinates[i], cloud.coordinates[j]) / (ni * nj))
    return float(np.arccos(min(1.0, max(-1.0, c))))
