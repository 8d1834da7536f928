"""Pareto dominance, nondominated sorting, crowding distance and survival (minimization)."""

import numpy as np

from .exceptions import ContractViolation

__all__ = [
    "dominates",
    "dominance_matrix",
    "fast_nondominated_sort",
    "fronts_from_ranks",
    "crowding_distance",
    "select_n",
]


def dominates(a, b):
    """True iff ``a`` is no worse than ``b`` everywhere and better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ContractViolation(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def dominance_matrix(F):
    """``D[i, j]`` is True when row ``i`` dominates row ``j``."""
    F = np.asarray(F, dtype=float)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def fast_nondominated_sort(objectives):
    """Front index of every row (1 = nondominated), by iterative front peeling.

    Uses the domination counts / dominated-sets bookkeeping of the classic
    fast nondominated sort, with the pairwise comparisons vectorized.
    """
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2 or F.shape[0] == 0:
        raise ContractViolation("fast_nondominated_sort needs a non-empty (n, m) array")
    dom = dominance_matrix(F)
    count = dom.sum(axis=0)
    ranks = np.zeros(F.shape[0], dtype=int)
    current = np.flatnonzero(count == 0)
    r = 1
    while current.size:
        ranks[current] = r
        count = count - dom[current].sum(axis=0)
        count[ranks > 0] = -1
        current = np.flatnonzero(count == 0)
        r += 1
    return ranks


def fronts_from_ranks(ranks):
    ranks = np.asarray(ranks)
    return [np.flatnonzero(ranks == r) for r in range(1, ranks.max() + 1)]


def crowding_distance(objectives, front):
    """Crowding distance of the members listed in ``front``.

    Per objective, members are swept in sorted order (ties by position in
    ``front``); the two extremes are flagged maximal and every interior
    member adds ``(next - prev) / range``. Fronts of size two or less are
    entirely maximal.

    Returns
    -------
    distance : ndarray
        Finite sum of normalized gaps (0 for members only ever at an extreme).
    maximal : ndarray of bool
        Boundary flag standing in for an infinite distance.
    """
    F = np.asarray(objectives, dtype=float)
    front = np.asarray(front, dtype=int)
    if front.size == 0:
        raise ContractViolation("crowding_distance needs a non-empty front")
    sub = F[front]
    size, n_obj = sub.shape
    distance = np.zeros(size)
    maximal = np.zeros(size, dtype=bool)
    if size <= 2:
        maximal[:] = True
        return distance, maximal
    for m in range(n_obj):
        order = np.argsort(sub[:, m], kind="stable")
        vals = sub[order, m]
        maximal[order[0]] = maximal[order[-1]] = True
        span = vals[-1] - vals[0]
        if span > 0.0:
            distance[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return distance, maximal


def select_n(objectives, n):
    """Indices of ``n`` survivors by rank, then crowding within the split front.

    Whole fronts are admitted in rank order; the front that overflows is
    truncated by maximal flag, then descending crowding distance, then lower
    index. The result is sorted ascending.
    """
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2:
        raise ContractViolation("select_n needs an (n, m) objective array")
    if n > F.shape[0]:
        raise ContractViolation(f"cannot select {n} survivors from {F.shape[0]} members")
    if n <= 0:
        return np.array([], dtype=int)
    ranks = fast_nondominated_sort(F)
    chosen = []
    for front in fronts_from_ranks(ranks):
        room = n - len(chosen)
        if front.size <= room:
            chosen.extend(front.tolist())
        else:
            dist, maximal = crowding_distance(F, front)
            order = np.lexsort((front, -dist, ~maximal))
            chosen.extend(front[order[:room]].tolist())
        if len(chosen) == n:
            break
    return np.sort(np.asarray(chosen, dtype=int))
