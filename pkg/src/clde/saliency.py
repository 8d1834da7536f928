"""Basin scoring and integer budget allocation."""

import numpy as np

from .exceptions import ContractViolation
from .graph import normalize_heights

__all__ = ["basin_stats", "saliency", "allocate_quotas"]

EPS = 1e-12


def basin_stats(decomp, heights):
    """Per-basin ``(depth, support)``.

    Depth is the representative's height minus the lowest member height;
    support is the member count.
    """
    h = np.asarray(heights, dtype=float)
    stats = []
    for rep, members in zip(decomp.representatives, decomp.basin_members):
        stats.append((float(h[rep] - h[members].min()), len(members)))
    return stats


def saliency(stats, beta=0.7):
    """``beta * depth_norm + (1 - beta) * support_norm`` with min-max normalization."""
    if len(stats) == 0:
        raise ContractViolation("saliency needs at least one basin")
    if not 0.0 <= beta <= 1.0:
        raise ContractViolation(f"beta must lie in [0, 1], got {beta}")
    arr = np.asarray(stats, dtype=float).reshape(-1, 2)
    depth = normalize_heights(arr[:, 0])
    support = normalize_heights(arr[:, 1])
    return beta * depth + (1.0 - beta) * support


def _real_quotas(sal, budget, q_min):
    k = sal.size
    return q_min + (budget - k * q_min) * sal / (sal.sum() + EPS)


def allocate_quotas(sal, budget, q_min=1):
    """Convert saliency scores into integer quotas summing to ``budget``.

    Real quotas ``q_min + (budget - K*q_min) * sal_k / (sum(sal) + eps)`` are
    floored (never below ``q_min``); the leftover slots go to the largest
    fractional parts, ties by larger saliency then lower basin id. When
    ``K * q_min > budget`` only the ``budget // q_min`` most salient basins
    are funded and the rest receive zero.
    """
    sal = np.asarray(sal, dtype=float)
    k = sal.size
    if k == 0:
        raise ContractViolation("allocate_quotas needs at least one basin")
    if q_min < 1:
        raise ContractViolation(f"q_min must be >= 1, got {q_min}")
    if budget < q_min:
        raise ContractViolation(f"budget {budget} is smaller than q_min {q_min}")
    if np.any(sal < 0) or not np.all(np.isfinite(sal)):
        raise ContractViolation("saliency scores must be finite and non-negative")

    ids = np.arange(k)
    funded = ids
    if k * q_min > budget:
        n_funded = budget // q_min
        funded = np.sort(np.lexsort((ids, -sal))[:n_funded])

    quotas = np.zeros(k, dtype=int)
    s = sal[funded]
    q_real = _real_quotas(s, budget, q_min)
    q = np.maximum(q_min, np.floor(q_real).astype(int))
    frac = q_real - np.floor(q_real)
    residual = budget - int(q.sum())
    local = np.arange(funded.size)
    if residual > 0:
        order = np.lexsort((local, -s, -frac))
        i = 0
        while residual > 0:
            q[order[i % order.size]] += 1
            residual -= 1
            i += 1
    elif residual < 0:
        order = np.lexsort((local, s, frac))
        while residual < 0:
            progressed = False
            for j in order:
                if residual == 0:
                    break
                if q[j] > q_min:
                    q[j] -= 1
                    residual += 1
                    progressed = True
            if not progressed:
                raise ContractViolation("cannot satisfy the quota floor within the budget")
    quotas[funded] = q
    return quotas
