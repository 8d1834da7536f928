"""Peak ratio, IGD / IGDx and population diversity."""

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .exceptions import ContractViolation

__all__ = [
    "count_found_peaks",
    "peak_ratio",
    "igd",
    "igdx",
    "median_pairwise_distance",
]


def _as_2d(points, name):
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ContractViolation(f"{name} must be a non-empty set of vectors")
    return arr


def count_found_peaks(solutions, optima, epsilon=1e-4):
    """Number of optima matched one-to-one by solutions within ``epsilon``.

    Candidate pairs closer than ``epsilon`` are matched greedily in ascending
    distance order (ties by optimum index, then solution index), so no
    solution can be credited for two optima. Duplicate solutions count once.
    """
    if epsilon <= 0:
        raise ContractViolation(f"epsilon must be positive, got {epsilon}")
    opt = _as_2d(optima, "optima")
    sol = np.asarray(solutions, dtype=float)
    if sol.size == 0:
        return 0
    sol = np.unique(sol.reshape(-1, opt.shape[1]), axis=0)
    dist = cdist(opt, sol)
    oi, si = np.nonzero(dist <= epsilon)
    order = np.lexsort((si, oi, dist[oi, si]))
    used_opt, used_sol = set(), set()
    for o, s in zip(oi[order], si[order]):
        if o in used_opt or s in used_sol:
            continue
        used_opt.add(o)
        used_sol.add(s)
    return len(used_opt)


def peak_ratio(solution_sets, optima, epsilon=1e-4):
    """Found optima summed over runs, divided by ``len(optima) * n_runs``."""
    if epsilon <= 0:
        raise ContractViolation(f"epsilon must be positive, got {epsilon}")
    opt = _as_2d(optima, "optima")
    runs = list(solution_sets)
    if not runs:
        raise ContractViolation("peak_ratio needs at least one run")
    found = sum(count_found_peaks(run, opt, epsilon) for run in runs)
    return found / (opt.shape[0] * len(runs))


def igd(approx, reference):
    """Mean distance from each reference point to its nearest approximation point."""
    A = _as_2d(approx, "approximation set")
    R = _as_2d(reference, "reference set")
    if A.shape[1] != R.shape[1]:
        raise ContractViolation("approximation and reference sets differ in dimension")
    return float(cdist(R, A).min(axis=1).mean())


def igdx(approx_x, reference_set):
    """IGD computed in decision space against a reference Pareto set."""
    return igd(approx_x, reference_set)


def median_pairwise_distance(points):
    """Median of all pairwise Euclidean distances."""
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] < 2:
        raise ContractViolation("median_pairwise_distance needs at least two points")
    return float(np.median(pdist(P)))
