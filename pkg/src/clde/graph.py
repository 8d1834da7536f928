"""Exact k-nearest-neighbor graphs and height normalization."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .exceptions import ContractViolation

__all__ = ["NeighborGraph", "knn_graph", "normalize_heights", "rank_heights", "pairwise_sq_distances"]


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Symmetric neighbor graph; ``adjacency[i]`` is the sorted tuple of neighbors of ``i``.

    ``distances`` holds the full matrix of squared Euclidean distances.
    """

    n: int
    k: int
    adjacency: tuple
    distances: np.ndarray = None

    def edges(self):
        """Undirected edges ``(i, j, distance)`` with ``i < j``."""
        out = []
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if i < j:
                    d = float("nan") if self.distances is None else float(np.sqrt(self.distances[i, j]))
                    out.append((i, j, d))
        return out

    def degree(self, i):
        return len(self.adjacency[i])


def pairwise_sq_distances(points):
    P = np.asarray(points, dtype=float)
    diff = P[:, None, :] - P[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def knn_graph(points, k=10, symmetrize="union"):
    """Brute-force kNN graph.

    Distance ties are broken by the lower node index; ``k`` is clipped to
    ``n - 1``. Duplicate points are allowed and connect at distance zero.

    Parameters
    ----------
    points : array_like, shape (n, d)
    k : int
    symmetrize : {"union", "mutual"}
        ``"union"`` keeps an edge when either endpoint lists the other.
        ``"mutual"`` keeps it only when both do, plus each node's single
        nearest neighbor so that no node is isolated. Mutual edges stop a
        sparse cluster from being wired straight into a dense cluster
        across an unsampled valley.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    n = P.shape[0]
    if n == 0:
        raise ContractViolation("knn_graph needs at least one point")
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    if symmetrize not in ("union", "mutual"):
        raise ContractViolation(f"unknown symmetrization {symmetrize!r}")
    k_eff = min(int(k), n - 1)
    d2 = pairwise_sq_distances(P)
    if k_eff == 0:
        return NeighborGraph(n=n, k=0, adjacency=((),), distances=d2)
    masked = d2.copy()
    np.fill_diagonal(masked, np.inf)
    order = np.argsort(masked, axis=1, kind="stable")[:, :k_eff]
    rows = np.arange(n)[:, None]
    listed = np.zeros((n, n), dtype=bool)
    listed[rows, order] = True
    if symmetrize == "union":
        adj = listed | listed.T
    else:
        adj = listed & listed.T
        adj[np.arange(n), order[:, 0]] = True
        adj |= adj.T
    adjacency = tuple(tuple(np.flatnonzero(adj[i]).tolist()) for i in range(n))
    return NeighborGraph(n=n, k=k_eff, adjacency=adjacency, distances=d2)


def rank_heights(values):
    """Average ranks of ``values`` mapped affinely onto [0, 1].

    Order-preserving like :func:`normalize_heights` but insensitive to the
    spread of the values, so a handful of extreme samples cannot squeeze
    the rest of the canvas into a sliver near the top.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ContractViolation("rank_heights needs at least one value")
    if not np.all(np.isfinite(v)):
        raise ContractViolation("rank_heights got non-finite values")
    return normalize_heights(rankdata(v, method="average"))


def normalize_heights(values):
    """Affine map onto [0, 1]; a constant input maps to 0.5 everywhere."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ContractViolation("normalize_heights needs at least one value")
    if not np.all(np.isfinite(v)):
        raise ContractViolation("normalize_heights got non-finite values")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.full(v.shape, 0.5)
    out = (v - lo) / (hi - lo)
    return np.clip(out, 0.0, 1.0)
