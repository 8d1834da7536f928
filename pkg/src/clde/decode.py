"""Persistence-guided basin decoding on a neighbor graph.

Nodes are activated in descending height. A node with no active neighbor
founds a basin; otherwise it joins the basin of its highest active neighbor,
and any other basin touching it is merged in when the lower of the two peaks
is less than ``tau`` above the joining node.
"""

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import ContractViolation
from . import mo_select

__all__ = [
    "BasinDecomposition",
    "PersistenceController",
    "decode_basins",
    "single_basin",
    "adapt_tau",
    "default_k_target",
    "rank_crowding_height",
    "cc_oracle",
]

EPS = 1e-12


@dataclass(frozen=True, eq=False)
class BasinDecomposition:
    """Partition of graph nodes into basins.

    ``labels[i]`` is the basin id of node ``i`` (``-1`` for nodes left
    unprocessed by a ``level`` cut). Basin ids run ``0..K-1`` in the order
    their peaks were activated, so basin 0 holds the highest node.
    """

    labels: np.ndarray
    representatives: list
    basin_members: list = field(repr=False)

    @property
    def K(self):
        return len(self.representatives)

    def partition(self):
        """Basins as a set of frozensets (label-free, for comparisons)."""
        return {frozenset(m) for m in self.basin_members}


class _DisjointSet:
    """Union-find with path compression; each root tracks its peak node."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.peak = list(range(n))

    def find(self, i):
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def attach(self, i, root):
        self.parent[i] = root

    def merge_into(self, src, dst, peak):
        self.parent[src] = dst
        self.peak[dst] = peak


def _check(graph, heights):
    h = np.asarray(heights, dtype=float)
    if h.shape != (graph.n,):
        raise ContractViolation(f"expected {graph.n} heights, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ContractViolation("heights must be finite")
    return h


def _activation_order(h):
    # descending height, ties by ascending node index
    return np.lexsort((np.arange(h.size), -h))


def decode_basins(graph, heights, tau, level=None):
    """Decode basins by persistence-gated union-find.

    Parameters
    ----------
    graph : NeighborGraph
    heights : array_like, shape (n,)
        Normalized heights (larger is better).
    tau : float
        Merge threshold; ``math.inf`` disables gating entirely.
    level : float, optional
        Stop after activating every node with height ``>= level``. Nodes
        below the level are labelled ``-1``.

    Returns
    -------
    BasinDecomposition
    """
    h = _check(graph, heights)
    if tau < 0 or math.isnan(tau):
        raise ContractViolation(f"tau must be >= 0, got {tau}")
    order = _activation_order(h)
    rank = np.empty(h.size, dtype=int)
    rank[order] = np.arange(h.size)
    ds = _DisjointSet(graph.n)
    active = np.zeros(graph.n, dtype=bool)

    def higher(a, b):
        return a if rank[a] < rank[b] else b

    for i in order:
        i = int(i)
        if level is not None and h[i] < level:
            break
        nbrs = [j for j in graph.adjacency[i] if active[j]]
        if nbrs:
            g = min(nbrs, key=lambda j: rank[j])
            root_g = ds.find(g)
            ds.attach(i, root_g)
            for j in nbrs:
                root_e = ds.find(j)
                root_g = ds.find(root_g)
                if root_e == root_g:
                    continue
                peak_e, peak_g = ds.peak[root_e], ds.peak[root_g]
                if min(h[peak_e], h[peak_g]) < h[i] + tau:
                    ds.merge_into(root_e, root_g, higher(peak_e, peak_g))
        active[i] = True

    labels = np.full(graph.n, -1, dtype=int)
    root_label = {}
    reps, members = [], []
    for i in order:
        i = int(i)
        if not active[i]:
            continue
        root = ds.find(i)
        if root not in root_label:
            root_label[root] = len(reps)
            reps.append(ds.peak[root])
            members.append([])
        labels[i] = root_label[root]
        members[root_label[root]].append(i)
    members = [sorted(m) for m in members]
    return BasinDecomposition(labels=labels, representatives=reps, basin_members=members)


def single_basin(heights):
    """Trivial decomposition placing every node in one basin."""
    h = np.asarray(heights, dtype=float)
    rep = int(_activation_order(h)[0])
    return BasinDecomposition(
        labels=np.zeros(h.size, dtype=int),
        representatives=[rep],
        basin_members=[list(range(h.size))],
    )


def default_k_target(n):
    """Nearest integer to sqrt(n), clipped to [2, n/2]."""
    k = int(math.floor(math.sqrt(n) + 0.5))
    return max(2, min(k, n // 2))


@dataclass(frozen=True)
class PersistenceController:
    """Multiplicative feedback on ``tau`` driven by the decoded basin count."""

    tau: float = 0.10
    tau_min: float = 0.02
    tau_max: float = 0.30
    gamma: float = 0.20
    k_target: int = 10

    def __post_init__(self):
        if not 0.0 <= self.tau_min <= self.tau_max:
            raise ContractViolation("need 0 <= tau_min <= tau_max")
        if self.k_target < 1:
            raise ContractViolation("k_target must be >= 1")
        object.__setattr__(self, "tau", min(max(self.tau, self.tau_min), self.tau_max))


def adapt_tau(ctrl, k_observed):
    """``tau <- clip(tau * exp(gamma * (K - K_tar) / K_tar), tau_min, tau_max)``."""
    if k_observed < 1:
        raise ContractViolation(f"observed basin count must be >= 1, got {k_observed}")
    rel = (k_observed - ctrl.k_target) / ctrl.k_target
    tau = ctrl.tau * math.exp(ctrl.gamma * rel)
    return replace(ctrl, tau=min(max(tau, ctrl.tau_min), ctrl.tau_max))


def rank_crowding_height(objectives, kappa=1.0):
    """Scalar quality from nondominated rank and crowding distance.

    ``q_i = (R_max - r_i) / (R_max - 1 + eps) + kappa * cbar_i`` where
    ``cbar`` is the crowding distance min-max normalized over the whole set.
    Boundary members (maximal crowding) take the largest finite crowding
    value before normalization.
    """
    F = np.asarray(objectives, dtype=float)
    if F.ndim != 2 or F.shape[0] == 0:
        raise ContractViolation("rank_crowding_height needs a non-empty (n, m) array")
    ranks = mo_select.fast_nondominated_sort(F)
    crowd = np.zeros(F.shape[0])
    maximal = np.zeros(F.shape[0], dtype=bool)
    for r in range(1, ranks.max() + 1):
        front = np.flatnonzero(ranks == r)
        dist, is_max = mo_select.crowding_distance(F, front)
        crowd[front] = dist
        maximal[front] = is_max
    finite = crowd[~maximal]
    crowd[maximal] = finite.max() if finite.size else 1.0
    cbar = (crowd - crowd.min()) / (crowd.max() - crowd.min() + EPS)
    r_max = ranks.max()
    return (r_max - ranks) / (r_max - 1 + EPS) + kappa * cbar


def cc_oracle(graph, heights, level):
    """Connected components of the superlevel set ``{i : h_i >= level}`` by BFS.

    Returns a set of frozensets of node ids. Used only to cross-check
    :func:`decode_basins`.
    """
    h = np.asarray(heights, dtype=float)
    inside = h >= level
    seen = np.zeros(h.size, dtype=bool)
    comps = set()
    for s in range(h.size):
        if not inside[s] or seen[s]:
            continue
        comp, queue = [s], deque([s])
        seen[s] = True
        while queue:
            u = queue.popleft()
            for v in graph.adjacency[u]:
                if inside[v] and not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.add(frozenset(comp))
    return comps
