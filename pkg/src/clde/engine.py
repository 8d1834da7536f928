"""The decode-value-allocate-refine evolutionary loop.

Each generation:

1. every population slot produces one candidate, either by the chaotic
   multiplicative perturbation or, for slots flagged for refinement, by a
   Gaussian sample around the parent;
2. parents and candidates form the decoding canvas (2N points);
3. a kNN graph over the canvas is decoded into basins, and ``tau`` is
   adapted from the basin count;
4. basins are scored and receive integer quotas summing to N;
5. survivors are chosen basin by basin (greedy elitism for one objective,
   local nondominated sorting for several) and per-basin archives absorb
   each basin's best members.

Internally everything is minimized; maximization problems are negated when
evaluated and converted back in :class:`RunResult`.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import chaos
from .benchmarks import evaluate_batch, get_problem
from .config import RunConfig
from .decode import (PersistenceController, adapt_tau, decode_basins, default_k_target,
                     rank_crowding_height, single_basin)
from .exceptions import ContractViolation
from .graph import knn_graph, normalize_heights, rank_heights
from .metrics import igd, igdx, median_pairwise_distance, peak_ratio
from .mo_select import fast_nondominated_sort, select_n
from .saliency import allocate_quotas, basin_stats, saliency

__all__ = [
    "run",
    "RunResult",
    "TraceRow",
    "CanvasSnapshot",
    "BasinArchive",
    "ArchiveSet",
    "SOSelection",
    "basin_update_so",
    "basin_update_mo",
    "local_refine",
    "score_result",
]

log = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-8
# Per-slot refinement step, adapted by the one-fifth success rule.
SIGMA_EXPAND = 1.5
SIGMA_SHRINK = SIGMA_EXPAND ** -0.25
SIGMA_FLOOR = 1e-12


def local_refine(representative, sigma, lower, upper, rng):
    """Gaussian sample around ``representative`` with per-dimension standard
    deviation ``sigma * (upper - lower)``, clipped to the box."""
    x = np.asarray(representative, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(x < lower) or np.any(x > upper):
        raise ContractViolation("representative lies outside the bounds")
    if sigma == 0:
        return x.copy()
    step = rng.normal(0.0, 1.0, size=x.shape) * sigma * (upper - lower)
    return np.clip(x + step, lower, upper)


class BasinArchive:
    """Capped store of distinct good points found in one basin.

    Single-objective archives keep the ``capacity`` best entries sorted by
    fitness. Multi-objective archives keep a mutually nondominated set and,
    when over capacity, drop the entry closest to another entry in decision
    space. Points within ``DUPLICATE_TOL`` of an entry are never added twice.
    """

    def __init__(self, capacity, multiobjective=False, anchor=None, generation=0):
        self.capacity = capacity
        self.multiobjective = multiobjective
        self.x = []
        self.f = []
        self.anchor = None if anchor is None else np.array(anchor, dtype=float)
        self.last_update = generation

    def __len__(self):
        return len(self.x)

    def _near(self, x):
        if not self.x:
            return None
        hits = np.flatnonzero(np.linalg.norm(np.asarray(self.x) - x, axis=1) <= DUPLICATE_TOL)
        return int(hits[0]) if hits.size else None

    def offer(self, x, f):
        """Try to add ``(x, f)``; returns True when the archive changed."""
        x = np.array(x, dtype=float)
        f = np.array(f, dtype=float).reshape(-1)
        dup = self._near(x)
        if self.multiobjective:
            return self._offer_mo(x, f, dup)
        if dup is not None:
            if f[0] < self.f[dup][0]:
                self.x[dup], self.f[dup] = x, f
                self._sort()
                return True
            return False
        if len(self.x) >= self.capacity and f[0] >= self.f[-1][0]:
            return False
        self.x.append(x)
        self.f.append(f)
        self._sort()
        del self.x[self.capacity:], self.f[self.capacity:]
        return True

    def _sort(self):
        order = sorted(range(len(self.f)), key=lambda i: self.f[i][0])
        self.x = [self.x[i] for i in order]
        self.f = [self.f[i] for i in order]

    def _offer_mo(self, x, f, dup):
        if dup is not None:
            return False
        if self.f:
            G = np.asarray(self.f)
            if np.any(np.all(G <= f, axis=1)):
                return False  # dominated by or equal to an entry
            beaten = np.all(f <= G, axis=1) & np.any(f < G, axis=1)
            keep = np.flatnonzero(~beaten).tolist()
        else:
            keep = []
        self.x = [self.x[i] for i in keep] + [x]
        self.f = [self.f[i] for i in keep] + [f]
        while len(self.x) > self.capacity:
            P = np.array(self.x)
            d = np.linalg.norm(P[:, None] - P[None], axis=2)
            np.fill_diagonal(d, np.inf)
            drop = int(np.argmin(d.min(axis=1)))
            del self.x[drop], self.f[drop]
        return True

    def best_f(self):
        return self.f[0][0] if self.f else math.inf


class ArchiveSet:
    """Archives that persist across generations while basins are re-decoded.

    A basin is matched to the archive whose anchor lies nearest to the
    basin's representative, provided that distance is below half the gap to
    the nearest other representative of the same generation; otherwise a new
    archive is opened. At most ``max_archives`` archives are kept: the ones
    with the worst best fitness (one objective) or the stalest (several
    objectives) are dropped first.
    """

    def __init__(self, capacity, max_archives, multiobjective=False):
        self.capacity = capacity
        self.max_archives = max_archives
        self.multiobjective = multiobjective
        self.archives = []

    def __iter__(self):
        return iter(self.archives)

    def __len__(self):
        return len(self.archives)

    def update(self, rep_x, offers, generation):
        """``rep_x[k]`` anchors basin ``k``; ``offers[k]`` is a list of ``(x, f)``."""
        rep_x = np.asarray(rep_x, dtype=float)
        n_basins = rep_x.shape[0]
        if n_basins > 1:
            gaps = np.linalg.norm(rep_x[:, None] - rep_x[None], axis=2)
            np.fill_diagonal(gaps, np.inf)
            radius = 0.5 * gaps.min(axis=1)
        else:
            radius = np.full(n_basins, np.inf)
        claimed = set()
        for k in range(n_basins):
            target = None
            if self.archives:
                anchors = np.array([a.anchor for a in self.archives])
                dist = np.linalg.norm(anchors - rep_x[k], axis=1)
                for j in np.argsort(dist, kind="stable"):
                    if dist[j] > radius[k]:
                        break
                    if int(j) not in claimed:
                        target = int(j)
                        break
            if target is None:
                self.archives.append(BasinArchive(self.capacity, self.multiobjective,
                                                  rep_x[k], generation))
                target = len(self.archives) - 1
            claimed.add(target)
            archive = self.archives[target]
            for x, f in offers[k]:
                archive.offer(x, f)
            archive.anchor = rep_x[k].copy()
            archive.last_update = generation
        self._trim()

    def _trim(self):
        excess = len(self.archives) - self.max_archives
        if excess <= 0:
            return
        idx = range(len(self.archives))
        if self.multiobjective:
            order = sorted(idx, key=lambda i: (self.archives[i].last_update, i))
        else:
            order = sorted(idx, key=lambda i: (-self.archives[i].best_f(), i))
        drop = set(order[:excess])
        self.archives = [a for i, a in enumerate(self.archives) if i not in drop]

    def points(self):
        xs = [x for a in self.archives for x in a.x]
        fs = [f for a in self.archives for f in a.f]
        return xs, fs


@dataclass
class SOSelection:
    """Outcome of the single-objective basin-wise update (canvas indices).

    ``survivors`` are kept as they are; ``elites`` (a subset of survivors, the
    best member of each funded basin) get a refinement candidate next
    generation; every entry of ``refine_anchors`` opens one extra slot, a copy
    of that basin's representative whose next candidate is a refinement
    sample.
    """

    survivors: list
    elites: list
    refine_anchors: list


def basin_update_so(fitness, decomp, quotas, refine_fraction=0.5):
    """Greedy elitism inside every funded basin.

    Members are ranked by fitness (ascending, ties by lower index) and the
    first ``Q_k`` survive; the best ``ceil(refine_fraction * Q_k)`` of them
    (at least one) are marked as elites. A basin with fewer members than its
    quota fills the gap with refinement slots anchored at its representative.
    """
    fitness = np.asarray(fitness, dtype=float)
    survivors, elites, anchors = [], [], []
    for k, members in enumerate(decomp.basin_members):
        q = int(quotas[k])
        if q <= 0:
            continue
        members = np.asarray(members, dtype=int)
        order = members[np.lexsort((members, fitness[members]))]
        take = order[:q].tolist()
        survivors.extend(take)
        elites.extend(take[:max(1, math.ceil(refine_fraction * len(take)))])
        anchors.extend([decomp.representatives[k]] * (q - len(take)))
    return SOSelection(survivors, elites, anchors)


def basin_update_mo(objectives, decomp, quotas):
    """Basin-wise buffering followed by global fill-up.

    Each funded basin contributes ``min(Q_k, |B_k|)`` members chosen by
    nondominated sorting and crowding among that basin's members. If basin
    shortfalls leave the buffer short of ``sum(Q)``, the deficit is filled
    by :func:`select_n` over the rest of the canvas.
    """
    F = np.asarray(objectives, dtype=float)
    target = int(np.sum(quotas))
    buffer = []
    for k, members in enumerate(decomp.basin_members):
        q = int(quotas[k])
        if q <= 0:
            continue
        members = np.asarray(members, dtype=int)
        q = min(q, members.size)
        local = select_n(F[members], q)
        buffer.extend(members[local].tolist())
    deficit = target - len(buffer)
    if deficit > 0:
        rest = np.setdiff1d(np.arange(F.shape[0]), buffer)
        buffer.extend(rest[select_n(F[rest], deficit)].tolist())
    return buffer


@dataclass
class TraceRow:
    generation: int
    evaluations: int
    K: int
    tau: float
    best_f: float = math.nan
    front_size: int = 0
    median_pairwise_distance: float = math.nan
    unfunded: int = 0


@dataclass
class CanvasSnapshot:
    generation: int
    x: np.ndarray
    heights: np.ndarray
    labels: np.ndarray
    representatives: list


@dataclass
class RunResult:
    """Everything a run produces. Objective values are raw (problem sense)."""

    config: RunConfig
    problem_id: str
    mode: str
    population_x: np.ndarray
    population_f: np.ndarray
    archives: list
    trace: list
    evaluations: int
    init_evaluations: int
    seed: int
    canvas_log: list = field(default_factory=list)

    def archive_points(self):
        xs = [x for a in self.archives for x in a[0]]
        fs = [f for a in self.archives for f in a[1]]
        dim = self.population_x.shape[1]
        n_obj = self.population_f.shape[1]
        return (np.array(xs, dtype=float).reshape(-1, dim),
                np.array(fs, dtype=float).reshape(-1, n_obj))

    def solution_set(self):
        """Archive entries followed by the final population (decision vectors)."""
        ax, _ = self.archive_points()
        return np.vstack([ax, self.population_x])

    def objective_set(self):
        _, af = self.archive_points()
        return np.vstack([af, self.population_f])


def score_result(result, problem=None, epsilon=1e-4):
    """Problem-appropriate scores of one run: ``pr`` and ``peaks_found`` for
    single-objective problems with known optima, ``igd`` / ``igdx`` when
    reference sets exist."""
    problem = problem or get_problem(result.problem_id)
    scores = {}
    if result.mode == "so":
        if problem.known_optima is not None:
            pr = peak_ratio([result.solution_set()], problem.known_optima, epsilon)
            scores["pr"] = pr
            scores["peaks_found"] = int(round(pr * problem.known_optima.shape[0]))
            scores["peaks_known"] = int(problem.known_optima.shape[0])
        scores["best_f"] = float(result.trace[-1].best_f)
    else:
        if problem.pareto_front_ref is not None:
            scores["igd"] = igd(result.objective_set(), problem.pareto_front_ref)
        if problem.pareto_set_ref is not None:
            scores["igdx"] = igdx(result.solution_set(), problem.pareto_set_ref)
    return scores


def _evaluate(problem, X):
    try:
        return problem.sign * evaluate_batch(problem, X)
    except ContractViolation as exc:
        raise RuntimeError(f"evaluation failed on {problem.id}: {exc}") from exc


def run(config, problem=None):
    """Execute one run; fully determined by ``config`` (including its seed)."""
    problem = problem or get_problem(config.problem)
    mode = config.mode or ("mo" if problem.is_multiobjective else "so")
    if mode == "so" and problem.is_multiobjective:
        raise ContractViolation(f"{problem.id} has {problem.n_obj} objectives; use mode 'mo'")
    multi = mode == "mo"
    rng = np.random.default_rng(config.seed)
    n, dim = config.population_size, problem.dim
    lower, upper = problem.lower, problem.upper

    X = rng.uniform(lower, upper, size=(n, dim))
    F = _evaluate(problem, X)
    sigma = np.full(n, config.local_sigma)
    refine = np.zeros(n, dtype=bool)
    height_fn = rank_heights if config.height_transform == "rank" else normalize_heights

    state = chaos.init_state(n, dim, rng, config.chaotic_mu, config.chaotic_step_init,
                             config.chaotic_step_decay, config.crossover_rate)
    k_target = config.k_target or default_k_target(n)
    ctrl = PersistenceController(config.persistence_tau_init, config.tau_min, config.tau_max,
                                 config.tau_gain, k_target)
    archives = ArchiveSet(config.archive_size, max_archives=n, multiobjective=multi)
    evaluations = 0
    trace, canvas_log = [], []

    for gen in range(1, config.max_generations + 1):
        cand, state = chaos.perturb(X, state, lower, upper, rng)
        slots = np.flatnonzero(refine)
        for i in slots:
            cand[i] = local_refine(X[i], sigma[i], lower, upper, rng)
        Fc = _evaluate(problem, cand)
        evaluations += n

        sigma_parent, sigma_child = sigma.copy(), sigma.copy()
        if slots.size:
            won = Fc[slots, 0] < F[slots, 0]
            shrunk = np.maximum(sigma[slots] * SIGMA_SHRINK, SIGMA_FLOOR)
            sigma_child[slots] = np.where(
                won, np.minimum(sigma[slots] * SIGMA_EXPAND, config.local_sigma), shrunk)
            sigma_parent[slots] = np.where(won, sigma[slots], shrunk)

        XS = np.vstack([X, cand])
        FS = np.vstack([F, Fc])
        SS = np.concatenate([sigma_parent, sigma_child])

        graph = knn_graph(XS, config.k_neighbors, config.graph_symmetrize)
        if multi:
            heights = normalize_heights(rank_crowding_height(FS, config.rankcrowd_kappa))
        else:
            heights = height_fn(-FS[:, 0])
        if config.decoding:
            decomp = decode_basins(graph, heights, ctrl.tau)
        else:
            decomp = single_basin(heights)
        tau_used = ctrl.tau
        if config.decoding:
            ctrl = adapt_tau(ctrl, decomp.K)

        sal = saliency(basin_stats(decomp, heights), config.saliency_beta)
        quotas = allocate_quotas(sal, n, config.quota_min)
        unfunded = int(np.sum(quotas == 0))
        if unfunded:
            log.info("generation %d: %d basins left unfunded (K=%d, N=%d, q_min=%d)",
                     gen, unfunded, decomp.K, n, config.quota_min)

        funded = [k for k in range(decomp.K) if quotas[k] > 0]
        rep_x = XS[[decomp.representatives[k] for k in funded]]
        if multi:
            keep = np.asarray(basin_update_mo(FS, decomp, quotas), dtype=int)
            X, F, sigma = XS[keep], FS[keep], SS[keep]
            refine = np.zeros(n, dtype=bool)
            offers = []
            for k in funded:
                members = np.asarray(decomp.basin_members[k])
                local_front = members[fast_nondominated_sort(FS[members]) == 1]
                offers.append([(XS[i], FS[i]) for i in local_front])
        else:
            sel = basin_update_so(FS[:, 0], decomp, quotas, config.refine_fraction)
            keep = np.asarray(sel.survivors + sel.refine_anchors, dtype=int)
            X, F, sigma = XS[keep], FS[keep], SS[keep]
            elite = set(sel.elites)
            refine = np.array([i in elite for i in sel.survivors]
                              + [True] * len(sel.refine_anchors), dtype=bool)
            offers = [[(XS[decomp.representatives[k]], FS[decomp.representatives[k]])]
                      for k in funded]
        archives.update(rep_x, offers, gen)

        row = TraceRow(gen, evaluations, decomp.K, tau_used,
                       median_pairwise_distance=median_pairwise_distance(X), unfunded=unfunded)
        if multi:
            row.front_size = int(np.sum(fast_nondominated_sort(F) == 1))
        else:
            row.best_f = float(problem.sign * F[:, 0].min())
        trace.append(row)
        if config.record_canvas:
            canvas_log.append(CanvasSnapshot(gen, XS.copy(), heights.copy(), decomp.labels.copy(),
                                             list(decomp.representatives)))

    archive_out = [
        (np.array(a.x).reshape(-1, dim), problem.sign * np.array(a.f).reshape(-1, problem.n_obj))
        for a in archives if len(a)
    ]
    return RunResult(
        config=config,
        problem_id=problem.id,
        mode=mode,
        population_x=X,
        population_f=problem.sign * F,
        archives=archive_out,
        trace=trace,
        evaluations=evaluations,
        init_evaluations=n,
        seed=config.seed,
        canvas_log=canvas_log,
    )
