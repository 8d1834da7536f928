"""Benchmark problems with ground truth for scoring.

Problems are addressed by string id through :func:`get_problem`. The niching
functions F1-F10 are registered under descriptive ids (``f2_equal_maxima``)
and short aliases (``f2``); DTLZ instances follow ``dtlz{1,2}_d{dim}_m{n_obj}``.
"""

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..exceptions import ContractViolation, NoGroundTruth, UnknownProblem
from . import functions as fn
from .derive import load_fixture

__all__ = [
    "Problem",
    "evaluate",
    "evaluate_batch",
    "known_optima",
    "get_problem",
    "list_problems",
    "two_basin_biobjective",
    "dtlz_problem",
    "simplex_lattice",
]


@dataclass(frozen=True, eq=False)
class Problem:
    """An optimization problem with optional ground truth.

    ``func`` maps an ``(n, dim)`` array to raw values of shape ``(n,)``
    (single objective) or ``(n, n_obj)``. ``sense`` is the classical sense of
    the raw value; the engine converts to minimization via :attr:`sign`.
    """

    id: str
    dim: int
    n_obj: int
    lower: np.ndarray
    upper: np.ndarray
    func: Callable = field(repr=False)
    sense: str = "minimize"
    known_optima: Optional[np.ndarray] = field(default=None, repr=False)
    peak_height: Optional[float] = None
    table_peak_height: Optional[float] = None
    pareto_front_ref: Optional[np.ndarray] = field(default=None, repr=False)
    pareto_set_ref: Optional[np.ndarray] = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != (self.dim,) or upper.shape != (self.dim,):
            raise ContractViolation(f"{self.id}: bounds must have length {self.dim}")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper)) and np.all(lower < upper)):
            raise ContractViolation(f"{self.id}: bounds must be finite with lower < upper")
        if self.sense not in ("minimize", "maximize"):
            raise ContractViolation(f"{self.id}: unknown sense {self.sense!r}")
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        for name in ("known_optima", "pareto_front_ref", "pareto_set_ref"):
            ref = getattr(self, name)
            if ref is None:
                continue
            ref = np.array(ref, dtype=float, ndmin=2)
            if ref.shape[0] == 0:
                raise ContractViolation(f"{self.id}: {name} must be non-empty")
            ref.setflags(write=False)
            object.__setattr__(self, name, ref)

    @property
    def sign(self):
        """Multiplier turning raw values into minimization values."""
        return -1.0 if self.sense == "maximize" else 1.0

    @property
    def is_multiobjective(self):
        return self.n_obj > 1


def _check_inputs(problem, X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != problem.dim:
        raise ContractViolation(
            f"{problem.id}: expected decision vectors of length {problem.dim}, got shape {X.shape}"
        )
    if not np.all(np.isfinite(X)):
        raise ContractViolation(f"{problem.id}: non-finite decision vector")
    if np.any(X < problem.lower) or np.any(X > problem.upper):
        raise ContractViolation(f"{problem.id}: decision vector outside bounds")
    return X


def evaluate_batch(problem, X):
    """Evaluate every row of ``X``; returns raw values of shape ``(n, n_obj)``."""
    X = _check_inputs(problem, X)
    out = np.asarray(problem.func(X), dtype=float)
    return out.reshape(X.shape[0], problem.n_obj)


def evaluate(problem, x):
    """Raw objective vector (length ``n_obj``) of one decision vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractViolation(f"{problem.id}: expected a 1-D decision vector")
    return evaluate_batch(problem, x[None, :])[0]


def known_optima(problem):
    """Known global optima of a single-objective problem, one per row."""
    if problem.known_optima is None:
        raise NoGroundTruth(f"{problem.id}: no ground truth optima available")
    return problem.known_optima


def simplex_lattice(n_obj, divisions):
    """Das-Dennis points on the unit simplex (rows sum to one)."""
    points = []
    for bars in itertools.combinations(range(divisions + n_obj - 1), n_obj - 1):
        parts = np.diff((-1,) + bars + (divisions + n_obj - 1,)) - 1
        points.append(parts / divisions)
    return np.array(points, dtype=float)


def _cartesian(*axes):
    return np.array(list(itertools.product(*axes)), dtype=float)


def _vincent_optima(dim):
    m = np.arange(-2, 4)
    roots = np.exp((np.pi / 2.0 + 2.0 * np.pi * m) / 10.0)
    return _cartesian(*[roots] * dim)


def _niching_problems():
    probs = [
        Problem("f1_five_uneven_peak_trap", 1, 1, [0.0], [30.0], fn.five_uneven_peak_trap,
                "maximize", [[0.0], [30.0]], 200.0, 200.0, name="Five-Uneven-Peak Trap"),
        Problem("f2_equal_maxima", 1, 1, [0.0], [1.0], fn.equal_maxima, "maximize",
                [[0.1], [0.3], [0.5], [0.7], [0.9]], 1.0, 1.0, name="Equal Maxima"),
        Problem("f3_uneven_decreasing_maxima", 1, 1, [0.0], [1.0], fn.uneven_decreasing_maxima,
                "maximize", load_fixture("f3"), 0.9999998284544727, 1.0,
                name="Uneven Decreasing Maxima"),
        Problem("f4_himmelblau", 2, 1, [-6.0, -6.0], [6.0, 6.0], fn.himmelblau, "maximize",
                load_fixture("f4"), 200.0, 200.0, name="Himmelblau"),
        Problem("f5_six_hump_camel", 2, 1, [-1.9, -1.1], [1.9, 1.1], fn.six_hump_camel,
                "maximize", load_fixture("f5"), 1.031628453489877, 1.032,
                name="Six-Hump Camel Back"),
        Problem("f6_shubert_2d", 2, 1, [-10.0] * 2, [10.0] * 2, fn.shubert, "maximize",
                load_fixture("f6"), 186.7309088310239, 186.731, name="Shubert 2D"),
        Problem("f7_vincent_2d", 2, 1, [0.25] * 2, [10.0] * 2, fn.vincent, "maximize",
                _vincent_optima(2), 1.0, 1.0, name="Vincent 2D"),
        Problem("f8_shubert_3d", 3, 1, [-10.0] * 3, [10.0] * 3, fn.shubert, "maximize",
                load_fixture("f8"), 2709.093505572820, 2709.094, name="Shubert 3D"),
        Problem("f9_vincent_3d", 3, 1, [0.25] * 3, [10.0] * 3, fn.vincent, "maximize",
                _vincent_optima(3), 1.0, 1.0, name="Vincent 3D"),
        Problem("f10_modified_rastrigin", 2, 1, [0.0, 0.0], [1.0, 1.0], fn.modified_rastrigin,
                "maximize", _cartesian([1 / 6, 1 / 2, 5 / 6], [1 / 8, 3 / 8, 5 / 8, 7 / 8]),
                -2.0, -2.0, name="Modified Rastrigin"),
    ]
    return probs


def dtlz_problem(which, dim, n_obj, divisions=None):
    """DTLZ1 or DTLZ2 with ``dim`` variables and ``n_obj`` objectives."""
    if which not in (1, 2):
        raise UnknownProblem(f"dtlz{which} is not provided (only DTLZ1 and DTLZ2)")
    if n_obj < 2 or dim < n_obj:
        raise ContractViolation("DTLZ requires n_obj >= 2 and dim >= n_obj")
    if divisions is None:
        divisions = 20 if n_obj <= 3 else 8
    lattice = simplex_lattice(n_obj, divisions)
    if which == 1:
        front = 0.5 * lattice
        func = lambda X: fn.dtlz1(X, n_obj)  # noqa: E731
    else:
        front = lattice / np.linalg.norm(lattice, axis=1, keepdims=True)
        func = lambda X: fn.dtlz2(X, n_obj)  # noqa: E731
    grid = np.linspace(0.0, 1.0, 21 if n_obj <= 3 else 6)
    positions = _cartesian(*[grid] * (n_obj - 1))
    pset = np.hstack([positions, np.full((positions.shape[0], dim - n_obj + 1), 0.5)])
    return Problem(f"dtlz{which}_d{dim}_m{n_obj}", dim, n_obj, np.zeros(dim), np.ones(dim),
                   func, "minimize", pareto_front_ref=front, pareto_set_ref=pset,
                   name=f"DTLZ{which}")


def two_basin_biobjective(points_per_segment=101):
    """Bi-objective problem whose Pareto set is two disjoint segments.

    Both segments (``x1 = -0.25`` and ``x1 = 0.25``, ``x2`` in ``[0, 1]``) map
    onto the same linear front ``f1 + f2 = 1``; they are 0.5 apart in decision
    space. The left segment lies in a narrow V-shaped valley of the distance
    term, the right one in a wide quadratic bowl.
    """
    t = np.linspace(0.0, 1.0, points_per_segment)
    left, right = fn.TWO_BASIN_CENTERS
    pset = np.vstack([
        np.column_stack([np.full_like(t, left), t]),
        np.column_stack([np.full_like(t, right), t]),
    ])
    front = np.column_stack([t, 1.0 - t])
    return Problem("two_basin", 2, 2, [-1.0, 0.0], [1.0, 1.0], fn.two_basin, "minimize",
                   pareto_front_ref=front, pareto_set_ref=pset, name="Two-basin bi-objective")


_ALIASES = {}
_REGISTRY = {}


def _register(problem, *aliases):
    _REGISTRY[problem.id] = problem
    for alias in aliases:
        _ALIASES[alias] = problem.id


for _p in _niching_problems():
    _register(_p, _p.id.split("_")[0])
_register(two_basin_biobjective())
_register(dtlz_problem(1, 7, 3))
_register(dtlz_problem(2, 12, 3))

_DTLZ_ID = re.compile(r"^dtlz(\d+)_d(\d+)_m(\d+)$")


def get_problem(problem_id):
    """Look up a problem by id or alias; DTLZ ids are built on demand."""
    key = _ALIASES.get(problem_id, problem_id)
    if key in _REGISTRY:
        return _REGISTRY[key]
    match = _DTLZ_ID.match(key)
    if match:
        which, dim, n_obj = (int(g) for g in match.groups())
        problem = dtlz_problem(which, dim, n_obj)
        _REGISTRY[key] = problem
        return problem
    raise UnknownProblem(f"unknown problem id {problem_id!r}")


def list_problems():
    return sorted(_REGISTRY, key=lambda k: (not k.startswith("f"), len(k.split("_")[0]), k))

