"""Logistic-map driven variation.

A state matrix ``Z`` (one entry per individual and dimension) is iterated by
the logistic map ``z <- mu * z * (1 - z)``. Each entry yields a signed factor
``s = 2z - 1`` that scales a multiplicative step ``x * (1 + eta * s)``; the
step size ``eta`` decays geometrically once per call to :func:`perturb`.
"""

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ContractViolation

__all__ = [
    "ChaoticState",
    "init_state",
    "chaos_step",
    "perturb",
    "bifurcation_scan",
    "DEGENERATE_SEEDS",
]

# Preperiodic / fixed points of the mu = 4 map; seeds here collapse the orbit.
DEGENERATE_SEEDS = (0.0, 0.25, 0.5, 0.75, 1.0)
_SEED_GAP = 1e-6
_DEAD_ZONE = 1e-12
_KICK = 0.01


@dataclass(frozen=True, eq=False)
class ChaoticState:
    """Logistic-map state plus the step-size schedule.

    Attributes
    ----------
    Z : ndarray, shape (N, D)
        Map state, entries in [0, 1].
    mu : float
        Map parameter in (0, 4].
    eta : float
        Current multiplicative step size.
    alpha : float
        Per-call decay factor of ``eta``, in (0, 1).
    cr : float
        Probability that a non-pivot coordinate is perturbed.
    """

    Z: np.ndarray
    mu: float = 4.0
    eta: float = 0.5
    alpha: float = 0.99
    cr: float = 0.9


def _is_degenerate(z):
    return np.any(np.abs(z[..., None] - np.asarray(DEGENERATE_SEEDS)) < _SEED_GAP, axis=-1)


def _draw_seeds(rng, shape):
    z = rng.uniform(0.05, 0.95, size=shape)
    bad = _is_degenerate(z)
    while np.any(bad):
        z[bad] = rng.uniform(0.05, 0.95, size=int(bad.sum()))
        bad = _is_degenerate(z)
    return z


def init_state(n, dim, rng, mu=4.0, eta=0.5, alpha=0.99, cr=0.9):
    """Fresh state with ``Z`` drawn on (0.05, 0.95), away from degenerate seeds."""
    if not 0.0 < mu <= 4.0:
        raise ContractViolation(f"mu must lie in (0, 4], got {mu}")
    if not 0.0 < alpha < 1.0:
        raise ContractViolation(f"alpha must lie in (0, 1), got {alpha}")
    if eta < 0.0:
        raise ContractViolation(f"eta must be non-negative, got {eta}")
    if not 0.0 <= cr <= 1.0:
        raise ContractViolation(f"cr must lie in [0, 1], got {cr}")
    return ChaoticState(_draw_seeds(rng, (n, dim)), mu, eta, alpha, cr)


def chaos_step(state):
    """Advance every entry of ``Z`` once by the logistic map."""
    Z = state.Z
    return replace(state, Z=state.mu * Z * (1.0 - Z))


def perturb(population, state, lower, upper, rng):
    """Generate one chaotic candidate per individual.

    The state is advanced once, then for each individual a pivot dimension is
    drawn; every coordinate with ``rand() < cr`` plus the pivot is moved to
    ``clip(x * (1 + eta * s), lower, upper)``. Coordinates sitting at zero
    (relative to the box width) receive an additive kick instead, since the
    multiplicative step cannot move them.

    Parameters
    ----------
    population : ndarray, shape (N, D)
    state : ChaoticState
        Its ``Z`` must have shape (N, D).
    lower, upper : array_like, shape (D,)
    rng : numpy.random.Generator
        Source of pivot and crossover draws.

    Returns
    -------
    candidates : ndarray, shape (N, D)
    state : ChaoticState
        Advanced map with ``eta`` multiplied by ``alpha``.
    """
    X = np.asarray(population, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ContractViolation("population must be a non-empty (N, D) array")
    if state.Z.shape != X.shape:
        raise ContractViolation(
            f"chaotic state has shape {state.Z.shape}, population has {X.shape}"
        )
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n, dim = X.shape

    state = chaos_step(state)
    s = 2.0 * state.Z - 1.0
    pivot = rng.integers(0, dim, size=n)
    mask = rng.random((n, dim)) < state.cr
    mask[np.arange(n), pivot] = True

    width = upper - lower
    step = X * (1.0 + state.eta * s)
    dead = np.abs(X) < _DEAD_ZONE * width
    step = np.where(dead, X + state.eta * s * _KICK * width, step)
    candidates = np.where(mask, np.clip(step, lower, upper), X)
    return candidates, replace(state, eta=state.alpha * state.eta)


def bifurcation_scan(mu_grid, transient_steps=1000, sample_steps=100, seed=0):
    """Sample the logistic-map attractor for each ``mu`` in ``mu_grid``.

    All orbits start from the same seed drawn from ``seed``. Returns an
    array of shape ``(len(mu_grid) * sample_steps, 2)`` with columns
    ``(mu, z)``.
    """
    mus = np.atleast_1d(np.asarray(mu_grid, dtype=float))
    if mus.size == 0:
        raise ContractViolation("mu_grid must not be empty")
    if np.any(mus <= 0.0) or np.any(mus > 4.0):
        raise ContractViolation("every mu must lie in (0, 4]; the map leaves [0, 1] above 4")
    if transient_steps < 1 or sample_steps < 1:
        raise ContractViolation("transient_steps and sample_steps must be >= 1")
    z0 = float(_draw_seeds(np.random.default_rng(seed), (1,))[0])
    z = np.full(mus.shape, z0)
    for _ in range(transient_steps):
        z = mus * z * (1.0 - z)
    samples = np.empty((sample_steps, mus.size))
    for t in range(sample_steps):
        z = mus * z * (1.0 - z)
        samples[t] = z
    return np.column_stack([np.repeat(mus, sample_steps), samples.T.ravel()])
