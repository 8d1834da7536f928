"""Multi-start local search used to derive optimum coordinates.

The coordinates shipped in ``data/`` were produced by :func:`write_fixtures`.
Each optimum is accepted only when the analytic gradient norm at the point is
below ``GRAD_TOL``; the test suite re-runs the derivation and compares.
"""

import itertools
from pathlib import Path

import numpy as np
from scipy import optimize

from . import functions as fn

GRAD_TOL = 1e-8
DATA_DIR = Path(__file__).parent / "data"


# Analytic gradients / Hessians of the *maximized* functions.

def _himmelblau_grad(p):
    a, b = p
    u, v = a * a + b - 11.0, a + b * b - 7.0
    return -np.array([4.0 * a * u + 2.0 * v, 2.0 * u + 4.0 * b * v])


def _himmelblau_hess(p):
    a, b = p
    u, v = a * a + b - 11.0, a + b * b - 7.0
    return -np.array([
        [4.0 * u + 8.0 * a * a + 2.0, 4.0 * a + 4.0 * b],
        [4.0 * a + 4.0 * b, 2.0 + 4.0 * v + 8.0 * b * b],
    ])


def _camel_grad(p):
    a, b = p
    da = 8.0 * a - 8.4 * a ** 3 + 2.0 * a ** 5 + b
    db = a + 16.0 * b ** 3 - 8.0 * b
    return -np.array([da, db])


def _camel_hess(p):
    a, b = p
    return -np.array([
        [8.0 - 25.2 * a * a + 10.0 * a ** 4, 1.0],
        [1.0, 48.0 * b * b - 8.0],
    ])


def _shubert_factor_prime(x):
    j = np.arange(1, 6, dtype=float)
    return -np.sum(j * (j + 1.0) * np.sin((j + 1.0) * x + j))


def _f3_prime(x):
    # derivative of log f3 (same critical points where f3 > 0)
    c = 2.0 * np.log(2.0) / 0.854 ** 2
    arg = 5.0 * np.pi * (x ** 0.75 - 0.05)
    return -2.0 * c * (x - 0.08) + 6.0 * 5.0 * np.pi * 0.75 * x ** -0.25 / np.tan(arg)


def _polish_2d(x0, grad, hess, lower, upper):
    res = optimize.root(grad, x0, jac=hess, method="hybr", options={"xtol": 1e-15})
    x = res.x
    if not res.success or np.any(x < lower) or np.any(x > upper):
        return None
    if np.any(np.linalg.eigvalsh(hess(x)) >= 0.0):  # must be a maximum
        return None
    if np.linalg.norm(grad(x)) >= GRAD_TOL:
        return None
    return x


def _multistart_2d(func, grad, hess, lower, upper, n_starts, seed):
    rng = np.random.default_rng(seed)
    lower, upper = np.asarray(lower, float), np.asarray(upper, float)
    found = []
    for x0 in rng.uniform(lower, upper, size=(n_starts, 2)):
        res = optimize.minimize(
            lambda p: -func(p), x0, jac=lambda p: -grad(p),
            method="L-BFGS-B", bounds=list(zip(lower, upper)),
        )
        x = _polish_2d(res.x, grad, hess, lower, upper)
        if x is None:
            continue
        if all(np.linalg.norm(x - y) > 1e-6 for y in found):
            found.append(x)
    values = np.array([func(x) for x in found])
    best = values.max()
    keep = [x for x, v in zip(found, values) if v > best - 1e-9]
    return np.array(sorted(keep, key=tuple))


def _roots_1d(deriv, lo, hi, n_grid=20001):
    grid = np.linspace(lo, hi, n_grid)
    vals = np.array([deriv(t) for t in grid])
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if np.isfinite(fa) and np.isfinite(fb) and fa * fb < 0.0:
            roots.append(optimize.brentq(deriv, a, b, xtol=1e-16, rtol=1e-15))
    return np.array(roots)


def shubert_extrema(lower=-10.0, upper=10.0):
    """Global minimizers and maximizers of the 1-D Shubert factor on ``[lower, upper]``."""
    crit = _roots_1d(_shubert_factor_prime, lower, upper)
    vals = fn.shubert_factor(crit)
    mins = np.sort(crit[vals < vals.min() + 1e-9])
    maxs = np.sort(crit[vals > vals.max() - 1e-9])
    return mins, maxs


def derive_f3():
    crit = _roots_1d(_f3_prime, 1e-6, 1.0)
    vals = fn.uneven_decreasing_maxima(crit[:, None])
    return crit[[np.argmax(vals)]][:, None]


def derive_f4(n_starts=400, seed=0):
    return _multistart_2d(fn.himmelblau, _himmelblau_grad, _himmelblau_hess,
                          [-6.0, -6.0], [6.0, 6.0], n_starts, seed)


def derive_f5(n_starts=400, seed=0):
    return _multistart_2d(fn.six_hump_camel, _camel_grad, _camel_hess,
                          [-1.9, -1.1], [1.9, 1.1], n_starts, seed)


def derive_shubert(dim):
    """All global maxima of ``-prod g(x_i)``: one coordinate at a factor
    minimum and the rest at factor maxima (odd count of negative factors)."""
    mins, maxs = shubert_extrema()
    g_min, g_max = fn.shubert_factor(mins[0]), fn.shubert_factor(maxs[0])
    _, n_min = max(
        (-(g_min ** n) * g_max ** (dim - n), n) for n in range(1, dim + 1, 2)
    )
    optima = []
    for which in itertools.combinations(range(dim), n_min):
        pools = [mins if d in which else maxs for d in range(dim)]
        optima.extend(itertools.product(*pools))
    return np.array(sorted(optima))


def gradient_norm(problem_id, x):
    """Analytic gradient norm at ``x`` for the fixture-backed problems."""
    x = np.asarray(x, dtype=float)
    if problem_id == "f3":
        return abs(_f3_prime(x[0]))
    if problem_id == "f4":
        return np.linalg.norm(_himmelblau_grad(x))
    if problem_id == "f5":
        return np.linalg.norm(_camel_grad(x))
    if problem_id in ("f6", "f8"):
        g = fn.shubert_factor(x)
        dg = np.array([_shubert_factor_prime(t) for t in x])
        parts = [-dg[i] * np.prod(np.delete(g, i)) for i in range(x.size)]
        return np.linalg.norm(parts)
    raise KeyError(problem_id)


DERIVERS = {
    "f3": derive_f3,
    "f4": derive_f4,
    "f5": derive_f5,
    "f6": lambda: derive_shubert(2),
    "f8": lambda: derive_shubert(3),
}


def fixture_path(key):
    return DATA_DIR / f"optima_{key}.txt"


def write_fixtures():
    header = ("derived global maxima; one optimum per row, columns are "
              "decision coordinates x1..xD; generated by clde.benchmarks.derive")
    for key, derive in DERIVERS.items():
        np.savetxt(fixture_path(key), derive(), fmt="%.17g", header=header)


def load_fixture(key):
    return np.atleast_2d(np.loadtxt(fixture_path(key), ndmin=2))


if __name__ == "__main__":
    write_fixtures()
