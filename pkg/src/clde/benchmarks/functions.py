"""Closed forms of the classical test functions.

Every function takes an array of shape ``(..., dim)`` and returns the raw
value(s) in the function's native sense: the niching functions F1-F10 are
maximized, DTLZ and the two-basin problem are minimized.
"""

import numpy as np

__all__ = [
    "five_uneven_peak_trap",
    "equal_maxima",
    "uneven_decreasing_maxima",
    "himmelblau",
    "six_hump_camel",
    "shubert",
    "shubert_factor",
    "vincent",
    "modified_rastrigin",
    "dtlz1",
    "dtlz2",
    "two_basin",
]


def five_uneven_peak_trap(x):
    x = x[..., 0]
    out = np.select(
        [x < 2.5, x < 5.0, x < 7.5, x < 12.5, x < 17.5, x < 22.5, x < 27.5],
        [
            80.0 * (2.5 - x),
            64.0 * (x - 2.5),
            64.0 * (7.5 - x),
            28.0 * (x - 7.5),
            28.0 * (17.5 - x),
            32.0 * (x - 17.5),
            32.0 * (27.5 - x),
        ],
        default=80.0 * (x - 27.5),
    )
    return out


def equal_maxima(x):
    return np.sin(5.0 * np.pi * x[..., 0]) ** 6


def uneven_decreasing_maxima(x):
    x = x[..., 0]
    envelope = np.exp(-2.0 * np.log(2.0) * ((x - 0.08) / 0.854) ** 2)
    return envelope * np.sin(5.0 * np.pi * (x ** 0.75 - 0.05)) ** 6


def himmelblau(x):
    a, b = x[..., 0], x[..., 1]
    return 200.0 - (a * a + b - 11.0) ** 2 - (a + b * b - 7.0) ** 2


def six_hump_camel(x):
    a, b = x[..., 0], x[..., 1]
    a2, b2 = a * a, b * b
    return -((4.0 - 2.1 * a2 + a2 * a2 / 3.0) * a2 + a * b + (4.0 * b2 - 4.0) * b2)


def shubert_factor(x):
    """One-dimensional factor ``sum_j j*cos((j+1)x + j)`` of the Shubert function."""
    j = np.arange(1, 6, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.sum(j * np.cos(np.multiply.outer(x, j + 1.0) + j), axis=-1)


def shubert(x):
    return -np.prod(shubert_factor(x), axis=-1)


def vincent(x):
    return np.mean(np.sin(10.0 * np.log(x)), axis=-1)


def modified_rastrigin(x):
    k = np.array([3.0, 4.0])
    return -np.sum(10.0 + 9.0 * np.cos(2.0 * np.pi * k * x), axis=-1)


def dtlz1(x, n_obj):
    x = np.asarray(x, dtype=float)
    xm = x[..., n_obj - 1:]
    g = 100.0 * (xm.shape[-1] + np.sum((xm - 0.5) ** 2 - np.cos(20.0 * np.pi * (xm - 0.5)), axis=-1))
    f = np.empty(x.shape[:-1] + (n_obj,))
    for m in range(n_obj):
        term = 0.5 * (1.0 + g) * np.prod(x[..., : n_obj - 1 - m], axis=-1)
        if m > 0:
            term = term * (1.0 - x[..., n_obj - 1 - m])
        f[..., m] = term
    return f


def dtlz2(x, n_obj):
    x = np.asarray(x, dtype=float)
    xm = x[..., n_obj - 1:]
    g = np.sum((xm - 0.5) ** 2, axis=-1)
    theta = 0.5 * np.pi * x[..., : n_obj - 1]
    f = np.empty(x.shape[:-1] + (n_obj,))
    for m in range(n_obj):
        term = (1.0 + g) * np.prod(np.cos(theta[..., : n_obj - 1 - m]), axis=-1)
        if m > 0:
            term = term * np.sin(theta[..., n_obj - 1 - m])
        f[..., m] = term
    return f


# Two-basin bi-objective problem. Decision space [-1, 1] x [0, 1]; Pareto
# sets are the segments x1 = -0.25 and x1 = +0.25, both mapping onto the
# linear front f1 + f2 = 1. The left set sits in a narrow V-shaped valley
# while the right one sits in a wide quadratic bowl, so pure objective-space
# selection tends to abandon the left set before it converges.
TWO_BASIN_CENTERS = (-0.25, 0.25)
TWO_BASIN_LEFT_SLOPE = 4.0


def two_basin_distance(x1):
    x1 = np.asarray(x1, dtype=float)
    left, right = TWO_BASIN_CENTERS
    return np.where(
        x1 < 0.0,
        TWO_BASIN_LEFT_SLOPE * np.abs(x1 - left),
        (x1 - right) ** 2,
    )


def two_basin(x):
    x = np.asarray(x, dtype=float)
    g = two_basin_distance(x[..., 0])
    t = x[..., 1]
    return np.stack([t + g, 1.0 - t + g], axis=-1)
