"""Independent reference computations shared by the test modules."""

import numpy as np

from atsh.methods import SingularCoefficient, build
from atsh.stability import classify, companion_matrix


def simulate_bounded(matrices, steps=100_000, threshold=1e6, seed=0):
    """Iterate y_{n+1} = M y_n from random unit data; True where |y| stays below threshold.

    ``matrices`` has shape (k, 2, 2). Runs all k recurrences together and
    retires a trajectory as soon as it crosses the threshold.
    """
    rng = np.random.default_rng(seed)
    M = np.asarray(matrices, dtype=float)
    v = rng.standard_normal((len(M), 2))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    bounded = np.ones(len(M), dtype=bool)
    chunk = 100
    for _ in range(steps // chunk):
        for _ in range(chunk):
            v = np.einsum("kij,kj->ki", M, v)
        big = np.abs(v).max(axis=1) > threshold
        bounded &= ~big
        v[big] = 0.0
    return bounded


def random_points(method, n, seed, nu_max=3 * np.pi, z_lim=5.0):
    """n random (nu, z) cells with buildable tableaus, their classes and companion matrices."""
    rng = np.random.default_rng(seed)
    points, classes, mats = [], [], []
    while len(points) < n:
        nu = rng.uniform(0.05, nu_max)
        z = rng.uniform(-z_lim, z_lim)
        try:
            tab = build(method, nu)
        except SingularCoefficient:
            continue
        points.append((nu, z))
        classes.append(classify(tab, nu, z).cls)
        mats.append(companion_matrix(tab, nu, z))
    return points, classes, np.array(mats)
