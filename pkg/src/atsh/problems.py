"""Benchmark perturbed-oscillator problems.

problem1  y'' = -100 y + 99 sin x on [0, 100], omega = 10
problem2  z'' = -z + 0.001 e^{ix} on [0, 1000], omega = 1 (as a real pair)
problem3  equatorial satellite, u'' + u = mu/c^2 + 12 (J2/c^2) u^2 on [pi, 100]
problem4  two coupled nonlinear oscillators on [0, 5], omega = 5
cubic     y'' = -y + eps y^3 with omega = sqrt(1 - 0.75 eps)
harmonic  g = 0
"""

from __future__ import annotations

import enum
import functools
import math

import numpy as np

from .integrator import Problem, StarterMode, integrate, step_count
from .methods import ATSH5_MINERR

__all__ = [
    "BenchmarkId",
    "InvalidParams",
    "OracleNotConverged",
    "GridReference",
    "make_problem",
    "reference_solution",
    "satellite_reference",
    "cubic_reference",
    "SATELLITE_MU",
    "SATELLITE_J2",
    "SATELLITE_BASE_STEP",
    "RICHARDSON_TOL",
]

SATELLITE_MU = 100 / 20895  # mu / c^2
SATELLITE_J2 = 50 / 20895000  # J2 / c^2
SATELLITE_BASE_STEP = 1 - math.pi / 100  # (100 - pi) / 100
RICHARDSON_TOL = 1e-12


class InvalidParams(ValueError):
    pass


class OracleNotConverged(RuntimeError):
    pass


class BenchmarkId(enum.Enum):
    INHOMOGENEOUS = "problem1"
    STIEFEL_BETTIS = "problem2"
    SATELLITE = "problem3"
    FRANCO_SYSTEM = "problem4"
    CUBIC = "cubic"
    HARMONIC = "harmonic"

    @classmethod
    def parse(cls, name: str) -> BenchmarkId:
        try:
            return cls(name.strip().lower())
        except ValueError:
            names = ", ".join(b.value for b in cls)
            raise ValueError(f"unknown problem {name!r}; expected one of {names}") from None


def _inhomogeneous() -> Problem:
    return Problem(
        omega=10.0,
        g=lambda x, y: np.full_like(y, 99 * np.sin(x)),
        x0=0.0,
        x_end=100.0,
        y0=np.array([1.0]),
        dy0=np.array([11.0]),
        exact=lambda x: np.array([np.cos(10 * x) + np.sin(10 * x) + np.sin(x)]),
        name="problem1",
    )


def _stiefel_bettis(complex_form: bool = False) -> Problem:
    if complex_form:
        return Problem(
            omega=1.0,
            g=lambda x, y: np.full_like(y, 0.001 * np.exp(1j * x)),
            x0=0.0,
            x_end=1000.0,
            y0=np.array([1.0 + 0j]),
            dy0=np.array([0.9995j]),
            exact=lambda x: np.array([(1 - 0.0005j * x) * np.exp(1j * x)]),
            name="problem2-complex",
        )

    def exact(x):
        c, s = np.cos(x), np.sin(x)
        return np.array([c + 0.0005 * x * s, s - 0.0005 * x * c])

    return Problem(
        omega=1.0,
        g=lambda x, y: np.array([0.001 * np.cos(x), 0.001 * np.sin(x)]),
        x0=0.0,
        x_end=1000.0,
        y0=np.array([1.0, 0.0]),
        dy0=np.array([0.0, 0.9995]),
        exact=exact,
        name="problem2",
    )


def _satellite(eccentricity: float = 0.99, j2: float = SATELLITE_J2,
               x_end: float = 100.0) -> Problem:
    if not 0 <= eccentricity < 1:
        raise InvalidParams(f"eccentricity must lie in [0, 1), got {eccentricity}")
    mu = SATELLITE_MU
    return Problem(
        omega=1.0,
        g=lambda x, u: mu + 12.0 * j2 * u * u,
        x0=math.pi,
        x_end=x_end,
        y0=np.array([mu * (1 - eccentricity)]),
        dy0=np.array([0.0]),
        exact=None,
        name="problem3",
    )


def _franco(eps: float = 1e-3) -> Problem:
    if not eps > 0:
        raise InvalidParams(f"epsilon must be positive, got {eps}")

    def g(x, y):
        x2 = x * x
        common = 1 + eps * eps + 2 * eps * np.sin(5 * x + x2)
        sx, cx = np.sin(x2), np.cos(x2)
        f1 = common + 2 * cx + (25 - 4 * x2) * sx
        f2 = common - 2 * sx + (25 - 4 * x2) * cx
        r2 = y[0] * y[0] + y[1] * y[1]
        return np.array([eps * (f1 - r2), eps * (f2 - r2)])

    def exact(x):
        return np.array([np.cos(5 * x) + eps * np.sin(x * x),
                         np.sin(5 * x) + eps * np.cos(x * x)])

    return Problem(
        omega=5.0,
        g=g,
        x0=0.0,
        x_end=5.0,
        y0=np.array([1.0, eps]),
        dy0=np.array([0.0, 5.0]),
        exact=exact,
        name="problem4",
    )


def _cubic(eps: float = 1e-3, x_end: float = 10 * math.pi) -> Problem:
    if not 0 <= eps < 4 / 3:
        raise InvalidParams(f"epsilon must lie in [0, 4/3), got {eps}")
    omega = math.sqrt(1 - 0.75 * eps)
    return Problem(
        omega=omega,
        g=lambda x, y: eps * y**3 - 0.75 * eps * y,
        x0=0.0,
        x_end=x_end,
        y0=np.array([1.0]),
        dy0=np.array([1.0]),
        exact=None,
        name="cubic",
    )


def _harmonic(omega: float = 10.0, y0: float = 1.0, dy0: float = 0.0,
              x_end: float = 100.0) -> Problem:
    if omega <= 0:
        raise InvalidParams("omega must be positive")
    return Problem(
        omega=omega,
        g=lambda x, y: np.zeros_like(y),
        x0=0.0,
        x_end=x_end,
        y0=np.array([float(y0)]),
        dy0=np.array([float(dy0)]),
        exact=lambda x: np.array([y0 * np.cos(omega * x) + dy0 / omega * np.sin(omega * x)]),
        name="harmonic",
    )


_FACTORIES = {
    BenchmarkId.INHOMOGENEOUS: _inhomogeneous,
    BenchmarkId.STIEFEL_BETTIS: _stiefel_bettis,
    BenchmarkId.SATELLITE: _satellite,
    BenchmarkId.FRANCO_SYSTEM: _franco,
    BenchmarkId.CUBIC: _cubic,
    BenchmarkId.HARMONIC: _harmonic,
}


def make_problem(pid: BenchmarkId | str, **params) -> Problem:
    """Build a benchmark problem; keyword params override its defaults."""
    if isinstance(pid, str):
        pid = BenchmarkId.parse(pid)
    try:
        return _FACTORIES[pid](**params)
    except TypeError as exc:
        raise InvalidParams(f"bad parameters for {pid.value}: {exc}") from None


class GridReference:
    """Numerical reference solution, queried only at points of its grid."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray, richardson_gap: float):
        self.xs = xs
        self.ys = ys
        self.h = xs[1] - xs[0]
        self.richardson_gap = richardson_gap

    def __call__(self, x: float) -> np.ndarray:
        k = round((x - self.xs[0]) / self.h)
        if not 0 <= k < len(self.xs) or abs(self.xs[k] - x) > 1e-9 * max(1.0, abs(x)):
            raise ValueError(f"x = {x!r} is not a point of the reference grid")
        return self.ys[k]


def _fine_reference(problem: Problem, h_min: float) -> GridReference:
    """Classical fifth-order run with 128 substeps per step of size h_min, checked against 256."""
    n = 128 * step_count(problem.x0, problem.x_end, h_min)
    h_ref = (problem.x_end - problem.x0) / n
    coarse = integrate(ATSH5_MINERR.companion(), problem, h_ref, StarterMode.ORACLE)
    fine = integrate(ATSH5_MINERR.companion(), problem, h_ref / 2, StarterMode.ORACLE)
    gap = float(np.max(np.linalg.norm(coarse.ys - fine.ys[::2], axis=1)))
    if not gap <= RICHARDSON_TOL:
        raise OracleNotConverged(
            f"reference for {problem.name} changed by {gap:.3e} under halving (> {RICHARDSON_TOL:g})"
        )
    return GridReference(coarse.xs, coarse.ys, gap)


@functools.lru_cache(maxsize=8)
def satellite_reference(eccentricity: float = 0.99, j2: float = SATELLITE_J2,
                        h_min: float = SATELLITE_BASE_STEP / 4) -> GridReference:
    """Reference on the grid of h_min / 128; h_min is the smallest stepsize to be compared."""
    return _fine_reference(_satellite(eccentricity, j2), h_min)


@functools.lru_cache(maxsize=8)
def cubic_reference(eps: float = 1e-3, x_end: float = 10 * math.pi,
                    h_min: float = math.pi / 64) -> GridReference:
    return _fine_reference(_cubic(eps, x_end), h_min)


def reference_solution(pid: BenchmarkId | str, x, **params) -> np.ndarray:
    """Solution values on the points ``x``: exact where known, else the oracle."""
    if isinstance(pid, str):
        pid = BenchmarkId.parse(pid)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if pid is BenchmarkId.SATELLITE:
        ref = satellite_reference(**params)
    elif pid is BenchmarkId.CUBIC:
        ref = cubic_reference(**params)
    else:
        ref = make_problem(pid, **params).exact
    return np.array([ref(xi) for xi in x])
