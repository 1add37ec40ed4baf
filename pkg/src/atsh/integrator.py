"""Fixed-step integration of perturbed oscillators y'' = -omega^2 y + g(x, y).

Adapted tableaus use the update

    y_{n+1} = 2 cos(nu) y_n - y_{n-1} + h^2 sum_i b_i g(x_n + c_i h, Y_i),

classical tableaus the usual 2 y_n - y_{n-1} + h^2 sum_i b_i f(...), with
f = -omega^2 y + g. Stage 1 (c = -1) reuses the g-value computed at stage 2
(c = 0) of the previous step, so an s-stage method costs s - 1 fresh
evaluations per step once running.

The update is carried out in summed form on the increment d_n = y_n - y_{n-1}:

    d_{n+1} = d_n - 4 sin^2(nu/2) y_n + h^2 sum_i b_i g_i,   y_{n+1} = y_n + d_{n+1},

which is the same recurrence but keeps long runs near the roundoff level
of a single step.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .methods import MethodId, Tableau, build
from .phi import phi

__all__ = [
    "Problem",
    "StarterMode",
    "TwoStepState",
    "IntegrationResult",
    "ExactUnavailable",
    "NonFiniteState",
    "start_value",
    "step",
    "integrate",
    "convergence_order",
    "step_count",
]


class ExactUnavailable(ValueError):
    """An exact solution was requested from a problem that has none."""


class NonFiniteState(ArithmeticError):
    """A stage or update produced inf/nan (the integration blew up)."""


class StarterMode(enum.Enum):
    EXACT = "exact"
    SERIES = "series"
    ORACLE = "oracle"


@dataclass(frozen=True)
class Problem:
    """IVP y'' = -omega^2 y + g(x, y), y(x0) = y0, y'(x0) = dy0 on [x0, x_end].

    ``exact`` maps x to the solution vector; for problems without a closed
    form it may hold a numerical reference that is only defined on grid points.
    """

    omega: float
    g: Callable[[float, np.ndarray], np.ndarray]
    x0: float
    x_end: float
    y0: np.ndarray
    dy0: np.ndarray
    exact: Callable[[float], np.ndarray] | None = None
    name: str = ""

    def __post_init__(self):
        y0 = np.atleast_1d(np.asarray(self.y0))
        dy0 = np.atleast_1d(np.asarray(self.dy0))
        if y0.shape != dy0.shape or y0.ndim != 1:
            raise ValueError("y0 and dy0 must be 1-d vectors of equal length")
        if not self.x_end > self.x0:
            raise ValueError("x_end must exceed x0")
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        object.__setattr__(self, "y0", y0)
        object.__setattr__(self, "dy0", dy0)

    @property
    def dim(self) -> int:
        return len(self.y0)

    def f(self, x, y):
        return -self.omega**2 * y + self.g(x, y)

    def with_exact(self, exact) -> Problem:
        return replace(self, exact=exact)


@dataclass(frozen=True)
class TwoStepState:
    """Two consecutive solution values and the reusable stage evaluation.

    ``g_prev`` is g(x_n - h, y_prev), computed by the previous step's c = 0
    stage; the next step's c = -1 stage consumes it. ``dy`` is the increment
    y_curr - y_prev as carried by the summed update (derived if absent).
    """

    x_n: float
    y_prev: np.ndarray
    y_curr: np.ndarray
    g_prev: np.ndarray | None = None
    g_evals: int = 0
    dy: np.ndarray | None = None


@dataclass
class IntegrationResult:
    xs: np.ndarray
    ys: np.ndarray
    g_evals: int
    starter_evals: int
    steps: int
    h: float
    max_global_error: float | None = None
    wall_time_s: float = 0.0

    def total_evals(self, count_starter: bool = False) -> int:
        return self.g_evals + (self.starter_evals if count_starter else 0)


class _Counted:
    def __init__(self, g):
        self.g = g
        self.calls = 0

    def __call__(self, x, y):
        self.calls += 1
        return self.g(x, y)


def _oracle_value(problem: Problem, h: float):
    """y(x0 + h) from DOP853 on the first-order system with substeps <= h/100."""
    g = _Counted(problem.g)
    n = problem.dim
    w2 = problem.omega**2

    def rhs(x, u):
        y = u[:n]
        return np.concatenate([u[n:], -w2 * y + g(x, y)])

    u0 = np.concatenate([problem.y0, problem.dy0])
    scale = max(float(np.max(np.abs(u0))), 1e-300)
    sol = solve_ivp(
        rhs, (problem.x0, problem.x0 + h), u0, method="DOP853",
        rtol=1e-13, atol=1e-16 * scale, first_step=h / 100, max_step=h / 100,
    )
    if not sol.success:
        raise RuntimeError(f"oracle starter failed: {sol.message}")
    return sol.y[:n, -1], g.calls


def _series_value(problem: Problem, h: float, degree: int = 10):
    """Truncated phi-series for y(x0 + h).

    g along the solution is sampled at Chebyshev points of [x0, x0 + h]
    (states from a fine auxiliary integration), fitted by a polynomial
    sum_j a_j z^j in z = (x - x0)/h, and the series
    y0 phi_0 + h y0' phi_1 + h^2 sum_j j! a_j phi_{j+2} is summed.
    """
    nu = problem.omega * h
    base = problem.y0 * phi(0, nu) + h * problem.dy0 * phi(1, nu)
    nodes = 0.5 * (1 - np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1)))
    g = _Counted(problem.g)
    n = problem.dim
    w2 = problem.omega**2

    def rhs(x, u):
        y = u[:n]
        return np.concatenate([u[n:], -w2 * y + problem.g(x, y)])

    u0 = np.concatenate([problem.y0, problem.dy0])
    scale = max(float(np.max(np.abs(u0))), 1e-300)
    xs = problem.x0 + h * nodes
    sol = solve_ivp(
        rhs, (problem.x0, problem.x0 + h), u0, method="DOP853", t_eval=xs,
        rtol=1e-13, atol=1e-16 * scale, max_step=h / 100,
    )
    samples = np.array([g(x, sol.y[:n, k]) for k, x in enumerate(xs)])
    coef = np.polynomial.polynomial.polyfit(nodes, samples, degree)
    weights = np.array([math.factorial(j) * phi(j + 2, nu) for j in range(degree + 1)])
    return base + h * h * (weights @ coef), g.calls + sol.nfev


def start_value(problem: Problem, h: float, mode: StarterMode = StarterMode.EXACT):
    """Approximation of y(x0 + h); returns (value, g-evaluations spent)."""
    if h <= 0:
        raise ValueError("h must be positive")
    mode = StarterMode(mode)
    if mode is StarterMode.EXACT:
        if problem.exact is None:
            raise ExactUnavailable(f"problem {problem.name!r} has no exact solution")
        return np.asarray(problem.exact(problem.x0 + h)), 0
    if mode is StarterMode.ORACLE:
        return _oracle_value(problem, h)
    return _series_value(problem, h)


def step(tableau: Tableau, problem: Problem, state: TwoStepState, h: float) -> TwoStepState:
    """Advance (y_{n-1}, y_n) to (y_n, y_{n+1})."""
    c, A, b = tableau.c, tableau.A, tableau.b
    x = state.x_n
    y_prev, y_curr = state.y_prev, state.y_curr
    w2 = problem.omega**2
    h2 = h * h
    s = len(b)
    gs = [None] * s
    Fs = [None] * s
    evals = state.g_evals
    for i in range(s):
        ci = c[i]
        if ci == -1.0 and not A[i].any():
            Y = y_prev
            if state.g_prev is not None:
                gi = state.g_prev
            else:
                gi = problem.g(x - h, Y)
                evals += 1
        elif ci == 0.0 and not A[i].any():
            Y = y_curr
            gi = problem.g(x, Y)
            evals += 1
        else:
            Y = (1 + ci) * y_curr - ci * y_prev
            for j in range(i):
                if A[i, j] != 0.0:
                    Y = Y + h2 * A[i, j] * Fs[j]
            gi = problem.g(x + ci * h, Y)
            evals += 1
        gs[i] = gi
        Fs[i] = -w2 * Y + gi
    d = state.dy if state.dy is not None else y_curr - y_prev
    if tableau.adapted:
        d_next = d - tableau.shift * y_curr + h2 * sum(b[i] * gs[i] for i in range(s))
    else:
        d_next = d + h2 * sum(b[i] * Fs[i] for i in range(s))
    y_next = y_curr + d_next
    if not np.all(np.isfinite(y_next)):
        raise NonFiniteState(f"non-finite solution at x = {x + h:.6g}")
    # stage 2 is g(x_n, y_n), exactly what the next step's stage 1 needs
    g_reuse = gs[1] if c[1] == 0.0 and not A[1].any() else None
    return TwoStepState(x + h, y_curr, y_next, g_reuse, evals, d_next)


def step_count(x0: float, x_end: float, h: float) -> int:
    """Number of steps of size ~h covering [x0, x_end].

    A two-step recurrence cannot shorten its final step without restarting,
    so a non-integral ratio is rounded up and the stepsize shrunk uniformly.
    """
    ratio = (x_end - x0) / h
    n = round(ratio)
    if n >= 1 and abs(ratio - n) <= 1e-9 * max(n, 1):
        return n
    return math.ceil(ratio)


def integrate(
    method: MethodId | str | Tableau,
    problem: Problem,
    h: float,
    starter: StarterMode | str = StarterMode.EXACT,
    dtype=None,
) -> IntegrationResult:
    """Integrate ``problem`` on its whole interval with fixed stepsize ~h.

    ``dtype`` selects the working real type (np.longdouble for
    extended-precision convergence studies); by default it follows y0.
    The problem's g and exact must then be written with numpy functions so
    they keep that precision.
    """
    t0 = time.perf_counter()
    n_int = step_count(problem.x0, problem.x_end, h)
    if n_int < 2:
        raise ValueError("need at least two steps on the interval")
    real = np.dtype(dtype) if dtype is not None else np.dtype(np.float64)
    x0 = real.type(problem.x0)
    h = (real.type(problem.x_end) - x0) / n_int
    if isinstance(method, Tableau):
        tableau = method
    else:
        tableau = build(method, problem.omega * h, dtype=real)
    if dtype is not None:
        problem = replace(problem, y0=problem.y0.astype(np.result_type(problem.y0, real)),
                          dy0=problem.dy0.astype(np.result_type(problem.dy0, real)))
    y1, starter_evals = start_value(problem, h, StarterMode(starter))
    dtype = np.result_type(problem.y0, y1, real)
    xs = x0 + h * np.arange(n_int + 1, dtype=real)
    ys = np.empty((n_int + 1, problem.dim), dtype=dtype)
    ys[0] = problem.y0
    ys[1] = y1
    state = TwoStepState(xs[1], ys[0], ys[1], dy=ys[1] - ys[0])
    # overflow is caught by the finiteness check in step
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(2, n_int + 1):
            state = step(tableau, problem, state, h)
            ys[n] = state.y_curr
    err = None
    if problem.exact is not None:
        ref = np.array([problem.exact(x) for x in xs])
        with np.errstate(over="ignore"):
            err = float(np.max(np.sqrt(np.sum(np.abs(ys - ref) ** 2, axis=1))))
    return IntegrationResult(
        xs=xs,
        ys=ys,
        g_evals=state.g_evals,
        starter_evals=starter_evals,
        steps=n_int,
        h=float(h),
        max_global_error=err,
        wall_time_s=time.perf_counter() - t0,
    )


def convergence_order(
    method: MethodId | str,
    problem: Problem,
    h_list,
    starter: StarterMode | str = StarterMode.EXACT,
    dtype=None,
) -> float:
    """Least-squares slope of log(max global error) against log(h)."""
    h_list = list(h_list)
    if len(h_list) < 3:
        raise ValueError("need at least three stepsizes")
    if problem.exact is None:
        raise ExactUnavailable("convergence_order needs an exact or reference solution")
    errs, hs = [], []
    for h in h_list:
        res = integrate(method, problem, h, starter, dtype=dtype)
        errs.append(res.max_global_error)
        hs.append(res.h)
    slope, _ = np.polyfit(np.log(hs), np.log(errs), 1)
    return float(slope)
