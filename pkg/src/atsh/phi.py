"""Evaluation of the phi-functions used by adapted two-step hybrid methods.

    phi_0(nu) = cos(nu),  phi_1(nu) = sin(nu)/nu,
    phi_{j+2}(nu) = int_0^1 sin(nu (1 - z))/nu * z^j/j! dz

They satisfy phi_j(nu) + nu^2 phi_{j+2}(nu) = 1/j! and reduce to 1/j! at
nu = 0. Scheifele's G-functions are G_j(h) = h^j phi_j(omega h).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

__all__ = [
    "PhiTable",
    "phi",
    "phi_mp",
    "phi_series",
    "phi_closed",
    "phi_table",
    "g_function",
    "switch_threshold",
    "DEFAULT_JMAX",
]

DEFAULT_JMAX = 10

# relative size of the first omitted series term
_SERIES_TOL = 1e-18


def switch_threshold(j: int) -> float:
    """|nu| at and above which the closed form replaces the Taylor series.

    The closed form loses roughly j*log10(1/nu) digits to cancellation for
    small nu, while the alternating series loses digits once nu grows past
    about j/2. The crossover below keeps both branches near machine precision.
    """
    return max(0.5, 0.5 * j + 2.0)


def phi_series(j: int, nu: float) -> float:
    """Taylor series sum_k (-1)^k nu^(2k) / (2k + j)!."""
    nu2 = nu * nu
    term = 1.0 / math.factorial(j)
    total = term
    k = 0
    while True:
        k += 1
        term *= -nu2 / ((2 * k + j - 1) * (2 * k + j))
        total += term
        if abs(term) <= _SERIES_TOL * abs(total) or term == 0.0:
            return total


def phi_closed(j: int, nu: float) -> float:
    """Closed form in terms of cos/sin minus their truncated Taylor polynomials."""
    if nu == 0.0:
        raise ZeroDivisionError("closed form is singular at nu = 0")
    if j == 2:
        # 1 - cos(nu) cancels near nu = 2 pi k
        return 2.0 * (math.sin(0.5 * nu) / nu) ** 2
    m = j // 2
    if j % 2 == 0:
        acc = math.cos(nu)
        for k in range(m):
            acc -= (-1) ** k * nu ** (2 * k) / math.factorial(2 * k)
    else:
        acc = math.sin(nu)
        for k in range(m):
            acc -= (-1) ** k * nu ** (2 * k + 1) / math.factorial(2 * k + 1)
    return (-1) ** m * acc / nu**j


def phi(j: int, nu: float) -> float:
    """phi_j(nu) in double precision, accurate uniformly in nu (including 0)."""
    if j < 0:
        raise ValueError(f"phi index must be non-negative, got {j}")
    nu = float(nu)
    if not math.isfinite(nu):
        raise ValueError(f"nu must be finite, got {nu}")
    nu = abs(nu)  # even functions of nu
    if j == 0:
        return math.cos(nu)
    if nu < switch_threshold(j):
        return phi_series(j, nu)
    return phi_closed(j, nu)


def phi_mp(j: int, nu) -> mpmath.mpf:
    """phi_j(nu) at the current mpmath working precision.

    Used by the phase-lag analysis, where the quantities of interest sit many
    orders of magnitude below double-precision roundoff.
    """
    nu = mpmath.mpf(nu)
    nu2 = nu * nu
    term = 1 / mpmath.factorial(j)
    total = term
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec - 8)
    k = 0
    while True:
        k += 1
        term *= -nu2 / ((2 * k + j - 1) * (2 * k + j))
        total += term
        if abs(term) <= eps * abs(total) or term == 0:
            return total


def g_function(j: int, h: float, omega: float) -> float:
    """Scheifele G-function G_j(h) = h^j phi_j(omega h)."""
    if h <= 0:
        raise ValueError(f"stepsize must be positive, got {h}")
    return h**j * phi(j, omega * h)


@dataclass(frozen=True)
class PhiTable:
    """Cached phi_0(nu), ..., phi_jmax(nu) for one nu."""

    nu: float
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __getitem__(self, j: int) -> float:
        return float(self.values[j])

    @property
    def j_max(self) -> int:
        return len(self.values) - 1


def phi_table(nu: float, j_max: int = DEFAULT_JMAX) -> PhiTable:
    if j_max < 2:
        raise ValueError(f"j_max must be at least 2, got {j_max}")
    values = np.array([phi(j, nu) for j in range(j_max + 1)])
    return PhiTable(float(nu), values)
