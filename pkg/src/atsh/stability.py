"""Linear stability and phase analysis on the test equation y'' = -omega^2 y - eps y.

Applied to this equation a method becomes the recurrence

    y_{n+1} - S y_n + P y_{n-1} = 0,
    S = 2 phi_0(nu) - z b^T N^{-1} (e + c),   P = 1 - z b^T N^{-1} c,

with nu = omega h, z = eps h^2 and N = I + (nu^2 + z) A. For a classical
companion the fitted part vanishes: phi_0 -> 1 and z -> nu^2 + z.

Phase-lag and dissipation are evaluated in mpmath. For H <= 1/8 the
phase-lag of the fifth-order methods is far below double-precision
roundoff in S/(2 sqrt P).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .methods import MethodId, SingularCoefficient, Tableau, build, coefficients
from .phi import phi_mp

__all__ = [
    "StabilityClass",
    "StabilityPoint",
    "StabilityGrid",
    "PhasePoint",
    "LeadingTerms",
    "OutsideDomain",
    "FitFailed",
    "TOL_EQ",
    "PHASE_DPS",
    "s_and_p",
    "classify",
    "scan_region",
    "stability_intervals",
    "phase_point",
    "estimate_leading",
    "ck_uk",
    "companion_matrix",
]

TOL_EQ = 1e-12
PHASE_DPS = 60
LEADING_H = tuple(2.0**-k for k in range(2, 9))


class OutsideDomain(ArithmeticError):
    """Phase-lag is undefined: P <= 0 or |S / (2 sqrt P)| > 1."""


class FitFailed(ArithmeticError):
    """A log-log slope is not close enough to an integer."""


class StabilityClass(enum.IntEnum):
    UNSTABLE = 0
    ABSOLUTELY_STABLE = 1
    PERIODIC = 2


@dataclass(frozen=True)
class StabilityPoint:
    nu: float
    z: float
    S: float
    P: float
    cls: StabilityClass
    singular: bool = False


def _forward(A, k, rhs):
    """Solve (I + k A) x = rhs for strictly lower-triangular A.

    ``k`` may be an array, in which case each x_i is an array over k.
    """
    x = []
    for i in range(len(rhs)):
        acc = rhs[i]
        for j in range(i):
            if A[i][j] != 0:
                acc = acc - k * A[i][j] * x[j]
        x.append(acc)
    return x


def _s_p_lists(c, A, b, phi0, nu2, z):
    k = nu2 + z
    e_plus_c = [1 + ci for ci in c]
    u = _forward(A, k, e_plus_c)
    v = _forward(A, k, c)
    S = 2 * phi0 - z * sum(bi * ui for bi, ui in zip(b, u))
    P = 1 - z * sum(bi * vi for bi, vi in zip(b, v))
    return S, P


def s_and_p(tableau: Tableau, nu, z):
    """Stability functions S and P; ``z`` may be a numpy array.

    For an adapted tableau ``nu`` should equal the tableau's own nu.
    """
    A = tableau.A
    if tableau.adapted:
        phi0, nu2, zz = np.cos(nu), nu * nu, z
    else:
        phi0, nu2, zz = 1.0, 0.0, nu * nu + z
    return _s_p_lists(tableau.c, A, tableau.b, phi0, nu2, zz)


def _classify_sp(S, P, tol=TOL_EQ):
    S = np.asarray(S)
    P = np.asarray(P)
    out = np.full(np.broadcast(S, P).shape, StabilityClass.UNSTABLE, dtype=np.int8)
    absolute = (P < 1 - tol) & (np.abs(S) < 1 + P)
    periodic = (np.abs(P - 1) <= tol) & (np.abs(S) < 2)
    out[absolute] = StabilityClass.ABSOLUTELY_STABLE
    out[periodic] = StabilityClass.PERIODIC
    return out


def classify(tableau: Tableau, nu: float, z: float, tol: float = TOL_EQ) -> StabilityPoint:
    S, P = s_and_p(tableau, nu, z)
    cls = StabilityClass(int(_classify_sp(S, P, tol)))
    return StabilityPoint(float(nu), float(z), float(S), float(P), cls)


def companion_matrix(tableau: Tableau, nu: float, z: float) -> np.ndarray:
    """One step of the method on the test equation, as a map (y_n, y_{n-1}) -> (y_{n+1}, y_n).

    Built by running the stage equations on the two unit start vectors, so it
    does not go through the S, P formulas.
    """
    h2_lambda2 = nu * nu + z
    cols = []
    for y_curr, y_prev in ((1.0, 0.0), (0.0, 1.0)):
        stages = []
        for i in range(tableau.s):
            acc = (1 + tableau.c[i]) * y_curr - tableau.c[i] * y_prev
            acc -= h2_lambda2 * sum(tableau.A[i, j] * stages[j] for j in range(i))
            stages.append(acc)
        if tableau.adapted:
            y_next = 2 * math.cos(nu) * y_curr - y_prev - z * np.dot(tableau.b, stages)
        else:
            y_next = 2 * y_curr - y_prev - h2_lambda2 * np.dot(tableau.b, stages)
        cols.append((y_next, y_curr))
    return np.array(cols).T


@dataclass(frozen=True)
class StabilityGrid:
    """Classification of a nu-z window. Arrays are indexed [z, nu]."""

    method: MethodId
    nus: np.ndarray
    zs: np.ndarray
    S: np.ndarray
    P: np.ndarray
    classes: np.ndarray
    singular: np.ndarray

    def point(self, iz: int, inu: int) -> StabilityPoint:
        return StabilityPoint(
            float(self.nus[inu]), float(self.zs[iz]), float(self.S[iz, inu]),
            float(self.P[iz, inu]), StabilityClass(int(self.classes[iz, inu])),
            bool(self.singular[iz, inu]),
        )

    def boundary(self) -> np.ndarray:
        """Mask of cells whose class differs from a right or upper neighbour."""
        cl = self.classes
        mask = np.zeros(cl.shape, dtype=bool)
        mask[:, :-1] |= cl[:, :-1] != cl[:, 1:]
        mask[:-1, :] |= cl[:-1, :] != cl[1:, :]
        return mask


def scan_region(method: MethodId | str, nu_range=(0.0, 3 * math.pi), z_range=(-5.0, 5.0),
                grid=(600, 600), tol: float = TOL_EQ) -> StabilityGrid:
    """Classify a grid of (nu, z); the tableau is rebuilt at every nu.

    The nu axis excludes its lower end, so (0, nu_max] with the default range.
    Columns whose coefficients are singular are flagged and marked unstable.
    """
    if isinstance(method, str):
        method = MethodId.parse(method)
    nu_lo, nu_hi = nu_range
    if not 0 <= nu_lo < nu_hi:
        raise ValueError(f"need 0 <= nu_min < nu_max, got {nu_range}")
    n_nu, n_z = grid
    nus = nu_lo + (nu_hi - nu_lo) * np.arange(1, n_nu + 1) / n_nu
    zs = np.linspace(z_range[0], z_range[1], n_z)
    S = np.full((n_z, n_nu), np.nan)
    P = np.full((n_z, n_nu), np.nan)
    singular = np.zeros((n_z, n_nu), dtype=bool)
    for k, nu in enumerate(nus):
        try:
            tab = build(method, nu)
        except SingularCoefficient:
            singular[:, k] = True
            continue
        S[:, k], P[:, k] = s_and_p(tab, nu, zs)
    with np.errstate(invalid="ignore"):
        classes = _classify_sp(S, P, tol)
    classes[singular] = StabilityClass.UNSTABLE
    return StabilityGrid(method, nus, zs, S, P, classes, singular)


def stability_intervals(method: MethodId | str, omega: float, epsilon: float,
                        h_max: float, n: int = 4000) -> list[tuple[float, float, StabilityClass]]:
    """Maximal stepsize intervals of constant class along the ray nu = omega h, z = eps h^2.

    The first entry is the primary interval; later stable entries are
    secondary intervals. Interval ends are resolved to h_max / n.
    """
    if isinstance(method, str):
        method = MethodId.parse(method)
    hs = h_max * np.arange(1, n + 1) / n
    classes = []
    for h in hs:
        nu = omega * h
        try:
            classes.append(classify(build(method, nu), nu, epsilon * h * h).cls)
        except SingularCoefficient:
            classes.append(StabilityClass.UNSTABLE)
    out = []
    start = 0
    for i in range(1, n + 1):
        if i == n or classes[i] != classes[start]:
            out.append((float(hs[start]), float(hs[i - 1]), classes[start]))
            start = i
    return out


def ck_uk(tableau: Tableau, k_max: int) -> tuple[np.ndarray, np.ndarray]:
    """C_k = b^T A^{k-1} c and U_k = b^T A^{k-1} e for k = 1..k_max."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    C, U = [], []
    vc, ve = tableau.c.copy(), np.ones(tableau.s)
    for _ in range(k_max):
        C.append(tableau.b @ vc)
        U.append(tableau.b @ ve)
        vc, ve = tableau.A @ vc, tableau.A @ ve
    return np.array(C), np.array(U)


@dataclass(frozen=True)
class PhasePoint:
    H: float
    omega: float
    epsilon: float
    phase_lag: float
    dissipation: float


def _mp_coefficients(method: MethodId, nu):
    x = 0 if method.classical else nu
    p2, p4, p6 = (phi_mp(j, x) for j in (2, 4, 6))
    return coefficients(method.family, p2, p4, p6)


def _phase_mp(method: MethodId, H, omega, epsilon):
    """(phase_lag, dissipation) as mpf at the current precision."""
    H = mpmath.mpf(H)
    lam2 = mpmath.mpf(omega) ** 2 + mpmath.mpf(epsilon)
    if lam2 <= 0:
        raise ValueError("omega^2 + epsilon must be positive")
    nu = mpmath.mpf(omega) * H / mpmath.sqrt(lam2)
    z = mpmath.mpf(epsilon) * H * H / lam2
    c, A, b = _mp_coefficients(method, nu)
    if method.classical:
        S, P = _s_p_lists(c, A, b, 1, 0, nu * nu + z)
    else:
        S, P = _s_p_lists(c, A, b, mpmath.cos(nu), nu * nu, z)
    if P <= 0:
        raise OutsideDomain(f"P = {float(P):.3e} <= 0 at H = {float(H)}")
    root = mpmath.sqrt(P)
    arg = S / (2 * root)
    slack = abs(arg) - 1
    if slack > 0:
        if slack > 4 * mpmath.eps:
            raise OutsideDomain(f"|S/(2 sqrt P)| = {float(abs(arg))} > 1 at H = {float(H)}")
        arg = mpmath.sign(arg)
    return H - mpmath.acos(arg), 1 - root


def phase_point(method: MethodId | str, H: float, omega: float, epsilon: float) -> PhasePoint:
    """Phase-lag H - arccos(S / (2 sqrt P)) and dissipation 1 - sqrt(P) at scaled step H."""
    if isinstance(method, str):
        method = MethodId.parse(method)
    if not H > 0:
        raise ValueError(f"H must be positive, got {H}")
    with mpmath.workdps(PHASE_DPS):
        lag, diss = _phase_mp(method, H, omega, epsilon)
        return PhasePoint(float(H), float(omega), float(epsilon), float(lag), float(diss))


@dataclass(frozen=True)
class LeadingTerms:
    """phase_lag ~ c_phi H^(q+1) and dissipation ~ c_d H^(r+1)."""

    q: int
    c_phi: float
    r: float
    c_d: float


def _fit(Hs, values, what):
    logs = [mpmath.log(abs(v)) for v in values]
    slope = float(np.polyfit([math.log(h) for h in Hs], [float(v) for v in logs], 1)[0])
    power = round(slope)
    if abs(slope - power) > 0.1:
        raise FitFailed(f"{what} slope {slope:.3f} is not within 0.1 of an integer")
    return power, float(values[-1] / mpmath.mpf(Hs[-1]) ** power)


def estimate_leading(method: MethodId | str, omega: float, epsilon: float,
                     Hs=LEADING_H) -> LeadingTerms:
    """Phase-lag and dissipation orders and constants from a log-log fit.

    Slopes are fitted over ``Hs`` and snapped to integers; constants are read
    off at the smallest H. Dissipation that vanishes to working precision at
    every H gives r = inf and c_d = 0.
    """
    if isinstance(method, str):
        method = MethodId.parse(method)
    if epsilon == 0:
        raise ValueError("epsilon must be non-zero")
    Hs = sorted(Hs, reverse=True)
    with mpmath.workdps(PHASE_DPS):
        pts = [_phase_mp(method, H, omega, epsilon) for H in Hs]
        lags = [p[0] for p in pts]
        diss = [p[1] for p in pts]
        q_plus, c_phi = _fit(Hs, lags, "phase-lag")
        floor = mpmath.mpf(10) ** (-PHASE_DPS // 2)
        if all(abs(d) <= floor for d in diss):
            r, c_d = math.inf, 0.0
        else:
            r_plus, c_d = _fit(Hs, diss, "dissipation")
            r = r_plus - 1
    return LeadingTerms(q_plus - 1, c_phi, r, c_d)
