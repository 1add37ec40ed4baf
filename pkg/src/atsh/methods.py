"""Explicit adapted two-step hybrid (ATSH) tableaus and their classical companions.

Every method here has c_1 = -1, c_2 = 0 with zero first and second rows of A,
so stage 1 reproduces y_{n-1} and stage 2 reproduces y_n. Coefficients
depend on nu = omega*h only through phi_2, phi_4 and phi_6.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .phi import phi, phi_mp

__all__ = [
    "Family",
    "MethodId",
    "Tableau",
    "SingularCoefficient",
    "NUMEROV4",
    "ATSH5_MINERR",
    "ATSH5_PL8",
    "ATSH4_ZD",
    "ADAPTED_METHODS",
    "build",
    "coefficients",
    "method_names",
]

SINGULAR_RTOL = 1e-10


class SingularCoefficient(ArithmeticError):
    """A coefficient denominator vanishes at the requested nu."""


class Family(enum.Enum):
    NUMEROV4 = "numerov4"
    ATSH5_MINERR = "atsh5-minerr"
    ATSH5_PL8 = "atsh5-pl8"
    ATSH4_ZD = "atsh4-zd"


# (algebraic order, phase-lag order, dissipation order); inf = zero-dissipative
_ORDERS = {
    Family.NUMEROV4: (4, 4, math.inf),
    Family.ATSH5_MINERR: (5, 6, 5),
    Family.ATSH5_PL8: (5, 8, 5),
    Family.ATSH4_ZD: (4, 6, math.inf),
}


@dataclass(frozen=True, order=True)
class MethodId:
    """A coefficient family, optionally in its classical (nu = 0) form."""

    family: Family
    classical: bool = False

    @property
    def name(self) -> str:
        prefix = "classical:" if self.classical else ""
        return prefix + self.family.value

    def companion(self) -> MethodId:
        """The classical companion of an adapted method (and vice versa)."""
        return MethodId(self.family, not self.classical)

    @classmethod
    def parse(cls, name: str) -> MethodId:
        text = name.strip().lower()
        classical = text.startswith("classical:")
        if classical:
            text = text[len("classical:"):]
        try:
            return cls(Family(text), classical)
        except ValueError:
            raise ValueError(
                f"unknown method {name!r}; expected one of {', '.join(method_names())}"
            ) from None

    def __str__(self) -> str:
        return self.name


NUMEROV4 = MethodId(Family.NUMEROV4)
ATSH5_MINERR = MethodId(Family.ATSH5_MINERR)
ATSH5_PL8 = MethodId(Family.ATSH5_PL8)
ATSH4_ZD = MethodId(Family.ATSH4_ZD)
ADAPTED_METHODS = (NUMEROV4, ATSH5_MINERR, ATSH5_PL8, ATSH4_ZD)


def method_names() -> list[str]:
    names = [m.name for m in ADAPTED_METHODS]
    return names + ["classical:" + n for n in names]


@dataclass(frozen=True)
class Tableau:
    """Coefficients (c, A, b) of one method evaluated at a fixed nu."""

    method: MethodId
    nu: float
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    p: int
    q: int
    r: float
    # 2 - 2 cos(nu) = 4 sin^2(nu/2); zero for classical tableaus
    shift: float = field(repr=False, default=0.0)

    def __post_init__(self):
        for arr in (self.c, self.A, self.b):
            arr.setflags(write=False)

    @property
    def s(self) -> int:
        return len(self.b)

    @property
    def adapted(self) -> bool:
        return not self.method.classical

    @property
    def zero_dissipative(self) -> bool:
        return math.isinf(self.r)

    def replace(self, **changes) -> Tableau:
        """Copy with some arrays swapped out (used to build corrupted tableaus in tests)."""
        kwargs = dict(
            method=self.method, nu=self.nu, c=self.c.copy(), A=self.A.copy(),
            b=self.b.copy(), p=self.p, q=self.q, r=self.r, shift=self.shift,
        )
        kwargs.update(changes)
        return Tableau(**kwargs)


def _check(name, value, *terms):
    scale = sum(abs(t) for t in terms)
    if abs(value) < SINGULAR_RTOL * scale:
        raise SingularCoefficient(f"{name} = {float(value):.3e} vanishes (scale {float(scale):.3e})")


def coefficients(family: Family, p2, p4, p6, *, check: bool = True):
    """Nodes, matrix and weights as nested lists, built from phi_2, phi_4, phi_6.

    Arithmetic only uses +, -, *, / on the inputs, so float and mpmath
    scalars both work. Returns (c, A, b).
    """
    one = p4 / p4

    def frac(n, d):
        return one * n / d

    if family is Family.NUMEROV4:
        c = [-one, 0 * one, one]
        A = [[0 * one] * 3 for _ in range(3)]
        A[2][1] = one
        b = [2 * p4, 2 * p2 - 4 * p4, 2 * p4]
        return c, A, b

    A = [[0 * one] * 4 for _ in range(4)]

    if family is Family.ATSH5_MINERR:
        s1 = 600 * p6 - 13 * p4
        s2 = 400 * p6 - 21 * p4
        s3 = 40000 * p6 - 2877 * p4
        if check:
            _check("S1", s1, 600 * p6, 13 * p4)
            _check("S2", s2, 400 * p6, 21 * p4)
            _check("S3", s3, 40000 * p6, 2877 * p4)
        p4_4 = p4**4
        A[2][0] = frac(126651, 2000000)
        A[2][1] = frac(900249, 2000000)
        A[3][0] = 100 * s1 * s2 * (720000 * p6**2 - 124158 * p6 * p4 + 6031 * p4**2) / (305488243 * p4_4)
        A[3][1] = s1 * s2 * (-8000000 * p6**2 + 886200 * p6 * p4 + 2849 * p4**2) / (13119127 * p4_4)
        A[3][2] = 20000 * s1 * s2 * s3 * p6 / (2138417701 * p4_4)
        b = [
            6 * (40000 * p6 - 1323 * p4) * p4 / (163 * s1),
            2 * (15338 * p4**2 - 240000 * p6 * p4 - 3969 * p4 * p2 + 75600 * p2 * p6) / (189 * s2),
            400000000 * (12 * p6 - p4) * p4 / (30807 * s3),
            3748322 * p4_4 / (9 * s1 * s2 * s3),
        ]
        # printed as 6/100; 63/100 is the value consistent with row 3 of A
        c = [-one, 0 * one, frac(63, 100), 3 * s2 / (37 * p4)]
        return c, A, b

    if family is Family.ATSH5_PL8:
        s1 = 336 * p6 - 25 * p4
        s2 = 168 * p6 - 11 * p4
        s3 = 9408 * p6 - 775 * p4
        if check:
            _check("S1", s1, 336 * p6, 25 * p4)
            _check("S2", s2, 168 * p6, 11 * p4)
            _check("S3", s3, 9408 * p6, 775 * p4)
        p4_4 = p4**4
        A[2][0] = frac(1325, 43904)
        A[2][1] = frac(35775, 43904)
        A[3][0] = 28 * s1 * s2 * (18816 * p6**2 - 2186 * p6 * p4 + 53 * p4**2) / (4293 * p4_4)
        A[3][1] = -s1 * s2 * (526848 * p6**2 - 51800 * p6 * p4 + 475 * p4**2) / (2025 * p4_4)
        A[3][2] = 1568 * s1 * s2 * s3 * p6 / (107325 * p4_4)
        b = [
            2 * (9408 * p6 - 625 * p4) * p4 / (53 * s2),
            2 * (1418 * p4**2 - 625 * p4 * p2 - 18816 * p6 * p4 + 8400 * p2 * p6) / (25 * s1),
            2458624 * (12 * p6 - p4) * p4 / (1325 * s3),
            162 * p4_4 / (s1 * s2 * s3),
        ]
        c = [-one, 0 * one, frac(25, 28), s1 / (3 * p4)]
        return c, A, b

    if family is Family.ATSH4_ZD:
        if check:
            _check("phi4", p4, frac(1, 24))
        A[2][1] = frac(429, 800)
        A[3][0] = 38200 * p6 / (79233 * p4)
        A[3][1] = -5 * (7640 * p6 + 637 * p4) / (31213 * p4)
        A[3][2] = 764000 * p6 / (1030029 * p4)
        b = [
            -6 * p4 / 11,
            -596 * p4 / 65 + 2 * p2,
            128000 * p4 / 27313,
            4802 * p4 / 955,
        ]
        c = [-one, 0 * one, frac(13, 20), frac(-5, 7)]
        return c, A, b

    raise ValueError(f"unknown family {family!r}")


def _to_mp(x) -> mpmath.mpf:
    if isinstance(x, np.floating):
        return mpmath.mpf(np.format_float_scientific(x, unique=True))
    return mpmath.mpf(x)


def build(method: MethodId | str, nu: float = 0.0, dtype=np.float64) -> Tableau:
    """Evaluate the tableau of ``method`` at ``nu``.

    Classical companions ignore ``nu`` and use the nu = 0 coefficients.
    A dtype other than float64 (e.g. np.longdouble) evaluates the formulas
    in mpmath and rounds once into that type. Raises SingularCoefficient
    where a denominator of the coefficient formulas vanishes.
    """
    if isinstance(method, str):
        method = MethodId.parse(method)
    if nu < 0 or not math.isfinite(nu):
        raise ValueError(f"nu must be finite and non-negative, got {nu}")
    p, q, r = _ORDERS[method.family]
    dtype = np.dtype(dtype)
    if dtype == np.float64:
        nu_eval = 0.0 if method.classical else float(nu)
        c, A, b = coefficients(method.family, phi(2, nu_eval), phi(4, nu_eval), phi(6, nu_eval))
        shift = 0.0 if method.classical else 4 * math.sin(nu_eval / 2) ** 2
    else:
        nu_eval = dtype.type(0) if method.classical else dtype.type(nu)
        with mpmath.workdps(40):
            x = _to_mp(nu_eval)
            c, A, b = coefficients(method.family, phi_mp(2, x), phi_mp(4, x), phi_mp(6, x))
            shift = 0 if method.classical else 4 * mpmath.sin(x / 2) ** 2

            def conv(v):
                return dtype.type(mpmath.nstr(v, 30, min_fixed=-1, max_fixed=1))

            c = [conv(v) for v in c]
            A = [[conv(v) for v in row] for row in A]
            b = [conv(v) for v in b]
            shift = conv(shift)
    return Tableau(
        method=method,
        nu=nu_eval,
        c=np.array(c, dtype=dtype),
        A=np.array(A, dtype=dtype),
        b=np.array(b, dtype=dtype),
        p=p,
        q=q,
        r=r,
        shift=shift,
    )
