"""Order conditions of ATSH methods through rho = 7.

Each condition is a weighted sum over (b, c, A) compared with a combination
of phi-functions at the tableau's nu. At nu = 0 they collapse to the
classical two-step hybrid conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .methods import Tableau
from .phi import phi

__all__ = [
    "ConditionResidual",
    "CONDITIONS",
    "ORDER_TOL",
    "residuals",
    "verify_order",
    "simplifying_check",
]

ORDER_TOL = 1e-11


@dataclass(frozen=True)
class ConditionResidual:
    tree_id: str
    rho: int
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.lhs - self.rhs


def _sums(c, A, b):
    e = np.ones_like(c)
    Ae = A @ e
    Ac = A @ c
    Ac2 = A @ c**2
    return {
        "t21": b @ e,
        "t31": b @ c,
        "t41": b @ c**2,
        "t42": b @ Ae,
        "t51": b @ c**3,
        "t52": b @ (c * Ae),
        "t53": b @ Ac,
        "t61": b @ c**4,
        "t62": b @ (c**2 * Ae),
        "t63": b @ (c * Ac),
        "t64": b @ (Ae * Ae),
        "t65": b @ Ac2,
        "t66": b @ (A @ Ae),
        "t71": b @ c**5,
        "t72": b @ (c**3 * Ae),
        "t73": b @ (c**2 * Ac),
        "t74": b @ (c * Ae * Ae),
        "t75": b @ (c * (A @ Ae)),
        "t76": b @ (c * Ac2),
        "t77": b @ (Ae * Ac),
        "t78": b @ (A @ c**3),
        "t79": b @ (A @ (c * Ae)),
        "t7,10": b @ (A @ Ac),
    }


# tree -> (rho, rhs as coefficients of (phi_2, phi_4, phi_6))
CONDITIONS = {
    "t21": (2, (2, 0, 0)),
    "t31": (3, (0, 0, 0)),
    "t41": (4, (0, 4, 0)),
    "t42": (4, (0, 2, 0)),
    "t51": (5, (0, 0, 0)),
    "t52": (5, (0, 2, 0)),
    "t53": (5, (0, 0, 0)),
    "t61": (6, (0, 0, 48)),
    "t62": (6, (0, 0, 24)),
    "t63": (6, (0, -2 / 3, 8)),
    "t64": (6, (0, 1, 12)),
    "t65": (6, (0, 0, 4)),
    "t66": (6, (0, 0, 2)),
    "t71": (7, (0, 0, 0)),
    "t72": (7, (0, 0, 24)),
    "t73": (7, (0, 0, 0)),
    "t74": (7, (0, 0, 24)),
    "t75": (7, (0, -1 / 6, 4)),
    "t76": (7, (0, 1 / 3, 0)),
    "t77": (7, (0, -1 / 3, 4)),
    "t78": (7, (0, 0, 0)),
    "t79": (7, (0, 0, 2)),
    "t7,10": (7, (0, 0, 0)),
}


def residuals(tableau: Tableau, up_to_order: int = 7) -> list[ConditionResidual]:
    """Evaluate every tabulated condition with rho <= up_to_order."""
    if not 2 <= up_to_order <= 7:
        raise ValueError(f"up_to_order must lie in 2..7, got {up_to_order}")
    nu = tableau.nu
    phis = np.array([phi(2, nu), phi(4, nu), phi(6, nu)])
    lhs = _sums(tableau.c, tableau.A, tableau.b)
    out = []
    for tree, (rho, weights) in CONDITIONS.items():
        if rho > up_to_order:
            continue
        out.append(ConditionResidual(tree, rho, float(lhs[tree]), float(np.dot(weights, phis))))
    return out


def verify_order(tableau: Tableau, tol: float = ORDER_TOL) -> int:
    """Largest p <= 6 whose conditions (all rho <= p + 1) hold within ``tol``."""
    res = residuals(tableau, 7)
    p = 0
    for candidate in range(1, 7):
        if all(abs(r.residual) <= tol for r in res if r.rho <= candidate + 1):
            p = candidate
        else:
            break
    return p


def simplifying_check(tableau: Tableau) -> float:
    """Max-norm defect of the row-sum assumption A e = (c^2 + c)/2."""
    c = tableau.c
    return float(np.max(np.abs(tableau.A.sum(axis=1) - (c * c + c) / 2)))
