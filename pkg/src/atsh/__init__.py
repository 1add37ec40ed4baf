"""Adapted two-step hybrid (ATSH) methods for perturbed oscillators y'' = -omega^2 y + g(x, y)."""

from .integrator import (
    ExactUnavailable,
    IntegrationResult,
    NonFiniteState,
    Problem,
    StarterMode,
    TwoStepState,
    convergence_order,
    integrate,
    start_value,
    step,
)
from .methods import (
    ADAPTED_METHODS,
    ATSH4_ZD,
    ATSH5_MINERR,
    ATSH5_PL8,
    NUMEROV4,
    Family,
    MethodId,
    SingularCoefficient,
    Tableau,
    build,
)
from .order_conditions import residuals, simplifying_check, verify_order
from .phi import PhiTable, g_function, phi, phi_table
from .problems import BenchmarkId, make_problem, reference_solution
from .stability import (
    classify,
    ck_uk,
    estimate_leading,
    phase_point,
    s_and_p,
    scan_region,
)

__version__ = "0.1.0"
