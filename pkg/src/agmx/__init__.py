"""Accelerated gradient methods for strongly convex minimization.

Solvers (GD, NAG, TM, and the Hessian-driven family), seeded benchmark
problems, and numerical certification of the Lyapunov contraction theory.
"""

from .analysis import (
    ComparisonRow,
    RateEstimate,
    RateRegime,
    compare,
    ensure_minimizer,
    estimate_rate,
    find_minimizer,
    theoretical_rate,
)
from .core import (
    ObjectiveLike,
    ShiftedObjective,
    SimpleObjective,
    Vector,
    bregman,
    bregman_asymmetry,
    grad_step,
)
from .lyapunov import (
    ContractionReport,
    ContractionTheorem,
    LyapunovKind,
    ShiftSchedule,
    asymmetry_bound_check,
    contraction_residuals,
    lyapunov,
    shift_schedule,
    strong_lyapunov_residual,
    strong_lyapunov_terms,
)
from .problems import (
    LogisticObjective,
    PiecewiseSmoothObjective,
    QuadraticObjective,
    Rng,
    build_laplacian2d,
    build_logistic,
    build_piecewise,
    check_gradient,
    estimate_extreme_eigs,
    rebuild,
)
from .solvers import (
    DivergenceError,
    MethodKind,
    MethodParams,
    SolverConfig,
    SolverState,
    TerminalStatus,
    Trace,
    forms_deviation,
    make_params,
    parse_method,
    solve,
    step,
)

__version__ = "0.1.0"
