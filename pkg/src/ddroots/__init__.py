"""Derivative-free solving of nonlinear systems in arbitrary precision.

Three iteration engines of local order 2, 4 and 6 built on divided-
difference operators, with exact operation counting, a root-free stopping
rule and order estimator, a product-unit cost/efficiency model, and a
benchmark harness for the three reference systems.
"""
from .benchmark import (
    BenchmarkRow,
    CheckResult,
    RunConfig,
    export_boundary_curves,
    run_benchmark,
    run_row,
)
from .convergence import (
    InsufficientTrace,
    MissingReferenceRoot,
    NonContractingTrace,
    OrderEstimate,
    acoc,
    correct_decimals,
    eta,
)
from .core import (
    HPMatrix,
    HPVector,
    LUFactorization,
    OpCounters,
    PrecisionContext,
    SingularOperator,
    SolverError,
    from_decimal,
    inf_norm,
    lu_factor,
    lu_solve,
    mat_inf_norm,
    to_decimal,
)
from .divdiff import (
    DegenerateDividedDifference,
    DividedDifferenceKind,
    NonlinearSystem,
    central_dd,
    check_potra,
    check_secant,
    check_symmetry,
    dd_d1,
    dd_d2,
    integral_dd_oracle,
)
from .efficiency import (
    CostModel,
    ElementaryCostTable,
    PoleAtAsymptote,
    boundary_g,
    cei,
    classify_region,
    cost,
    estimate_mu,
    ratio,
    time_factor,
)
from .methods import (
    IterationTrace,
    MaxIterationsExceeded,
    MethodKind,
    SolveReport,
    expected_iteration_counts,
    solve,
    step_phi0,
    step_phi1,
    step_phi2,
    theoretical_order,
)
from .problems import REGISTRY, ExpectedRow, ProblemSpec, generate_reference_root

__version__ = "0.1.0"

__all__ = [
    "BenchmarkRow",
    "CheckResult",
    "CostModel",
    "DegenerateDividedDifference",
    "DividedDifferenceKind",
    "ElementaryCostTable",
    "ExpectedRow",
    "HPMatrix",
    "HPVector",
    "InsufficientTrace",
    "IterationTrace",
    "LUFactorization",
    "MaxIterationsExceeded",
    "MethodKind",
    "MissingReferenceRoot",
    "NonContractingTrace",
    "NonlinearSystem",
    "OpCounters",
    "OrderEstimate",
    "PoleAtAsymptote",
    "PrecisionContext",
    "ProblemSpec",
    "REGISTRY",
    "RunConfig",
    "SingularOperator",
    "SolveReport",
    "SolverError",
    "acoc",
    "boundary_g",
    "cei",
    "central_dd",
    "check_potra",
    "check_secant",
    "check_symmetry",
    "classify_region",
    "correct_decimals",
    "cost",
    "dd_d1",
    "dd_d2",
    "estimate_mu",
    "eta",
    "expected_iteration_counts",
    "export_boundary_curves",
    "from_decimal",
    "generate_reference_root",
    "inf_norm",
    "integral_dd_oracle",
    "lu_factor",
    "lu_solve",
    "mat_inf_norm",
    "ratio",
    "run_benchmark",
    "run_row",
    "solve",
    "step_phi0",
    "step_phi1",
    "step_phi2",
    "theoretical_order",
    "time_factor",
    "to_decimal",
]
