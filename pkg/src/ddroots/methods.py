"""Derivative-free iteration engines of local order 2, 4 and 6.

The base step replaces the Jacobian with a central divided difference on
(x + F(x), x - F(x)).  The higher-order steps share one combined operator
factorization, which is what makes the marginal cost of the third step a
single residual evaluation plus a triangular-pair solve.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from mpmath import mp, mpf

from .convergence import acoc as _acoc
from .convergence import correct_decimals as _correct_decimals
from .convergence import eta as _eta
from .core import (
    HPMatrix,
    HPVector,
    LUFactorization,
    OpCounters,
    PrecisionContext,
    SingularOperator,
    SolverError,
    inf_norm,
    lu_factor,
    lu_solve,
)
from .divdiff import (
    DegenerateDividedDifference,
    DividedDifferenceKind,
    NonlinearSystem,
    central_dd,
    operator_for,
)


class MaxIterationsExceeded(SolverError):
    """The iteration diverged, cycled, or ran out of its iteration budget."""


class MethodKind(str, enum.Enum):
    """The three iteration engines, by number of correction steps."""

    PHI0 = "phi0"
    PHI1 = "phi1"
    PHI2 = "phi2"


_ORDERS = {
    MethodKind.PHI0: {DividedDifferenceKind.D1: 2, DividedDifferenceKind.D2: 2},
    MethodKind.PHI1: {DividedDifferenceKind.D1: 3, DividedDifferenceKind.D2: 4},
    MethodKind.PHI2: {DividedDifferenceKind.D1: 4, DividedDifferenceKind.D2: 6},
}


def theoretical_order(method: MethodKind, dd_kind: DividedDifferenceKind) -> int:
    """Guaranteed local order of a (method, operator) pair.

    The one-sided operator only matches the Jacobian to first order in the
    step, which costs the two- and three-step methods one and two orders on
    systems with nonvanishing mixed second derivatives; the symmetrized
    operator preserves the design orders 2 / 4 / 6.
    """
    return _ORDERS[MethodKind(method)][DividedDifferenceKind(dd_kind)]


def expected_iteration_counts(
    method: MethodKind, dd_kind: DividedDifferenceKind, m: int
) -> tuple[int, int, int]:
    """(scalar evals, products, quotients) one outer iteration must cost.

    Products cover the LU factorizations and triangular solves plus, for the
    symmetrized operator, one product per entry for its constant one-half
    factor.  Quotients cover elimination, back substitution and the m^2
    difference quotients of each operator build.
    """
    method = MethodKind(method)
    dd_kind = DividedDifferenceKind(dd_kind)
    d2 = dd_kind is DividedDifferenceKind.D2
    lu_products = m * (m - 1) * (2 * m - 1) // 6 + m * (m - 1)
    lu_quotients = m * (m - 1) // 2 + m
    if method is MethodKind.PHI0:
        evals = m * (2 * m + 1) if d2 else m * (m + 2)
        products = lu_products + (m * m if d2 else 0)
        quotients = lu_quotients + m * m
    elif method is MethodKind.PHI1:
        evals = 4 * m * m if d2 else 2 * m * (m + 1)
        products = 2 * lu_products + (2 * m * m if d2 else 0)
        quotients = 2 * lu_quotients + 2 * m * m
    else:
        evals = m * (4 * m + 1) if d2 else m * (2 * m + 3)
        products = 2 * lu_products + m * (m - 1) + (2 * m * m if d2 else 0)
        quotients = 2 * lu_quotients + m + 2 * m * m
    return evals, products, quotients


@dataclass(frozen=True)
class IterationTrace:
    """Raw solve history: iterates, correction norms, ratios, counters.

    ``correction_norms[k]`` is ||x_{k+1} - x_k||_inf, ``ratios[k]`` the
    quotient of consecutive correction norms, and ``counter_deltas[k]`` the
    (evals, products, quotients) spent by outer iteration k + 1.
    """

    iterates: tuple
    correction_norms: tuple
    ratios: tuple
    counter_deltas: tuple

    def __post_init__(self) -> None:
        if len(self.correction_norms) != max(len(self.iterates) - 1, 0):
            raise ValueError("one correction norm per computed iterate required")
        if len(self.ratios) != max(len(self.iterates) - 2, 0):
            raise ValueError("ratios must have two fewer entries than iterates")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve, including the full trace for diagnostics."""

    converged: bool
    iterations: int
    final_iterate: HPVector
    trace: IterationTrace
    counters: OpCounters
    eta_used: float
    stop_reason: str
    acoc: Optional[mpf] = None
    correct_decimals: Optional[int] = None


def step_phi0(
    system: NonlinearSystem,
    x: HPVector,
    dd_kind: DividedDifferenceKind,
    counters: OpCounters,
) -> tuple[HPVector, LUFactorization, HPVector]:
    """Newton-like step with the central divided difference.

    Returns the new iterate together with the operator factorization and
    F(x), both of which the higher-order steps reuse.
    """
    op, fx = central_dd(system, x, dd_kind, counters)
    fact = lu_factor(op, counters)
    if fact.singular_flag:
        raise SingularOperator("central divided-difference operator is singular")
    correction = lu_solve(fact, fx, counters)
    return x - correction, fact, fx


def step_phi1(
    system: NonlinearSystem,
    x: HPVector,
    y: HPVector,
    fact_central: LUFactorization,
    fx: HPVector,
    dd_kind: DividedDifferenceKind,
    counters: OpCounters,
) -> tuple[HPVector, LUFactorization]:
    """Correction step z = y - M^{-1} F(y), M = 2 (dd on the iterate pair) - central.

    The iterate-pair operator is oriented from the newer iterate back to x,
    mirroring the central operator's orientation; for the one-sided kind the
    two orientations differ in second-order terms and this is the one the
    published accuracy columns pin down.  F(x) and F(y) are supplied to the
    build so only mixed-coordinate points cost fresh evaluations.  Returns z
    and the factorization of M, which the third step reuses verbatim.
    """
    fy = system.eval(y, counters)
    op_pair = operator_for(dd_kind)(system, x, y, counters, fx=fy, fy=fx)
    central = fact_central.matrix
    # doubling is a shift-add, not a counted product
    combined = HPMatrix(
        (2 * b - a for b, a in zip(rb, ra))
        for rb, ra in zip(op_pair.rows, central.rows)
    )
    fact_nu = lu_factor(combined, counters)
    if fact_nu.singular_flag:
        raise SingularOperator("combined second-step operator is singular")
    correction = lu_solve(fact_nu, fy, counters)
    return y - correction, fact_nu


def step_phi2(
    system: NonlinearSystem,
    z: HPVector,
    fact_nu: LUFactorization,
    counters: OpCounters,
) -> HPVector:
    """Extra correction X = z - M^{-1} F(z) reusing the second-step factorization.

    Marginal cost per iteration: m scalar evaluations, m(m-1) products and
    m quotients.
    """
    fz = system.eval(z, counters)
    correction = lu_solve(fact_nu, fz, counters)
    return z - correction


def _outer_step(
    system: NonlinearSystem,
    x: HPVector,
    method: MethodKind,
    dd_kind: DividedDifferenceKind,
    counters: OpCounters,
) -> HPVector:
    y, fact_central, fx = step_phi0(system, x, dd_kind, counters)
    if method is MethodKind.PHI0:
        return y
    z, fact_nu = step_phi1(system, x, y, fact_central, fx, dd_kind, counters)
    if method is MethodKind.PHI1:
        return z
    return step_phi2(system, z, fact_nu, counters)


def solve(
    system: NonlinearSystem,
    x0: HPVector,
    method: MethodKind,
    dd_kind: DividedDifferenceKind,
    ctx: PrecisionContext,
    max_iters: int = 200,
    order_hint: Optional[float] = None,
    eta_override: Optional[float] = None,
) -> SolveReport:
    """Iterate the chosen method from x0 until the correction ratios collapse.

    Stopping is root-free: with corrections e_k = x_k - x_{k-1} and ratios
    E_k = ||e_k|| / ||e_{k-1}||, the run ends at the first iteration whose
    ratio drops to 0.5 * 10^(-eta), eta = (rho - 1) / rho^2 * digits.  That
    final iteration only confirms that its predecessor had converged, so the
    report counts the iterations up to the confirmed iterate and returns it;
    the trace keeps the confirming step for order estimation.

    ``order_hint`` overrides the order used for eta (systems whose mixed
    second derivatives vanish keep the design orders even with the one-sided
    operator); ``eta_override`` pins eta directly.  A degenerate divided
    difference means a residual component underflowed, which is reported as
    convergence on the trace accumulated so far.
    """
    method = MethodKind(method)
    dd_kind = DividedDifferenceKind(dd_kind)
    if max_iters < 2:
        raise ValueError("max_iters must be at least 2")
    counters = OpCounters()
    with ctx.activate():
        rho = order_hint if order_hint is not None else theoretical_order(method, dd_kind)
        eta_used = float(eta_override) if eta_override is not None else _eta(rho, ctx.digits)
        threshold = mpf("0.5") * mpf(10) ** (-mpf(eta_used))
        x = HPVector(x0)
        iterates = [x]
        corr_norms: list = []
        ratios: list = []
        deltas: list = []
        stop_reason = None
        growth_streak = 0
        for _ in range(max_iters):
            before = counters.snapshot()
            try:
                x_next = _outer_step(system, x, method, dd_kind, counters)
            except DegenerateDividedDifference:
                stop_reason = "residual_underflow"
                break
            after = counters.snapshot()
            deltas.append(tuple(a - b for a, b in zip(after, before)))
            iterates.append(x_next)
            c = inf_norm(x_next - x)
            corr_norms.append(c)
            if c == 0:
                stop_reason = "exact_repeat"
                break
            if len(corr_norms) >= 2:
                ratio = c / corr_norms[-2]
                ratios.append(ratio)
                if ratio <= threshold:
                    stop_reason = "ratio"
                    break
                if ratio >= 1:
                    growth_streak += 1
                    if growth_streak >= 3:
                        raise MaxIterationsExceeded(
                            "correction norms failed to contract for 3 "
                            "consecutive iterations"
                        )
                else:
                    growth_streak = 0
            x = x_next
        if stop_reason is None:
            raise MaxIterationsExceeded(
                f"no convergence within {max_iters} iterations "
                f"(last ratio {mp.nstr(ratios[-1], 8) if ratios else 'n/a'})"
            )
        if stop_reason == "ratio":
            # the last iteration only confirmed its predecessor
            final = iterates[-2]
            iterations = len(iterates) - 2
        else:
            final = iterates[-1]
            iterations = len(iterates) - 1
        trace = IterationTrace(
            iterates=tuple(iterates),
            correction_norms=tuple(corr_norms),
            ratios=tuple(ratios),
            counter_deltas=tuple(deltas),
        )
        acoc_value = None
        try:
            acoc_value = _acoc(trace).rho_hat
        except SolverError:
            pass
        q = None
        if system.reference_root is not None:
            q = _correct_decimals(final, system.reference_root)
        return SolveReport(
            converged=True,
            iterations=iterations,
            final_iterate=final,
            trace=trace,
            counters=counters,
            eta_used=eta_used,
            stop_reason=stop_reason,
            acoc=acoc_value,
            correct_decimals=q,
        )
