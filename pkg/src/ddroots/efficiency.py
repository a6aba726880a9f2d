"""Closed-form cost model, efficiency indices, and region comparisons.

Per-iteration cost is C = a(m) * mu + p(m, ell) in product units, where mu
prices one scalar-function evaluation and ell one quotient.  The efficiency
index CEI = rho^(1/C) trades local order against cost; boundary curves in
the (m, mu) plane separate the regions where competing method/operator
pairs win.  Everything here is computed in the active mpmath precision so
table comparisons are exact rather than float-lucky.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from mpmath import mp, mpf

from .core import SolverError, working_eps
from .divdiff import DividedDifferenceKind
from .methods import MethodKind, theoretical_order

Real = Union[int, float, str, mpf]


class PoleAtAsymptote(SolverError):
    """A boundary curve was evaluated at its vertical asymptote."""


def as_mpf(value: Real) -> mpf:
    """Convert to mpf, reading floats through their shortest decimal repr.

    Cost parameters like 87.8 are decimal by intent; going through repr()
    keeps 35 * 87.8 equal to 3073 exactly instead of picking up binary
    float dust.
    """
    if isinstance(value, (int, str)):
        return mpf(value)
    if isinstance(value, float):
        return mpf(repr(value))
    return mpf(value)


@dataclass(frozen=True)
class CostModel:
    """Parameters of one method/operator pair on an m-dimensional system."""

    m: int
    mu: Real
    ell: Real
    method: MethodKind
    dd_kind: DividedDifferenceKind

    def __post_init__(self) -> None:
        if self.m < 2:
            raise ValueError("cost model requires dimension m >= 2")
        if float(as_mpf(self.mu)) <= 0:
            raise ValueError("mu must be positive")
        if float(as_mpf(self.ell)) < 1:
            raise ValueError("ell must be at least 1")


@dataclass(frozen=True)
class ElementaryCostTable:
    """Cost of elementary functions in product units (product = 1)."""

    costs: Mapping[str, float] = field(
        default_factory=lambda: {
            "product": 1,
            "quotient": 2.5,
            "sqrt": 1.7,
            "exp": 87.8,
            "ln": 66,
            "sin": 116,
            "cos": 113,
            "arctan": 228,
        }
    )

    def __post_init__(self) -> None:
        if self.costs.get("product") != 1:
            raise ValueError("a product must cost exactly 1 product unit")
        if any(c <= 0 for c in self.costs.values()):
            raise ValueError("all elementary costs must be positive")

    def __getitem__(self, op: str) -> float:
        return self.costs[op]


DEFAULT_COST_TABLE = ElementaryCostTable()


def scalar_evals(method: MethodKind, dd_kind: DividedDifferenceKind, m: int) -> int:
    """a(m): scalar-function evaluations per outer iteration in the cost model.

    The base method needs only one operator build, so its cost is quoted for
    the one-sided kind regardless of ``dd_kind``.
    """
    method = MethodKind(method)
    d2 = DividedDifferenceKind(dd_kind) is DividedDifferenceKind.D2
    if method is MethodKind.PHI0:
        return m * (m + 2)
    if method is MethodKind.PHI1:
        return 4 * m * m if d2 else 2 * m * (m + 1)
    return m * (4 * m + 1) if d2 else m * (2 * m + 3)


def product_count(method: MethodKind, m: int) -> int:
    """Products per outer iteration (factorizations plus triangular solves)."""
    method = MethodKind(method)
    if method is MethodKind.PHI0:
        return m * (2 * m * m + 3 * m - 5) // 6
    if method is MethodKind.PHI1:
        return m * (2 * m * m + 3 * m - 5) // 3
    return m * (2 * m * m + 6 * m - 8) // 3


def quotient_count(method: MethodKind, m: int) -> int:
    """Quotients per outer iteration (elimination, substitution, operators)."""
    method = MethodKind(method)
    if method is MethodKind.PHI0:
        return m * (3 * m + 1) // 2
    if method is MethodKind.PHI1:
        return m * (3 * m + 1)
    return m * (3 * m + 2)


def cost(model: CostModel) -> mpf:
    """Closed-form per-iteration cost C(mu, m, ell) in product units."""
    mu = as_mpf(model.mu)
    ell = as_mpf(model.ell)
    m = model.m
    return (
        scalar_evals(model.method, model.dd_kind, m) * mu
        + product_count(model.method, m)
        + ell * quotient_count(model.method, m)
    )


def cei(rho: Real, c: Real) -> mpf:
    """Computational efficiency index rho^(1/C)."""
    rho_v = as_mpf(rho)
    c_v = as_mpf(c)
    if rho_v < 2:
        raise ValueError("order must be at least 2")
    if c_v <= 0:
        raise ValueError("cost must be positive")
    return mp.power(rho_v, 1 / c_v)


def time_factor(cei_value: Real) -> mpf:
    """Hardware-free runtime proxy 1 / log10(CEI)."""
    v = as_mpf(cei_value)
    if v <= 1:
        raise ValueError("CEI must exceed 1")
    return 1 / mp.log10(v)


def ratio(
    model_a: CostModel,
    model_b: CostModel,
    order_a: Optional[Real] = None,
    order_b: Optional[Real] = None,
) -> mpf:
    """Efficiency ratio log(CEI_a)/log(CEI_b) = log(rho_a) C_b / (log(rho_b) C_a).

    Values above 1 mean the first pair is the more efficient one.  Orders
    default to the guaranteed orders of each (method, operator) pair; pass
    them explicitly to compare under order-preserving assumptions.
    """
    if (model_a.m, as_mpf(model_a.mu), as_mpf(model_a.ell)) != (
        model_b.m,
        as_mpf(model_b.mu),
        as_mpf(model_b.ell),
    ):
        raise ValueError("ratio requires both models to share (m, mu, ell)")
    rho_a = as_mpf(
        order_a if order_a is not None else theoretical_order(model_a.method, model_a.dd_kind)
    )
    rho_b = as_mpf(
        order_b if order_b is not None else theoretical_order(model_b.method, model_b.dd_kind)
    )
    return (mp.log(rho_a) * cost(model_b)) / (mp.log(rho_b) * cost(model_a))


# Named comparisons: (method, dd kind, local order) for each side.  The
# one-sided entries appear twice where it matters: with their design order
# (order-preserving systems) and with the degraded order 3 or 4.
COMPARISONS: dict[str, tuple[tuple, tuple]] = {
    # design-order comparisons within the one-sided family
    "t3_phi2_phi1": (
        (MethodKind.PHI2, DividedDifferenceKind.D1, 6),
        (MethodKind.PHI1, DividedDifferenceKind.D1, 4),
    ),
    "t3_phi1_phi0": (
        (MethodKind.PHI1, DividedDifferenceKind.D1, 4),
        (MethodKind.PHI0, DividedDifferenceKind.D1, 2),
    ),
    "t3_phi2_phi0": (
        (MethodKind.PHI2, DividedDifferenceKind.D1, 6),
        (MethodKind.PHI0, DividedDifferenceKind.D1, 2),
    ),
    # symmetrized-operator family
    "d2_phi2_phi1": (
        (MethodKind.PHI2, DividedDifferenceKind.D2, 6),
        (MethodKind.PHI1, DividedDifferenceKind.D2, 4),
    ),
    "d2_phi1_phi0": (
        (MethodKind.PHI1, DividedDifferenceKind.D2, 4),
        (MethodKind.PHI0, DividedDifferenceKind.D1, 2),
    ),
    # boundary-curve comparisons (degraded one-sided orders)
    "g20": (
        (MethodKind.PHI2, DividedDifferenceKind.D2, 6),
        (MethodKind.PHI0, DividedDifferenceKind.D1, 2),
    ),
    "g22": (
        (MethodKind.PHI2, DividedDifferenceKind.D2, 6),
        (MethodKind.PHI2, DividedDifferenceKind.D1, 4),
    ),
    "g11": (
        (MethodKind.PHI1, DividedDifferenceKind.D2, 4),
        (MethodKind.PHI1, DividedDifferenceKind.D1, 3),
    ),
    "d1_phi2_phi0_degraded": (
        (MethodKind.PHI2, DividedDifferenceKind.D1, 4),
        (MethodKind.PHI0, DividedDifferenceKind.D1, 2),
    ),
    "d1_phi1_phi0_degraded": (
        (MethodKind.PHI1, DividedDifferenceKind.D1, 3),
        (MethodKind.PHI0, DividedDifferenceKind.D1, 2),
    ),
}

BOUNDARY_TOLERANCE = mpf("1e-12")


def comparison_ratio(pair: str, m: int, mu: Real, ell: Real) -> mpf:
    spec_a, spec_b = COMPARISONS[pair]
    model_a = CostModel(m, mu, ell, spec_a[0], spec_a[1])
    model_b = CostModel(m, mu, ell, spec_b[0], spec_b[1])
    return ratio(model_a, model_b, order_a=spec_a[2], order_b=spec_b[2])


def classify_region(pair: str, m: int, mu: Real, ell: Real) -> str:
    """Which side of a named comparison wins at (m, mu, ell).

    Returns "first_wins", "second_wins", or "boundary" when the efficiency
    ratio sits within 1e-12 of 1.
    """
    r = comparison_ratio(pair, m, mu, ell)
    if abs(r - 1) <= BOUNDARY_TOLERANCE:
        return "boundary"
    return "first_wins" if r > 1 else "second_wins"


def boundary_g(which: str, m: Real, ell: Real) -> mpf:
    """mu on the equal-efficiency boundary of the named comparison.

    ``which`` is one of g20, g22, g11 (comparisons of the sixth- and
    fourth-order symmetrized pairs against the base method and against their
    degraded one-sided counterparts).
    """
    which = which.lower()
    m_v = as_mpf(m)
    ell_v = as_mpf(ell)
    q = mp.log(mpf(3) / 2)
    r = mp.log(mpf(8) / 3)
    s = mp.log(mpf(4) / 3)
    t = mp.log(2)
    if which == "g20":
        num = 2 * q * m_v**2 + 3 * (3 * q * ell_v - r) * m_v - 3 * r * ell_v - (2 * q - 3 * r)
        den = 2 * r * m_v - (7 * q + 3 * r)
        scale = mpf(1) / 3
    elif which == "g22":
        num = 2 * q * m_v**2 + 3 * q * (3 * ell_v + 2) * m_v + 6 * q * ell_v - 8 * q
        den = 2 * r * m_v - (5 * q + 2 * r)
        scale = mpf(1) / 3
    elif which == "g11":
        num = 2 * s * m_v**2 + 3 * s * (3 * ell_v + 1) * m_v + 3 * s * ell_v - 5 * s
        den = (t - s) * m_v - t
        scale = mpf(1) / 12
    else:
        raise ValueError(f"unknown boundary curve {which!r}")
    if abs(den) < working_eps():
        raise PoleAtAsymptote(f"{which} evaluated at its vertical asymptote")
    return scale * num / den


_ASYMPTOTE_PAIRS = {
    "g20": "g20",
    "g22": "g22",
    "g11": "g11",
    "t3_phi2_phi1": "t3_phi2_phi1",
    "d2_phi2_phi1": "d2_phi2_phi1",
}


def _mu_coefficient_gap(pair: str, m: mpf) -> mpf:
    """Coefficient of mu in log(rho_a) C_b - log(rho_b) C_a, scaled by 1/m."""
    spec_a, spec_b = COMPARISONS[pair]
    rho_a, rho_b = mpf(spec_a[2]), mpf(spec_b[2])

    def evals_per_m(spec):
        method, dd, _ = spec
        method = MethodKind(method)
        d2 = DividedDifferenceKind(dd) is DividedDifferenceKind.D2
        if method is MethodKind.PHI0:
            return m + 2
        if method is MethodKind.PHI1:
            return 4 * m if d2 else 2 * (m + 1)
        return (4 * m + 1) if d2 else (2 * m + 3)

    return mp.log(rho_a) * evals_per_m(spec_b) - mp.log(rho_b) * evals_per_m(spec_a)


def asymptote_m(which: str, lo: float = 0.05, hi: float = 10.0) -> mpf:
    """Vertical asymptote of a boundary curve, by root-finding in m.

    Solves for the dimension at which the mu-coefficient of the balanced
    efficiency equation vanishes (there the boundary mu(m) blows up).
    Bisection on [lo, hi]; raises if no sign change is bracketed.
    """
    pair = _ASYMPTOTE_PAIRS[which.lower()]
    a, b = mpf(lo), mpf(hi)
    fa, fb = _mu_coefficient_gap(pair, a), _mu_coefficient_gap(pair, b)
    if fa * fb > 0:
        raise ValueError(f"no asymptote bracketed in [{lo}, {hi}] for {which}")
    for _ in range(300):
        mid = (a + b) / 2
        fm = _mu_coefficient_gap(pair, mid)
        if fm == 0:
            return mid
        if fa * fm < 0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return (a + b) / 2


def estimate_mu(
    profile: Mapping[str, int],
    table: ElementaryCostTable = DEFAULT_COST_TABLE,
    m: int = 1,
) -> float:
    """Products-per-scalar-evaluation ratio from an operation profile.

    ``profile`` counts elementary operations in one full evaluation of F;
    the total product-unit cost divided by m prices one scalar component.
    """
    if m < 1:
        raise ValueError("dimension must be at least 1")
    if any(count < 0 for count in profile.values()):
        raise ValueError("operation counts must be non-negative")
    total = sum(count * table[op] for op, count in profile.items())
    return total / m
