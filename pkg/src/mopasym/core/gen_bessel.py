"""
The generalized Bessel function 0Fr(-; alpha_1+1, ..., alpha_r+1; z).

Provides the r+1 fundamental solutions of
    Theta (Theta + alpha_1) ... (Theta + alpha_r) y = z y,   Theta = z d/dz,
termwise checks of that equation and of the two differentiation formulas, the
Bessel function J_alpha through its 0F1 form, and Wright's entire function
phi(z) = sum z^k / (Gamma(rho k + beta) k!) together with its reduction to
0Fr through the gamma multiplication formula.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Literal, Sequence, Tuple

import mpmath

from mopasym.core.errors import DegenerateParameters, InvalidParameters, OutOfDomain
from mopasym.core.hypergeom import (
    HypSeriesSpec,
    hyp0f,
    pfq_coefficients,
    sum_power_series,
    sum_series,
)
from mopasym.core.precision import (
    Number,
    PrecisionContext,
    is_exact,
    is_integer,
    is_nonpositive_integer,
    to_mpf,
    unify,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenBesselSpec:
    """Parameters (alpha_1, ..., alpha_r) of 0Fr(-; alpha+1; z)."""

    alphas: Tuple[Number, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not self.alphas:
            raise InvalidParameters("at least one alpha is required")
        values = tuple(unify(*self.alphas))
        object.__setattr__(self, "alphas", values)

    @property
    def r(self) -> int:
        return len(self.alphas)

    @property
    def den_params(self) -> Tuple[Number, ...]:
        return tuple(a + 1 for a in self.alphas)

    def check_fundamental(self, ctx: PrecisionContext) -> None:
        """No alpha_j integer and no alpha_i - alpha_j integer."""
        for j, a in enumerate(self.alphas):
            if is_integer(a, ctx):
                raise DegenerateParameters(f"alpha_{j + 1} = {a} is an integer")
            for b in self.alphas[j + 1:]:
                if is_integer(a - b, ctx):
                    raise DegenerateParameters(f"alpha difference {a} - {b} is an integer")

    def shifted_den_params(self, j: int) -> Tuple[Number, ...]:
        """Denominators of y_j: 1 - alpha_j followed by 1 + alpha_i - alpha_j, i != j."""
        aj = self.alphas[j - 1]
        rest = tuple(1 + a - aj for i, a in enumerate(self.alphas, start=1) if i != j)
        return (1 - aj,) + rest


@dataclass(frozen=True)
class WrightSpec:
    rho: Number
    beta: Number

    def __post_init__(self) -> None:
        rho = Fraction(self.rho) if isinstance(self.rho, int) else self.rho
        beta = Fraction(self.beta) if isinstance(self.beta, int) else self.beta
        if rho <= 0:
            raise InvalidParameters(f"rho must be positive, got {rho}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class ShiftedSeries:
    """y(z) = z^sigma * sum coeffs[k] z^k."""

    coeffs: List[Number]
    sigma: Number


@dataclass(frozen=True)
class DerivativeDefects:
    first: Number
    second: Number


# ============================================================================
# Fundamental solutions
# ============================================================================


def eval_y0(spec: GenBesselSpec, z: Any, ctx: PrecisionContext) -> Number:
    """y_0(z) = 0Fr(-; alpha_1+1, ..., alpha_r+1; z)."""
    return hyp0f(spec.den_params, z, ctx)


def eval_yj(spec: GenBesselSpec, j: int, z: Any, ctx: PrecisionContext) -> Number:
    """y_j(z) = z^(-alpha_j) 0Fr(-; 1-alpha_j, ..., *, ..., 1+alpha_r-alpha_j; z) for z > 0."""
    if not 1 <= j <= spec.r:
        raise InvalidParameters(f"solution index j must lie in 1..{spec.r}, got {j}")
    spec.check_fundamental(ctx)
    with ctx.workdps():
        if to_mpf(z) <= 0:
            raise OutOfDomain("y_j is evaluated on the principal branch, z > 0")
    series = hyp0f(spec.shifted_den_params(j), z, ctx)
    with ctx.workdps():
        return mpmath.power(to_mpf(z), -to_mpf(spec.alphas[j - 1])) * to_mpf(series)


def y0_series(spec: GenBesselSpec, terms: int) -> ShiftedSeries:
    coeffs = pfq_coefficients(HypSeriesSpec((), spec.den_params), terms + 1)
    return ShiftedSeries(coeffs=coeffs, sigma=Fraction(0) if is_exact(*spec.alphas) else mpmath.mpf(0))


def yj_series(spec: GenBesselSpec, j: int, terms: int) -> ShiftedSeries:
    coeffs = pfq_coefficients(HypSeriesSpec((), spec.shifted_den_params(j)), terms + 1)
    return ShiftedSeries(coeffs=coeffs, sigma=-spec.alphas[j - 1])


def ode_residual(coeffs: Sequence[Number], sigma: Number, spec: GenBesselSpec, terms: int) -> Number:
    """
    max_k |c_k (k+sigma) prod_j (k+sigma+alpha_j) - c_{k-1}| for 0 <= k <= terms.

    Uses Theta z^m = m z^m termwise; exactly 0 for solutions in rational mode.
    """
    worst: Any = Fraction(0) if is_exact(sigma, *spec.alphas, *coeffs) else mpmath.mpf(0)
    previous: Any = 0
    for k in range(min(terms, len(coeffs) - 1) + 1):
        m = sigma + k
        factor = m
        for a in spec.alphas:
            factor *= m + a
        defect = abs(coeffs[k] * factor - previous)
        if defect > worst:
            worst = defect
        previous = coeffs[k]
    return worst


# ============================================================================
# Differentiation formulas
# ============================================================================


class _CoefficientStream:
    """Lazily extended Taylor coefficients of 0Fr(-; den; z)."""

    def __init__(self, den: Sequence[Number]):
        self.spec = HypSeriesSpec((), tuple(den))
        self.values: List[Number] = []

    def __call__(self, k: int) -> Number:
        if len(self.values) <= k:
            self.values = pfq_coefficients(self.spec, max(2 * len(self.values), k + 1))
        return self.values[k]


def check_derivative_identities(spec: GenBesselSpec, z: Any, ctx: PrecisionContext) -> DerivativeDefects:
    """
    Numerical defects of the two differentiation formulas at z.

    first:  d/dz 0Fr(alpha+1; z) vs 0Fr(alpha+2; z) / prod(alpha_j+1)
    second: d/dz z^{alpha_j} 0Fr(alpha+1; z) vs alpha_j z^{alpha_j-1} 0Fr(.., alpha_j, ..; z),
            with the common factor z^{alpha_j-1} divided out; max over j with alpha_j != 0.
    Left sides are the termwise-differentiated series.
    """
    stream = _CoefficientStream(spec.den_params)
    lhs1 = sum_power_series(lambda k: (k + 1) * stream(k + 1), z, ctx).value
    with ctx.workdps():
        norm = mpmath.mpf(1)
        for b in spec.den_params:
            norm *= to_mpf(b)
    rhs1 = to_mpf(hyp0f(tuple(a + 2 for a in spec.alphas), z, ctx))
    with ctx.workdps():
        first = abs(to_mpf(lhs1) - rhs1 / norm)
    second = mpmath.mpf(0)
    for j, aj in enumerate(spec.alphas):
        if aj == 0 or is_nonpositive_integer(aj, ctx):
            continue
        lhs2 = sum_power_series(lambda k, aj=aj: stream(k) * (k + aj), z, ctx).value
        lowered = tuple(aj if i == j else a + 1 for i, a in enumerate(spec.alphas))
        rhs2 = hyp0f(lowered, z, ctx)
        with ctx.workdps():
            defect = abs(to_mpf(lhs2) - to_mpf(aj) * to_mpf(rhs2))
            if defect > second:
                second = defect
    return DerivativeDefects(first=first, second=second)


def derivative_identity_coefficient_defects(spec: GenBesselSpec, terms: int) -> DerivativeDefects:
    """The same identities compared as formal power series up to z^terms (exact in rational mode)."""
    c = pfq_coefficients(HypSeriesSpec((), spec.den_params), terms + 2)
    d = pfq_coefficients(HypSeriesSpec((), tuple(a + 2 for a in spec.alphas)), terms + 1)
    norm: Any = 1
    for b in spec.den_params:
        norm *= b
    first: Any = max(abs((k + 1) * c[k + 1] - d[k] / norm) for k in range(terms + 1))
    second: Any = 0
    for j, aj in enumerate(spec.alphas):
        if aj == 0 or is_nonpositive_integer(aj):
            continue
        lowered = tuple(aj if i == j else a + 1 for i, a in enumerate(spec.alphas))
        e = pfq_coefficients(HypSeriesSpec((), lowered), terms + 1)
        defect = max(abs(c[k] * (k + aj) - aj * e[k]) for k in range(terms + 1))
        if defect > second:
            second = defect
    return DerivativeDefects(first=first, second=second)


# ============================================================================
# Bessel J and the Wright function
# ============================================================================


def bessel_j(alpha: Number, t: Any, ctx: PrecisionContext) -> Number:
    """J_alpha(t) = (t/2)^alpha / Gamma(alpha+1) * 0F1(-; alpha+1; -t^2/4), t > 0."""
    with ctx.workdps():
        tv = to_mpf(t)
        argument = -tv * tv / 4
    series = to_mpf(hyp0f((alpha + 1,), argument, ctx))
    with ctx.workdps():
        a = to_mpf(alpha)
        return mpmath.power(tv / 2, a) * mpmath.rgamma(a + 1) * series


def wright_multiplication_constant(spec: WrightSpec, ctx: PrecisionContext) -> Number:
    """C with phi(z) = C * 0Fr(-; beta/r, ..., (beta+r-1)/r; z/r^r) for integer rho = r."""
    r = int(spec.rho)
    with ctx.workdps():
        beta = to_mpf(spec.beta)
        constant = mpmath.power(2 * mpmath.pi, mpmath.mpf(r - 1) / 2) * mpmath.power(r, mpmath.mpf(1) / 2 - beta)
        for j in range(r):
            constant *= mpmath.rgamma((beta + j) / r)
        return constant


def _wright_den_params(spec: WrightSpec) -> Tuple[Number, ...]:
    r = int(spec.rho)
    return tuple((spec.beta + j) / r for j in range(r))


def _hypergeometric_route_available(spec: WrightSpec, ctx: PrecisionContext) -> bool:
    if not is_exact(spec.rho) or Fraction(spec.rho).denominator != 1:
        return False
    return not any(is_nonpositive_integer(b, ctx) for b in _wright_den_params(spec))


def wright_phi(
    spec: WrightSpec,
    z: Any,
    ctx: PrecisionContext,
    method: Literal["auto", "series", "hypergeometric"] = "auto",
) -> Number:
    """phi(z) = sum_k z^k / (Gamma(rho k + beta) k!)."""
    if method == "hypergeometric" or (method == "auto" and _hypergeometric_route_available(spec, ctx)):
        if not _hypergeometric_route_available(spec, ctx):
            raise InvalidParameters("the 0Fr route needs an integer rho and no poles in its parameters")
        r = int(spec.rho)
        value = hyp0f(_wright_den_params(spec), Fraction(z) / r ** r if is_exact(z) else to_mpf(z) / r ** r, ctx)
        with ctx.workdps():
            return wright_multiplication_constant(spec, ctx) * to_mpf(value)

    with ctx.workdps():
        rho0 = to_mpf(spec.rho)
        beta0 = to_mpf(spec.beta)
        start = max(0, int(mpmath.ceil(-beta0 / rho0)) + 1)

    def first() -> Number:
        return mpmath.rgamma(to_mpf(spec.beta))

    def next_term(_: Number, k: int) -> Number:
        m = k + 1
        rho = to_mpf(spec.rho)
        beta = to_mpf(spec.beta)
        return mpmath.power(to_mpf(z), m) * mpmath.rgamma(rho * m + beta) / mpmath.factorial(m)

    return sum_series(first, next_term, ctx, min_terms=start).value
