"""
Moment catalogs and the moment-oracle construction of multiple orthogonal polynomials.

A catalog knows, for one family, the normalized moments m_{j,k}/m_{j,0} of each
weight w_j and how many orthogonality conditions a multi-index puts on each
weight. ``construct_mop`` turns that into the |n| x |n| linear system
    sum_i a_i m_{j,k+i} = -m_{j,k+|n|},   0 <= k < n_j,
and solves it exactly when every moment is rational.

Each closed-form entry can be checked against adaptive quadrature of the weight
(``quadrature_moment``); quadrature is never used on the construction path.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import mpmath

from mopasym.core.errors import InvalidParameters, NonIntegrable, SingularMomentMatrix
from mopasym.core.hypergeom import HypSeriesSpec, eval_pfq
from mopasym.core.linalg import solve_linear
from mopasym.core.precision import (
    BigPoly,
    MultiIndex,
    Number,
    PrecisionContext,
    format_value,
    is_exact,
    is_nonpositive_integer,
    pochhammer,
    to_mpf,
)
from mopasym.core.schema import (
    FamilySpec,
    IBesselSpec,
    JacobiAngelescoSpec,
    JacobiPineiroSpec,
    KBesselSpec,
    MeijerGSpec,
    MultipleLaguerre1Spec,
    MultipleLaguerre2Spec,
    SorokinLaguerreSpec,
)

logger = logging.getLogger(__name__)

Row = List[Number]


def _integrable(name: str, value: Any) -> None:
    if value <= -1:
        raise NonIntegrable(f"weight is not integrable: {name} = {format_value(value)} <= -1")


class MomentCatalog(ABC):
    """Normalized moments of the r weights of one family."""

    def __init__(self, spec: Any, ctx: PrecisionContext):
        self.spec = spec
        self.ctx = ctx
        self._cache: Dict[Tuple[int, int], Number] = {}
        self._require_integrable()

    @property
    def weight_count(self) -> int:
        return self.spec.weight_count

    @property
    def is_exact(self) -> bool:
        return self.spec.is_exact

    def _require_integrable(self) -> None:
        """Raise NonIntegrable when a weight has no finite moments."""

    @abstractmethod
    def _moment(self, j: int, k: int) -> Number:
        """Normalized moment m_{j,k}/m_{j,0}."""

    @abstractmethod
    def weight(self, j: int, t: Any) -> Any:
        """Weight w_j at the real integration variable t (mpmath, current precision)."""

    def segments(self, j: int) -> List[Any]:
        return [0, mpmath.inf]

    def monomial(self, j: int, t: Any, k: int) -> Any:
        """x^k at the point of the support parametrized by t."""
        return mpmath.power(t, k)

    def normalized_moment(self, j: int, k: int) -> Number:
        if not 0 <= j < self.weight_count:
            raise InvalidParameters(f"weight index {j} outside 0..{self.weight_count - 1}")
        if k < 0:
            raise InvalidParameters("moment order must be nonnegative")
        key = (j, k)
        if key not in self._cache:
            with self.ctx.workdps(self.ctx.guard):
                self._cache[key] = self._moment(j, k)
        return self._cache[key]

    def condition_counts(self, nvec: MultiIndex) -> List[int]:
        """Orthogonality conditions per weight; by default n_j on w_j."""
        if nvec.r != self.weight_count:
            raise InvalidParameters(f"multi-index needs {self.weight_count} parts, got {nvec.r}")
        return list(nvec.parts)

    def condition_rows(self, nvec: MultiIndex, degree: int) -> List[Row]:
        """Rows [m_{j,k+i}]_{i=0..degree} for every required (j, k)."""
        rows: List[Row] = []
        for j, count in enumerate(self.condition_counts(nvec)):
            for k in range(count):
                rows.append([self.normalized_moment(j, k + i) for i in range(degree + 1)])
        return rows


# ============================================================================
# Catalogs
# ============================================================================


class JacobiPineiroMoments(MomentCatalog):
    """w_j = x^{alpha_j} (1-x)^beta on [0, 1]; m_{j,k}/m_{j,0} = (alpha_j+1)_k / (alpha_j+beta+2)_k."""

    spec: JacobiPineiroSpec

    def _require_integrable(self) -> None:
        for a in self.spec.alphas:
            _integrable("alpha_j", a)
        _integrable("beta", self.spec.beta)

    def _moment(self, j: int, k: int) -> Number:
        a = self.spec.alphas[j]
        return pochhammer(a + 1, k) / pochhammer(a + self.spec.beta + 2, k)

    def weight(self, j: int, t: Any) -> Any:
        return mpmath.power(t, to_mpf(self.spec.alphas[j])) * mpmath.power(1 - t, to_mpf(self.spec.beta))

    def segments(self, j: int) -> List[Any]:
        return [0, 1]


class Laguerre1Moments(MomentCatalog):
    """w_j = x^{alpha_j} e^{-x}; normalized moment (alpha_j+1)_k."""

    spec: MultipleLaguerre1Spec

    def _require_integrable(self) -> None:
        for a in self.spec.alphas:
            _integrable("alpha_j", a)

    def _moment(self, j: int, k: int) -> Number:
        return pochhammer(self.spec.alphas[j] + 1, k)

    def weight(self, j: int, t: Any) -> Any:
        return mpmath.power(t, to_mpf(self.spec.alphas[j])) * mpmath.exp(-t)


class Laguerre2Moments(MomentCatalog):
    """w_j = x^alpha e^{-c_j x}; normalized moment (alpha+1)_k / c_j^k."""

    spec: MultipleLaguerre2Spec

    def _require_integrable(self) -> None:
        _integrable("alpha", self.spec.alpha)
        for c in self.spec.cs:
            if c <= 0:
                raise NonIntegrable(f"weight is not integrable: c = {format_value(c)} <= 0")

    def _moment(self, j: int, k: int) -> Number:
        c = self.spec.cs[j]
        return pochhammer(self.spec.alpha + 1, k) / c ** k

    def weight(self, j: int, t: Any) -> Any:
        return mpmath.power(t, to_mpf(self.spec.alpha)) * mpmath.exp(-to_mpf(self.spec.cs[j]) * t)


class AngelescoMoments(MomentCatalog):
    """
    w(x) = (1+x)^alpha |x|^beta (1-x)^gamma, split into w_0 on [-1, 0] and w_1 on [0, 1].

    On [0, 1]: m_k/m_0 = (beta+1)_k / (beta+gamma+2)_k * F_k / F_0 with
    F_k = 2F1(-alpha, k+beta+1; k+beta+gamma+2; -1); the [-1, 0] piece is the
    mirror image with alpha and gamma swapped and a factor (-1)^k.
    F_k terminates, and stays rational, when the swapped exponent is a
    nonnegative integer.
    """

    spec: JacobiAngelescoSpec

    def _require_integrable(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            _integrable(name, getattr(self.spec, name))

    @property
    def is_exact(self) -> bool:
        s = self.spec
        return s.is_exact and is_nonpositive_integer(-s.alpha) and is_nonpositive_integer(-s.gamma)

    def _half(self, near: Number, far: Number, k: int) -> Number:
        beta = self.spec.beta
        base = pochhammer(beta + 1, k) / pochhammer(beta + far + 2, k)
        ratio = self._euler(near, far, k) / self._euler(near, far, 0)
        if is_exact(base, ratio):
            return base * ratio
        return to_mpf(base) * to_mpf(ratio)

    def _euler(self, near: Number, far: Number, k: int) -> Number:
        beta = self.spec.beta
        if is_exact(near) and is_nonpositive_integer(-near):
            return eval_pfq(HypSeriesSpec((-near, k + beta + 1), (k + beta + far + 2,)), Fraction(-1), self.ctx).value
        return mpmath.hyp2f1(-to_mpf(near), to_mpf(k + beta + 1), to_mpf(k + beta + far + 2), -1)

    def _moment(self, j: int, k: int) -> Number:
        s = self.spec
        if j == 1:
            return self._half(s.alpha, s.gamma, k)
        return (-1) ** k * self._half(s.gamma, s.alpha, k)

    def weight(self, j: int, t: Any) -> Any:
        s = self.spec
        near, far = (s.gamma, s.alpha) if j == 0 else (s.alpha, s.gamma)
        return mpmath.power(1 + t, to_mpf(near)) * mpmath.power(t, to_mpf(s.beta)) * mpmath.power(1 - t, to_mpf(far))

    def segments(self, j: int) -> List[Any]:
        return [0, 1]

    def monomial(self, j: int, t: Any, k: int) -> Any:
        return mpmath.power(-t if j == 0 else t, k)


class SorokinMoments(MomentCatalog):
    """
    w(x) = x^p e^{-x^r} on the r rays omega^j [0, inf), omega = e^{2 pi i / r}.

    Normalized ray moments are omega^{jk} g_k with g_k = Gamma((k+p+1)/r) / Gamma((p+1)/r).
    A discrete Fourier transform over the rays splits the system into residue
    classes s = k + i (mod r); within a class g_s / g_rho = ((rho+p+1)/r)_{(s-rho)/r}
    is rational, which gives an exact real system for rational p.
    """

    spec: SorokinLaguerreSpec

    def _require_integrable(self) -> None:
        _integrable("p", self.spec.p)

    def condition_counts(self, nvec: MultiIndex) -> List[int]:
        if nvec.r != 1:
            raise InvalidParameters("the Sorokin family is indexed by a single n")
        return [nvec.total] * self.spec.r

    def _gamma_ratio(self, s: int) -> Number:
        r = self.spec.r
        rho = s % r
        shift = (rho + self.spec.p + 1) / r
        head = mpmath.gamma(to_mpf(shift)) * mpmath.rgamma(to_mpf((self.spec.p + 1) / r))
        return head * to_mpf(pochhammer(shift, (s - rho) // r))

    def class_ratio(self, s: int) -> Number:
        r = self.spec.r
        rho = s % r
        return pochhammer((rho + self.spec.p + 1) / r, (s - rho) // r)

    def _moment(self, j: int, k: int) -> Number:
        r = self.spec.r
        if r == 1:
            return pochhammer(self.spec.p + 1, k)
        omega = mpmath.expjpi(mpmath.mpf(2 * j * k) / r)
        return omega * self._gamma_ratio(k)

    def condition_rows(self, nvec: MultiIndex, degree: int) -> List[Row]:
        if not self.is_exact or self.spec.r == 1:
            return super().condition_rows(nvec, degree)
        r = self.spec.r
        zero = Fraction(0)
        rows: List[Row] = []
        for k in range(nvec.total):
            for ell in range(r):
                rows.append(
                    [self.class_ratio(k + i) if (k + i) % r == ell else zero for i in range(degree + 1)]
                )
        return rows

    def weight(self, j: int, t: Any) -> Any:
        r = self.spec.r
        omega = mpmath.expjpi(mpmath.mpf(2 * j) / r)
        return mpmath.power(omega, to_mpf(self.spec.p) + 1) * mpmath.power(t, to_mpf(self.spec.p)) * mpmath.exp(-mpmath.power(t, r))

    def monomial(self, j: int, t: Any, k: int) -> Any:
        return mpmath.power(mpmath.expjpi(mpmath.mpf(2 * j) / self.spec.r) * t, k)


class KBesselMoments(MomentCatalog):
    """
    w_1 = 2 x^{alpha+nu/2} K_nu(2 sqrt x), w_2 = 2 x^{alpha+(nu+1)/2} K_{nu+1}(2 sqrt x).

    Normalized moments (alpha+1)_k (alpha+nu+1)_k and (alpha+1)_k (alpha+nu+2)_k.
    """

    spec: KBesselSpec

    def _require_integrable(self) -> None:
        _integrable("alpha", self.spec.alpha)
        _integrable("alpha + nu", self.spec.alpha + self.spec.nu)

    def _moment(self, j: int, k: int) -> Number:
        a, nu = self.spec.alpha, self.spec.nu
        return pochhammer(a + 1, k) * pochhammer(a + nu + 1 + j, k)

    def weight(self, j: int, t: Any) -> Any:
        a, nu = to_mpf(self.spec.alpha), to_mpf(self.spec.nu) + j
        return 2 * mpmath.power(t, a + nu / 2) * mpmath.besselk(nu, 2 * mpmath.sqrt(t))


class IBesselMoments(MomentCatalog):
    """
    w_1 = x^{nu/2} I_nu(2 sqrt x) e^{-cx}, w_2 = x^{(nu+1)/2} I_{nu+1}(2 sqrt x) e^{-cx}.

    By Kummer's transformation the normalized moments are the terminating
    (nu+1+j)_k c^{-k} 1F1(-k; nu+1+j; -1/c).
    """

    spec: IBesselSpec

    def _require_integrable(self) -> None:
        _integrable("nu", self.spec.nu)
        if self.spec.c <= 0:
            raise NonIntegrable(f"weight is not integrable: c = {format_value(self.spec.c)} <= 0")

    def _moment(self, j: int, k: int) -> Number:
        b = self.spec.nu + 1 + j
        c = self.spec.c
        z = -1 / c
        kummer = eval_pfq(HypSeriesSpec((-k,), (b,)), z, self.ctx).value
        return pochhammer(b, k) / c ** k * kummer

    def weight(self, j: int, t: Any) -> Any:
        nu = to_mpf(self.spec.nu) + j
        return mpmath.power(t, nu / 2) * mpmath.besseli(nu, 2 * mpmath.sqrt(t)) * mpmath.exp(-to_mpf(self.spec.c) * t)


class MeijerGMoments(MomentCatalog):
    """
    w_j = G^{r,0}_{0,r}(x | nu_1+j, nu_2, ..., nu_r), j = 0..r-1.

    Mellin moments prod_m Gamma(k+1+nu_m) times (k+1+nu_1)_j; weight j carries
    ceil((n-j)/r) conditions for degree n.
    """

    spec: MeijerGSpec

    def _require_integrable(self) -> None:
        for nu in self.spec.nus:
            _integrable("nu_j", nu)

    def condition_counts(self, nvec: MultiIndex) -> List[int]:
        if nvec.r != 1:
            raise InvalidParameters("the Meijer-G family is indexed by a single n")
        n, r = nvec.total, self.spec.r
        return [max(0, -(-(n - j) // r)) for j in range(r)]

    def _moment(self, j: int, k: int) -> Number:
        nus = self.spec.nus
        value = pochhammer(k + 1 + nus[0], j) / pochhammer(1 + nus[0], j)
        for nu in nus:
            value *= pochhammer(nu + 1, k)
        return value

    def weight(self, j: int, t: Any) -> Any:
        nus = [to_mpf(nu) for nu in self.spec.nus]
        nus[0] += j
        return mpmath.meijerg([[], []], [nus, []], t)


class MomentCatalogFactory:
    @staticmethod
    def create(spec: FamilySpec, ctx: PrecisionContext) -> MomentCatalog:
        if isinstance(spec, JacobiAngelescoSpec):
            return AngelescoMoments(spec, ctx)
        if isinstance(spec, JacobiPineiroSpec):
            return JacobiPineiroMoments(spec, ctx)
        if isinstance(spec, MultipleLaguerre1Spec):
            return Laguerre1Moments(spec, ctx)
        if isinstance(spec, MultipleLaguerre2Spec):
            return Laguerre2Moments(spec, ctx)
        if isinstance(spec, SorokinLaguerreSpec):
            return SorokinMoments(spec, ctx)
        if isinstance(spec, KBesselSpec):
            return KBesselMoments(spec, ctx)
        if isinstance(spec, IBesselSpec):
            return IBesselMoments(spec, ctx)
        if isinstance(spec, MeijerGSpec):
            return MeijerGMoments(spec, ctx)
        raise InvalidParameters(f"no moment catalog for {type(spec).__name__}")


def moments(family: FamilySpec, j: int, k: int, ctx: PrecisionContext) -> Number:
    """Normalized k-th moment of weight j."""
    return MomentCatalogFactory.create(family, ctx).normalized_moment(j, k)


# ============================================================================
# Quadrature validation
# ============================================================================


@dataclass(frozen=True)
class MomentValidation:
    closed_form: Number
    quadrature: Any
    refined: Any

    @property
    def discrepancy(self) -> Any:
        return abs(to_mpf(self.closed_form) - self.quadrature)

    @property
    def quadrature_spread(self) -> Any:
        return abs(self.quadrature - self.refined)


def _quad(catalog: MomentCatalog, j: int, k: int) -> Any:
    segments = catalog.segments(j)
    top = mpmath.quad(lambda t: catalog.monomial(j, t, k) * catalog.weight(j, t), segments)
    bottom = mpmath.quad(lambda t: catalog.weight(j, t), segments)
    return top / bottom


def quadrature_moment(catalog: MomentCatalog, j: int, k: int, digits: int = 30) -> MomentValidation:
    """Closed-form normalized moment against mpmath.quad at `digits` and at twice that."""
    closed = catalog.normalized_moment(j, k)
    with mpmath.workdps(digits + 5):
        first = _quad(catalog, j, k)
    with mpmath.workdps(2 * digits + 5):
        second = _quad(catalog, j, k)
    with mpmath.workdps(digits):
        result = MomentValidation(closed_form=closed, quadrature=+first, refined=+second)
    logger.debug("Moment (%s, %s) quadrature discrepancy %s", j, k, mpmath.nstr(result.discrepancy, 3))
    return result


# ============================================================================
# Construction
# ============================================================================


@dataclass(frozen=True)
class MopConstruction:
    polynomial: BigPoly
    exact: bool
    condition: Optional[Any] = None


def _drop_imaginary(values: Sequence[Any], ctx: PrecisionContext) -> List[Any]:
    scale = max([abs(v) for v in values] + [mpmath.mpf(1)])
    if all(abs(mpmath.im(v)) <= ctx.eps * scale for v in values if isinstance(v, mpmath.mpc)):
        return [mpmath.re(v) if isinstance(v, mpmath.mpc) else v for v in values]
    return list(values)


def construct_mop_with_diagnostics(catalog: MomentCatalog, nvec: MultiIndex, ctx: PrecisionContext) -> MopConstruction:
    degree = sum(catalog.condition_counts(nvec))
    if degree == 0:
        return MopConstruction(polynomial=BigPoly([1]), exact=True)
    rows = catalog.condition_rows(nvec, degree)
    if len(rows) != degree:
        raise SingularMomentMatrix(f"{len(rows)} orthogonality conditions for degree {degree}")
    matrix = [row[:degree] for row in rows]
    rhs = [-row[degree] for row in rows]
    solution = solve_linear(matrix, rhs, ctx)
    values = solution.values
    if not solution.exact:
        with ctx.workdps():
            values = _drop_imaginary(values, ctx)
    one: Any = Fraction(1) if solution.exact else mpmath.mpf(1)
    polynomial = BigPoly(list(values) + [one])
    logger.debug("Moment-oracle polynomial of degree %s built (exact=%s)", degree, solution.exact)
    return MopConstruction(polynomial=polynomial, exact=solution.exact, condition=solution.condition)


def construct_mop(catalog: MomentCatalog, nvec: MultiIndex, ctx: PrecisionContext) -> BigPoly:
    """Monic polynomial of degree |n| satisfying the catalog's orthogonality conditions."""
    return construct_mop_with_diagnostics(catalog, nvec, ctx).polynomial


def orthogonality_residual(p: BigPoly, catalog: MomentCatalog, nvec: MultiIndex, ctx: PrecisionContext) -> Number:
    """max over required (j, k) of |sum_i p_i m_{j,k+i}|."""
    rows = catalog.condition_rows(nvec, p.degree)
    exact = p.is_exact and all(is_exact(*row) for row in rows)
    worst: Any = Fraction(0) if exact else mpmath.mpf(0)
    with ctx.workdps(ctx.guard):
        for row in rows:
            if exact:
                total: Any = sum((c * m for c, m in zip(p.coeffs, row)), Fraction(0))
            else:
                total = mpmath.fsum(to_mpf(c) * to_mpf(m) for c, m in zip(p.coeffs, row))
            if abs(total) > worst:
                worst = abs(total)
    return worst
