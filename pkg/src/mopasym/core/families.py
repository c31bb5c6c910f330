"""
The seven families of multiple orthogonal polynomials and their hard-edge limits.

Each family exposes its polynomial in the normalization of its explicit
formula (``coefficients``), the normalization in which the Mehler-Heine limit
is stated (``normalized_coefficients``), the limit function itself, the
moment-oracle counterpart and the scaled-zero target.

Exact coefficients are extracted from the explicit formulas by truncated
power-series products (Angelesco, Pineiro, Laguerre I, Sorokin), a generating
function (Laguerre II), or terminating series (K-Bessel, Meijer-G). The
I-Bessel family has no explicit formula and is built by the moment oracle.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
import operator
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar, Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath

from mopasym.core.errors import InvalidParameters, OutOfDomain, SingularMomentMatrix
from mopasym.core.gen_bessel import GenBesselSpec
from mopasym.core.hypergeom import HypSeriesSpec, eval_pfq, hyp0f, pfq_coefficients, sum_series
from mopasym.core.moments import MomentCatalog, MomentCatalogFactory, construct_mop
from mopasym.core.precision import (
    BigPoly,
    MultiIndex,
    Number,
    PrecisionContext,
    binomial_series,
    coerce,
    gen_binomial,
    is_exact,
    is_integer,
    pochhammer,
    poly_eval,
    series_product,
    to_mpf,
    unify,
)
from mopasym.core.roots import genbessel_zeros
from mopasym.core.schema import (
    FamilySpec,
    IBesselSpec,
    JacobiAngelescoSpec,
    JacobiPineiroSpec,
    KBesselSpec,
    MeijerGSpec,
    MultipleLaguerre1Spec,
    MultipleLaguerre2Spec,
    RatioWeights,
    SorokinLaguerreSpec,
)

logger = logging.getLogger(__name__)

ANGELESCO_MARGIN = Fraction(1, 1000)
REAL_ORACLE_DIGITS_PER_DEGREE = 4


def _exp_coefficients(length: int, exact: bool = True) -> List[Number]:
    return [Fraction(1, math.factorial(m)) if exact else mpmath.mpf(1) / math.factorial(m) for m in range(length)]


def _product(values: Iterable[Any]) -> Any:
    items = list(values)
    if not items:
        return Fraction(1)
    return functools.reduce(operator.mul, items)


def _times(a: Any, b: Any) -> Any:
    if is_exact(a, b):
        return Fraction(a) * Fraction(b)
    return to_mpf(a) * to_mpf(b)


def _q_product(q: Optional[RatioWeights], r: int) -> Any:
    weights = q.q if q is not None else RatioWeights.uniform(r).q
    if len(weights) != r:
        raise InvalidParameters(f"ratio weights need {r} entries, got {len(weights)}")
    return _product(weights)


# ============================================================================
# d_ell(n): coefficients of (1-z)^(n+alpha) (1+z)^(n+gamma)
# ============================================================================


def d_ell(n: int, alpha: Number, gamma: Number, ell: int) -> Number:
    """sum_k (-1)^k C(n+alpha, k) C(n+gamma, ell-k)."""
    alpha, gamma = unify(alpha, gamma)
    total: Any = Fraction(0) if is_exact(alpha, gamma) else mpmath.mpf(0)
    for k in range(ell + 1):
        total += (-1) ** k * gen_binomial(n + alpha, k) * gen_binomial(n + gamma, ell - k)
    return total


def d_ell_convolution(n: int, alpha: Number, gamma: Number, ell: int) -> Number:
    """sum_{k <= ell/2} (-1)^k C(n, k) c_{ell-2k} with c the coefficients of (1-z)^alpha (1+z)^gamma."""
    alpha, gamma = unify(alpha, gamma)
    c = series_product(binomial_series(alpha, -1, ell + 1), binomial_series(gamma, 1, ell + 1), ell + 1)
    total: Any = Fraction(0) if is_exact(alpha, gamma) else mpmath.mpf(0)
    for k in range(ell // 2 + 1):
        total += (-1) ** k * math.comb(n, k) * c[ell - 2 * k]
    return total


def d_ell_limit(ell: int) -> Fraction:
    """lim n^(-ell/2) d_ell(n): (-1)^(ell/2) / (ell/2)! for even ell, 0 for odd ell."""
    if ell % 2:
        return Fraction(0)
    return Fraction((-1) ** (ell // 2), math.factorial(ell // 2))


class _DellStream:
    """Incremental d_0, d_1, ... as the Cauchy product of two binomial sequences."""

    def __init__(self, n: int, alpha: Number, gamma: Number):
        self.n = n
        self.alpha, self.gamma = unify(alpha, gamma)
        self.left: List[Number] = []
        self.right: List[Number] = []

    def __call__(self, ell: int) -> Number:
        while len(self.left) <= ell:
            k = len(self.left)
            self.left.append((-1) ** k * gen_binomial(self.n + self.alpha, k))
            self.right.append(gen_binomial(self.n + self.gamma, k))
        return sum((self.left[k] * self.right[ell - k] for k in range(ell + 1)), Fraction(0) if is_exact(self.alpha, self.gamma) else mpmath.mpf(0))


# ============================================================================
# Family base
# ============================================================================


class Family(ABC):
    """One family of multiple orthogonal polynomials bound to a precision context."""

    theorem_id: ClassVar[int]
    scaling_exponent: ClassVar[Fraction] = Fraction(1)
    uses_ratios: ClassVar[bool] = False

    def __init__(self, spec: Any, ctx: PrecisionContext):
        spec.check(ctx)
        self.spec = spec
        self.ctx = ctx
        self._coefficients: Dict[Tuple[int, ...], BigPoly] = {}

    # -- indexing ----------------------------------------------------------

    def index(self, n: int, q: Optional[RatioWeights] = None) -> MultiIndex:
        return MultiIndex.of(n)

    def oracle_index(self, nvec: MultiIndex) -> MultiIndex:
        return nvec

    def degree(self, nvec: MultiIndex) -> int:
        return nvec.total

    def _check_index(self, nvec: MultiIndex) -> None:
        if nvec.r != 1:
            raise InvalidParameters(f"{self.spec.kind} is indexed by a single n, got {nvec.parts}")

    # -- polynomials -------------------------------------------------------

    @abstractmethod
    def _build(self, nvec: MultiIndex) -> BigPoly:
        """Polynomial in the normalization of the explicit formula."""

    @abstractmethod
    def normalization(self, nvec: MultiIndex) -> Number:
        """Factor turning `coefficients` into the polynomial of the limit theorem."""

    def coefficients(self, nvec: MultiIndex) -> BigPoly:
        key = tuple(nvec.parts)
        if key not in self._coefficients:
            with self.ctx.workdps(2 * self.ctx.guard):
                self._coefficients[key] = self._build(nvec)
            logger.debug("%s coefficients for %s built", self.spec.kind, key)
        return self._coefficients[key]

    def normalized_coefficients(self, nvec: MultiIndex) -> BigPoly:
        with self.ctx.workdps(2 * self.ctx.guard):
            return self.coefficients(nvec).scale(self.normalization(nvec))

    def evaluate(self, nvec: MultiIndex, x: Any) -> Number:
        return poly_eval(self.coefficients(nvec), x, self.ctx)

    def evaluate_normalized(self, nvec: MultiIndex, x: Any) -> Number:
        return poly_eval(self.normalized_coefficients(nvec), x, self.ctx)

    # -- oracle ------------------------------------------------------------

    def catalog(self) -> MomentCatalog:
        return MomentCatalogFactory.create(self.spec, self.ctx)

    def oracle(self, nvec: MultiIndex) -> BigPoly:
        return construct_mop(self.catalog(), self.oracle_index(nvec), self.ctx)

    # -- limits ------------------------------------------------------------

    def scaled_argument(self, z: Any, n: int) -> Number:
        """x = z / n^s with s the family's scaling exponent."""
        s = self.scaling_exponent
        if s.denominator == 1 and is_exact(z):
            return Fraction(z) / Fraction(n) ** s.numerator
        with self.ctx.workdps(self.ctx.guard):
            return to_mpf(z) / mpmath.power(n, to_mpf(s))

    def zero_scale(self, n: int) -> Number:
        with self.ctx.workdps(self.ctx.guard):
            return mpmath.power(n, to_mpf(self.scaling_exponent))

    def limit(self, z: Any, q: Optional[RatioWeights] = None) -> Number:
        return mh_limit_eval(self.theorem_id, self.spec, z, self.ctx, q)

    @abstractmethod
    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        """Limit of zero_scale(n) * x_{k,n}."""

    def zero_window(self, nvec: MultiIndex) -> Optional[Any]:
        """Upper end of the positive search range; None = Cauchy bound."""
        return None


def _genbessel_zero(den: Sequence[Number], k: int, ctx: PrecisionContext) -> Any:
    spec = GenBesselSpec(alphas=tuple(b - 1 for b in den))
    return genbessel_zeros(spec, k, ctx).values[k - 1]


# ============================================================================
# Jacobi-Angelesco
# ============================================================================


class JacobiAngelesco(Family):
    """P_{n,n} on [-1, 0] and [0, 1] with w = (1+x)^alpha |x|^beta (1-x)^gamma."""

    theorem_id = 1
    scaling_exponent = Fraction(3, 2)
    spec: JacobiAngelescoSpec

    def index(self, n: int, q: Optional[RatioWeights] = None) -> MultiIndex:
        return MultiIndex.of(n, n)

    def _diagonal(self, nvec: MultiIndex) -> int:
        if nvec.r != 2 or nvec.parts[0] != nvec.parts[1]:
            raise InvalidParameters(f"only diagonal indices (n, n) are supported, got {nvec.parts}")
        return nvec.parts[0]

    def _series_coefficient(self, n: int, ell: int, d: _DellStream) -> Number:
        beta = self.spec.beta
        return d(ell) * (-1) ** (n + ell) * pochhammer(n + beta + 1, ell) / pochhammer(beta + 1, ell)

    def _build(self, nvec: MultiIndex) -> BigPoly:
        n = self._diagonal(nvec)
        s = self.spec
        length = 2 * n + 1
        d = _DellStream(n, s.alpha, s.gamma)
        series = [self._series_coefficient(n, ell, d) for ell in range(length)]
        if not s.is_exact:
            series = [to_mpf(c) for c in series]
        left = binomial_series(-s.alpha, 1, length)
        right = binomial_series(-s.gamma, -1, length)
        return BigPoly(series_product(series_product(series, left, length), right, length))

    def normalization(self, nvec: MultiIndex) -> Number:
        return Fraction((-1) ** self._diagonal(nvec))

    def leading_coefficient(self, n: int) -> Number:
        total = self.spec.alpha + self.spec.beta + self.spec.gamma + 1
        return pochhammer(total, 3 * n) / pochhammer(total, 2 * n)

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        beta = self.spec.beta
        f = _genbessel_zero(((beta + 1) / 2, beta / 2 + 1), k, self.ctx)
        with self.ctx.workdps():
            return 2 * mpmath.sqrt(f)

    def zero_window(self, nvec: MultiIndex) -> Optional[Any]:
        return Fraction(1)


def jacobi_angelesco_eval(n: int, spec: JacobiAngelescoSpec, x: Any, ctx: PrecisionContext) -> Number:
    """
    P_{n,n}(x) = (1+x)^-alpha (1-x)^-gamma (-1)^n sum_l d_l(n) (-1)^l (n+beta+1)_l / (beta+1)_l x^l.

    Valid for |x| < 1 - 1/1000; beyond that use JacobiAngelesco.evaluate.
    """
    spec.check(ctx)
    with ctx.workdps():
        xv = to_mpf(x)
        if abs(xv) >= 1 - to_mpf(ANGELESCO_MARGIN):
            raise OutOfDomain(f"the series for P_(n,n) needs |x| < {1 - ANGELESCO_MARGIN}, got {mpmath.nstr(xv, 10)}")
    d = _DellStream(n, spec.alpha, spec.gamma)
    beta = spec.beta

    def term(ell: int) -> Any:
        return to_mpf(d(ell) * (-1) ** ell * pochhammer(n + beta + 1, ell) / pochhammer(beta + 1, ell)) * mpmath.power(to_mpf(x), ell)

    series = sum_series(lambda: term(0), lambda _, k: term(k + 1), ctx, min_terms=2 * n + 2)
    with ctx.workdps():
        xv = to_mpf(x)
        prefactor = mpmath.power(1 + xv, -to_mpf(spec.alpha)) * mpmath.power(1 - xv, -to_mpf(spec.gamma))
        return (-1) ** n * prefactor * series.value


# ============================================================================
# Jacobi-Pineiro
# ============================================================================


@dataclass(frozen=True)
class PineiroValue:
    """(1-x)^beta N(x) = (r+1)Fr(...; x), the normalized polynomial N(x), and P(x) itself."""

    combination: Number
    normalized: Number
    raw: Number


class JacobiPineiro(Family):
    theorem_id = 2
    uses_ratios = True
    spec: JacobiPineiroSpec

    @property
    def scaling_exponent(self) -> Fraction:  # type: ignore[override]
        return Fraction(self.spec.r + 1)

    def index(self, n: int, q: Optional[RatioWeights] = None) -> MultiIndex:
        return MultiIndex.from_ratios((q or RatioWeights.uniform(self.spec.r)).q, n)

    def _series_spec(self, nvec: MultiIndex) -> HypSeriesSpec:
        s = self.spec
        if nvec.r != s.r:
            raise InvalidParameters(f"multi-index needs {s.r} parts, got {nvec.r}")
        num = (-nvec.total - s.beta,) + tuple(a + nj + 1 for a, nj in zip(s.alphas, nvec.parts))
        den = tuple(a + 1 for a in s.alphas)
        return HypSeriesSpec(num, den)

    def normalized_coefficients(self, nvec: MultiIndex) -> BigPoly:
        length = nvec.total + 1
        with self.ctx.workdps(2 * self.ctx.guard):
            series = pfq_coefficients(self._series_spec(nvec), length)
            return BigPoly(series_product(binomial_series(-self.spec.beta, -1, length), series, length))

    def normalization(self, nvec: MultiIndex) -> Number:
        s = self.spec
        top = _product(pochhammer(nvec.total + a + s.beta + 1, nj) for a, nj in zip(s.alphas, nvec.parts))
        bottom = _product(pochhammer(a + 1, nj) for a, nj in zip(s.alphas, nvec.parts))
        return (-1) ** nvec.total * top / bottom

    def _build(self, nvec: MultiIndex) -> BigPoly:
        return self.normalized_coefficients(nvec).scale(1 / self.normalization(nvec))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        f = _genbessel_zero(tuple(a + 1 for a in self.spec.alphas), k, self.ctx)
        with self.ctx.workdps():
            return f / to_mpf(_q_product(q, self.spec.r))

    def zero_window(self, nvec: MultiIndex) -> Optional[Any]:
        return Fraction(1)


def jacobi_pineiro_eval(nvec: MultiIndex, spec: JacobiPineiroSpec, x: Any, ctx: PrecisionContext) -> PineiroValue:
    """Series route for |x| < 1 (or terminating series), exact polynomial route otherwise."""
    family = JacobiPineiro(spec, ctx)
    series_spec = family._series_spec(nvec)
    constant = family.normalization(nvec)
    with ctx.workdps():
        inside = abs(to_mpf(x)) < 1
    if inside or series_spec.terminating_degree(ctx) is not None:
        combination = eval_pfq(series_spec, x, ctx).value
        with ctx.workdps():
            normalized = to_mpf(combination) * mpmath.power(1 - to_mpf(x), -to_mpf(spec.beta))
    else:
        normalized = family.evaluate_normalized(nvec, x)
        with ctx.workdps():
            combination = to_mpf(normalized) * mpmath.power(1 - to_mpf(x), to_mpf(spec.beta))
    with ctx.workdps():
        raw = to_mpf(normalized) / to_mpf(constant)
    return PineiroValue(combination=combination, normalized=normalized, raw=raw)


# ============================================================================
# Multiple Laguerre of the first kind
# ============================================================================


class MultipleLaguerre1(Family):
    """Weights x^{alpha_j} e^{-x}; N(x) = e^x rFr(alpha_j+n_j+1; alpha_j+1; -x)."""

    theorem_id = 3
    uses_ratios = True
    spec: MultipleLaguerre1Spec

    @property
    def scaling_exponent(self) -> Fraction:  # type: ignore[override]
        return Fraction(self.spec.r)

    def index(self, n: int, q: Optional[RatioWeights] = None) -> MultiIndex:
        return MultiIndex.from_ratios((q or RatioWeights.uniform(self.spec.r)).q, n)

    def _series_spec(self, nvec: MultiIndex) -> HypSeriesSpec:
        s = self.spec
        if nvec.r != s.r:
            raise InvalidParameters(f"multi-index needs {s.r} parts, got {nvec.r}")
        num = tuple(a + nj + 1 for a, nj in zip(s.alphas, nvec.parts))
        den = tuple(a + 1 for a in s.alphas)
        return HypSeriesSpec(num, den)

    def normalized_coefficients(self, nvec: MultiIndex) -> BigPoly:
        length = nvec.total + 1
        with self.ctx.workdps(2 * self.ctx.guard):
            series = pfq_coefficients(self._series_spec(nvec), length)
            alternating = [c * (-1) ** m for m, c in enumerate(series)]
            return BigPoly(series_product(_exp_coefficients(length, self.spec.is_exact), alternating, length))

    def normalization(self, nvec: MultiIndex) -> Number:
        bottom = _product(pochhammer(a + 1, nj) for a, nj in zip(self.spec.alphas, nvec.parts))
        return (-1) ** nvec.total / bottom

    def _build(self, nvec: MultiIndex) -> BigPoly:
        return self.normalized_coefficients(nvec).scale(1 / self.normalization(nvec))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        f = _genbessel_zero(tuple(a + 1 for a in self.spec.alphas), k, self.ctx)
        with self.ctx.workdps():
            return f / to_mpf(_q_product(q, self.spec.r))


def mlaguerre1_eval(nvec: MultiIndex, spec: MultipleLaguerre1Spec, x: Any, ctx: PrecisionContext) -> Number:
    """(-1)^|n| L(x) / prod (alpha_j+1)_{n_j} as e^x times the entire rFr series."""
    family = MultipleLaguerre1(spec, ctx)
    with ctx.workdps():
        z = -to_mpf(x)
    series = eval_pfq(family._series_spec(nvec), z, ctx).value
    with ctx.workdps():
        return mpmath.exp(to_mpf(x)) * to_mpf(series)


# ============================================================================
# Multiple Laguerre of the second kind
# ============================================================================


class MultipleLaguerre2(Family):
    """Weights x^alpha e^{-c_j x}; N(x) = sum_m (-1)^m e_m x^m / (alpha+1)_m, e_m = [t^m] prod (1+c_j t)^{n_j}."""

    theorem_id = 4
    uses_ratios = True
    spec: MultipleLaguerre2Spec

    def index(self, n: int, q: Optional[RatioWeights] = None) -> MultiIndex:
        return MultiIndex.from_ratios((q or RatioWeights.uniform(self.spec.r)).q, n)

    def _elementary(self, nvec: MultiIndex) -> List[Number]:
        if nvec.r != self.spec.r:
            raise InvalidParameters(f"multi-index needs {self.spec.r} parts, got {nvec.r}")
        length = nvec.total + 1
        e: List[Any] = [coerce(1, self.spec.is_exact)]
        for c, nj in zip(self.spec.cs, nvec.parts):
            factor = [math.comb(nj, k) * c ** k for k in range(nj + 1)]
            e = series_product(e, factor, length)
        return e

    def normalized_coefficients(self, nvec: MultiIndex) -> BigPoly:
        alpha = self.spec.alpha
        with self.ctx.workdps(2 * self.ctx.guard):
            e = self._elementary(nvec)
            return BigPoly((-1) ** m * em / pochhammer(alpha + 1, m) for m, em in enumerate(e))

    def normalization(self, nvec: MultiIndex) -> Number:
        c_power = _product(c ** nj for c, nj in zip(self.spec.cs, nvec.parts))
        return (-1) ** nvec.total * c_power / pochhammer(self.spec.alpha + 1, nvec.total)

    def _build(self, nvec: MultiIndex) -> BigPoly:
        return self.normalized_coefficients(nvec).scale(1 / self.normalization(nvec))

    def total_rate(self, q: Optional[RatioWeights]) -> Number:
        """Q = sum_j q_j c_j."""
        weights = (q or RatioWeights.uniform(self.spec.r)).q
        if len(weights) != self.spec.r:
            raise InvalidParameters(f"ratio weights need {self.spec.r} entries, got {len(weights)}")
        values = unify(*weights, *self.spec.cs)
        r = self.spec.r
        return sum(qj * cj for qj, cj in zip(values[:r], values[r:]))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        f = _genbessel_zero((self.spec.alpha + 1,), k, self.ctx)
        with self.ctx.workdps():
            return f / to_mpf(self.total_rate(q))


def mlaguerre2_eval(nvec: MultiIndex, spec: MultipleLaguerre2Spec, x: Any, ctx: PrecisionContext) -> Number:
    """
    L(x) from the explicit r-fold sum
        (-1)^|n| (alpha+1)_|n| / prod c_j^{n_j} * sum_k prod C(n_j, k_j) c_j^{k_j} (-x)^|k| / (alpha+1)_|k|.
    """
    spec.check(ctx)
    if nvec.r != spec.r:
        raise InvalidParameters(f"multi-index needs {spec.r} parts, got {nvec.r}")
    exact = is_exact(spec.alpha, *spec.cs, x)
    xv: Any = Fraction(x) if exact else None
    with ctx.workdps(ctx.guard):
        if not exact:
            xv = to_mpf(x)
        total: Any = Fraction(0) if exact else mpmath.mpf(0)
        for ks in itertools.product(*(range(nj + 1) for nj in nvec.parts)):
            m = sum(ks)
            term: Any = Fraction(1) if exact else mpmath.mpf(1)
            for c, nj, kj in zip(spec.cs, nvec.parts, ks):
                term *= math.comb(nj, kj) * (c if exact else to_mpf(c)) ** kj
            rising = pochhammer(spec.alpha + 1, m)
            total += term * (-xv) ** m / (rising if exact else to_mpf(rising))
        prefactor = (-1) ** nvec.total * pochhammer(spec.alpha + 1, nvec.total) / _product(c ** nj for c, nj in zip(spec.cs, nvec.parts))
        value = total * (prefactor if exact else to_mpf(prefactor))
    if exact:
        return value
    with ctx.workdps():
        return +value


# ============================================================================
# Sorokin (Laguerre weights on r rays)
# ============================================================================


class SorokinLaguerre(Family):
    """L_n(x, p) = e^{x^r} sum_m (-1)^m (p+rm+1)_n / (n! m!) x^{rm}, degree rn."""

    theorem_id = 5
    spec: SorokinLaguerreSpec

    def degree(self, nvec: MultiIndex) -> int:
        return self.spec.r * nvec.total

    def _inner(self, n: int, length: int) -> List[Number]:
        p, r = self.spec.p, self.spec.r
        return [(-1) ** m * pochhammer(p + r * m + 1, n) / (math.factorial(n) * math.factorial(m)) for m in range(length)]

    def _build(self, nvec: MultiIndex) -> BigPoly:
        self._check_index(nvec)
        n, r = nvec.total, self.spec.r
        in_u = series_product(_exp_coefficients(n + 1, self.spec.is_exact), self._inner(n, n + 1), n + 1)
        coeffs: List[Any] = [coerce(0, self.spec.is_exact)] * (r * n + 1)
        for m, value in enumerate(in_u):
            coeffs[r * m] = value
        return BigPoly(coeffs)

    def normalization(self, nvec: MultiIndex) -> Number:
        n, p = nvec.total, self.spec.p
        if is_exact(p) and is_integer(p):
            return Fraction(1, n ** int(p)) if p >= 0 else Fraction(n ** int(-p))
        return mpmath.power(n, -to_mpf(p))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        raise InvalidParameters("the Sorokin family has no real zero-scaling law on [0, inf)")


def sorokin_eval(n: int, p: Number, r: int, x: Any, ctx: PrecisionContext) -> Number:
    """L_n(x, p) by summing the entire series in u = x^r and multiplying by e^u; x may lie on a ray."""
    spec = SorokinLaguerreSpec(p=p, r=r)
    spec.check(ctx)

    def u() -> Any:
        return mpmath.power(to_mpf(x), r)

    def term(m: int) -> Any:
        coefficient = (-1) ** m * to_mpf(pochhammer(p + r * m + 1, n)) / (mpmath.factorial(n) * mpmath.factorial(m))
        return coefficient * mpmath.power(u(), m)

    series = sum_series(lambda: term(0), lambda _, k: term(k + 1), ctx, min_terms=n + 1)
    with ctx.workdps():
        return mpmath.exp(u()) * series.value


# ============================================================================
# Bessel-type families
# ============================================================================


def _halves(n: int) -> MultiIndex:
    return MultiIndex.of((n + 1) // 2, n // 2)


class KBesselMOP(Family):
    """p_n = (-1)^n (alpha+1)_n (alpha+nu+1)_n 1F2(-n; alpha+1, alpha+nu+1; x), monic."""

    theorem_id = 6
    spec: KBesselSpec

    def den_params(self) -> Tuple[Number, Number]:
        return (self.spec.alpha + 1, self.spec.alpha + self.spec.nu + 1)

    def oracle_index(self, nvec: MultiIndex) -> MultiIndex:
        self._check_index(nvec)
        return _halves(nvec.total)

    def normalized_coefficients(self, nvec: MultiIndex) -> BigPoly:
        self._check_index(nvec)
        n = nvec.total
        with self.ctx.workdps(2 * self.ctx.guard):
            return BigPoly(pfq_coefficients(HypSeriesSpec((-n,), self.den_params()), n + 1))

    def normalization(self, nvec: MultiIndex) -> Number:
        n = nvec.total
        return (-1) ** n / _product(pochhammer(b, n) for b in self.den_params())

    def _build(self, nvec: MultiIndex) -> BigPoly:
        return self.normalized_coefficients(nvec).scale(1 / self.normalization(nvec))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        return _genbessel_zero(self.den_params(), k, self.ctx)


class MeijerGMOP(Family):
    """P_n = (-1)^n prod (nu_j+1)_n 1Fr(-n; nu_1+1, ..., nu_r+1; x), monic."""

    theorem_id = 8
    spec: MeijerGSpec

    def den_params(self) -> Tuple[Number, ...]:
        return tuple(nu + 1 for nu in self.spec.nus)

    def normalized_coefficients(self, nvec: MultiIndex) -> BigPoly:
        self._check_index(nvec)
        n = nvec.total
        with self.ctx.workdps(2 * self.ctx.guard):
            return BigPoly(pfq_coefficients(HypSeriesSpec((-n,), self.den_params()), n + 1))

    def normalization(self, nvec: MultiIndex) -> Number:
        n = nvec.total
        return (-1) ** n / _product(pochhammer(b, n) for b in self.den_params())

    def _build(self, nvec: MultiIndex) -> BigPoly:
        return self.normalized_coefficients(nvec).scale(1 / self.normalization(nvec))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        return _genbessel_zero(self.den_params(), k, self.ctx)


class IBesselMOP(Family):
    """Monic p_n from the I-Bessel moment system, p_{2m} = P_{m,m}, p_{2m+1} = P_{m+1,m}."""

    theorem_id = 7
    spec: IBesselSpec

    def oracle_index(self, nvec: MultiIndex) -> MultiIndex:
        self._check_index(nvec)
        return _halves(nvec.total)

    def _build(self, nvec: MultiIndex) -> BigPoly:
        if self.spec.is_exact:
            return construct_mop(self.catalog(), self.oracle_index(nvec), self.ctx)
        return self._real_oracle(nvec)

    def _real_oracle(self, nvec: MultiIndex) -> BigPoly:
        """
        Solve the real moment system at two widened precisions.

        The moment matrix loses about REAL_ORACLE_DIGITS_PER_DEGREE digits per
        degree. The two solutions must agree to the working precision, and
        the coefficients of the monic polynomial must alternate in sign since
        every zero is positive.

        Raises:
            SingularMomentMatrix: the solutions disagree or the sign pattern fails.
        """
        index = self.oracle_index(nvec)
        extra = REAL_ORACLE_DIGITS_PER_DEGREE * nvec.total
        solutions: List[BigPoly] = []
        for digits in (self.ctx.digits + extra, self.ctx.digits + 2 * extra):
            wide = PrecisionContext(digits=digits, guard=self.ctx.guard)
            solutions.append(construct_mop(MomentCatalogFactory.create(self.spec, wide), index, wide))
        coarse, fine = solutions
        with self.ctx.workdps(self.ctx.guard):
            scale = max(abs(to_mpf(v)) for v in fine.coeffs)
            gap = max(abs(to_mpf(a) - to_mpf(b)) for a, b in zip(coarse.coeffs, fine.coeffs))
            if len(coarse.coeffs) != len(fine.coeffs) or gap > self.ctx.eps * scale:
                raise SingularMomentMatrix(
                    f"real I-Bessel oracle of degree {fine.degree} is not stable under a precision increase"
                )
            degree = fine.degree
            for k, value in enumerate(fine.coeffs):
                if (-1) ** (degree - k) * to_mpf(value) <= 0:
                    raise SingularMomentMatrix(
                        f"real I-Bessel oracle of degree {degree} breaks the sign pattern at x^{k}"
                    )
        return fine

    def normalization(self, nvec: MultiIndex) -> Number:
        """1 / p_n(0): the limit is checked up to a z-independent constant."""
        value = self.coefficients(nvec).coeffs[0]
        return 1 / value

    def fitted_constant(self, nvec: MultiIndex) -> Number:
        """(-1)^n p_n(0) Gamma(nu+1) / (e^{1/c} n^nu n!); 1 if the monic and stated normalizations agreed."""
        n = nvec.total
        with self.ctx.workdps():
            nu, c = to_mpf(self.spec.nu), to_mpf(self.spec.c)
            p0 = to_mpf(self.coefficients(nvec).coeffs[0])
            return (-1) ** n * p0 * mpmath.gamma(nu + 1) / (mpmath.exp(1 / c) * mpmath.power(n, nu) * mpmath.factorial(n))

    def zero_target(self, k: int, q: Optional[RatioWeights] = None) -> Number:
        f = _genbessel_zero((self.spec.nu + 1,), k, self.ctx)
        with self.ctx.workdps():
            return f / to_mpf(self.spec.c)


def kbessel_mop_eval(n: int, alpha: Number, nu: Number, x: Any, ctx: PrecisionContext) -> Number:
    """Terminating 1F2 value of p_n(x); exact for exact inputs."""
    spec = KBesselSpec(alpha=alpha, nu=nu)
    spec.check(ctx)
    den = (spec.alpha + 1, spec.alpha + spec.nu + 1)
    value = eval_pfq(HypSeriesSpec((-n,), den), x, ctx).value
    scale = (-1) ** n * _product(pochhammer(b, n) for b in den)
    if is_exact(value, scale):
        return scale * value
    with ctx.workdps():
        return to_mpf(scale) * to_mpf(value)


def meijerg_mop_eval(n: int, nus: Sequence[Number], x: Any, ctx: PrecisionContext) -> Number:
    spec = MeijerGSpec(nus=list(nus))
    spec.check(ctx)
    den = tuple(nu + 1 for nu in spec.nus)
    value = eval_pfq(HypSeriesSpec((-n,), den), x, ctx).value
    scale = (-1) ** n * _product(pochhammer(b, n) for b in den)
    if is_exact(value, scale):
        return scale * value
    with ctx.workdps():
        return to_mpf(scale) * to_mpf(value)


def ibessel_mop_eval(n: int, nu: Number, c: Number, x: Any, ctx: PrecisionContext) -> Number:
    family = IBesselMOP(IBesselSpec(nu=nu, c=c), ctx)
    return family.evaluate(MultiIndex.of(n), x)


# ============================================================================
# Limit functions
# ============================================================================


def mh_limit_eval(
    theorem_id: int,
    params: FamilySpec,
    z: Any,
    ctx: PrecisionContext,
    q: Optional[RatioWeights] = None,
) -> Number:
    """
    Right-hand side of the Mehler-Heine limit for the family in `params`.

    The Laguerre-II limit is returned as 0F1(-; alpha+1; -Qz), the same
    function as Gamma(alpha+1) (Qz)^(-alpha/2) J_alpha(2 sqrt(Qz)), so that it
    equals 1 at z = 0 like the normalized polynomials.
    """
    expected = THEOREM_FAMILIES.get(theorem_id)
    if expected is None:
        raise InvalidParameters(f"theorem id must lie in 1..8, got {theorem_id}")
    if not isinstance(params, expected):
        raise InvalidParameters(f"theorem {theorem_id} concerns {expected.__name__}, got {type(params).__name__}")
    exact_z = is_exact(z)
    zq: Any = Fraction(z) if exact_z else to_mpf(z)

    if theorem_id == 1:
        beta = params.beta
        return hyp0f(((beta + 1) / 2, beta / 2 + 1), -zq * zq / 4, ctx)
    if theorem_id in (2, 3):
        return hyp0f(tuple(a + 1 for a in params.alphas), -_times(_q_product(q, len(params.alphas)), zq), ctx)
    if theorem_id == 4:
        rate = MultipleLaguerre2(params, ctx).total_rate(q)
        return hyp0f((params.alpha + 1,), -_times(rate, zq), ctx)
    if theorem_id == 5:
        p, r = params.p, params.r
        value = hyp0f(tuple((p + j) / r for j in range(1, r + 1)), -((zq / r) ** r), ctx)
        with ctx.workdps():
            return mpmath.rgamma(to_mpf(p) + 1) * to_mpf(value)
    if theorem_id == 6:
        return hyp0f((params.alpha + 1, params.alpha + params.nu + 1), -zq, ctx)
    if theorem_id == 7:
        value = hyp0f((params.nu + 1,), -_times(params.c, zq), ctx)
        with ctx.workdps():
            c = to_mpf(params.c)
            return mpmath.exp(1 / c) * mpmath.rgamma(to_mpf(params.nu) + 1) * to_mpf(value)
    return hyp0f(tuple(nu + 1 for nu in params.nus), -zq, ctx)


THEOREM_FAMILIES: Dict[int, type] = {
    1: JacobiAngelescoSpec,
    2: JacobiPineiroSpec,
    3: MultipleLaguerre1Spec,
    4: MultipleLaguerre2Spec,
    5: SorokinLaguerreSpec,
    6: KBesselSpec,
    7: IBesselSpec,
    8: MeijerGSpec,
}


class FamilyFactory:
    @staticmethod
    def create(spec: FamilySpec, ctx: PrecisionContext) -> Family:
        if isinstance(spec, JacobiAngelescoSpec):
            return JacobiAngelesco(spec, ctx)
        if isinstance(spec, JacobiPineiroSpec):
            return JacobiPineiro(spec, ctx)
        if isinstance(spec, MultipleLaguerre1Spec):
            return MultipleLaguerre1(spec, ctx)
        if isinstance(spec, MultipleLaguerre2Spec):
            return MultipleLaguerre2(spec, ctx)
        if isinstance(spec, SorokinLaguerreSpec):
            return SorokinLaguerre(spec, ctx)
        if isinstance(spec, KBesselSpec):
            return KBesselMOP(spec, ctx)
        if isinstance(spec, IBesselSpec):
            return IBesselMOP(spec, ctx)
        if isinstance(spec, MeijerGSpec):
            return MeijerGMOP(spec, ctx)
        raise InvalidParameters(f"unknown family {type(spec).__name__}")

    @staticmethod
    def for_theorem(theorem_id: int, spec: FamilySpec, ctx: PrecisionContext) -> Family:
        family = FamilyFactory.create(spec, ctx)
        if family.theorem_id != theorem_id:
            raise InvalidParameters(f"theorem {theorem_id} does not concern {spec.kind}")
        return family
