"""
Precision core: exact-rational and extended-precision arithmetic primitives.

Values are either ``fractions.Fraction`` (exact mode) or ``mpmath.mpf`` /
``mpmath.mpc`` (real mode). The mode is chosen once per computation by
inspecting the parameters: if everything is rational the whole pipeline stays
exact, otherwise everything is lifted to mpmath at the working precision.

Usage:
    from mopasym.core.precision import PrecisionContext, pochhammer, BigPoly

    ctx = PrecisionContext(digits=50)
    pochhammer(Fraction(1, 2), 3)          # Fraction(15, 8)
    BigPoly([1, 2, 1]).evaluate(3, ctx)    # Fraction(16, 1)
"""

from __future__ import annotations

import logging
import math
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Union

import mpmath
from pydantic import BaseModel, ConfigDict, Field, field_validator

logger = logging.getLogger(__name__)

Number = Union[Fraction, mpmath.mpf, mpmath.mpc]

# Digits used when parsing ``real:`` parameters; above the widest oracle precision.
_PARSE_DIGITS = 1000


class PrecisionContext(BaseModel):
    """
    Working precision shared by every series, solve and root search.

    Attributes:
        digits: Decimal working precision (>= 20).
        guard: Guard digits; truncation targets eps = 10^(-digits+guard).
    """

    model_config = ConfigDict(frozen=True)

    digits: int = Field(default=50, ge=20, description="Decimal working precision")
    guard: int = Field(default=10, ge=1, description="Guard digits")

    @field_validator("guard")
    @classmethod
    def _guard_below_digits(cls, value: int, info) -> int:
        digits = info.data.get("digits", 50)
        if value >= digits:
            raise ValueError("guard must be smaller than digits")
        return value

    @property
    def eps(self) -> mpmath.mpf:
        return mpmath.mpf(10) ** (self.guard - self.digits)

    @property
    def tolerance(self) -> mpmath.mpf:
        """Target for root polishing: 10^-(digits-guard)."""
        return self.eps

    @contextmanager
    def workdps(self, extra: int = 0) -> Iterator[None]:
        with mpmath.workdps(self.digits + extra):
            yield

    def refined(self, factor: int = 2) -> "PrecisionContext":
        return PrecisionContext(digits=self.digits * factor, guard=self.guard)

    @classmethod
    def from_settings(cls, digits: Optional[int] = None) -> "PrecisionContext":
        from mopasym.config import settings

        return cls(digits=digits or settings.DIGITS, guard=settings.GUARD)


# ============================================================================
# Scalar helpers
# ============================================================================


def is_exact(*values: Any) -> bool:
    """True when every value is an int or Fraction (bools excluded)."""
    for value in values:
        if isinstance(value, (list, tuple)):
            if not is_exact(*value):
                return False
        elif isinstance(value, bool) or not isinstance(value, (int, Fraction)):
            return False
    return True


def to_mpf(value: Any) -> Union[mpmath.mpf, mpmath.mpc]:
    """Lift a value to mpmath at the current working precision."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    if isinstance(value, (mpmath.mpf, mpmath.mpc)):
        return +value
    if isinstance(value, complex):
        return mpmath.mpc(value)
    return mpmath.mpf(value)


def unify(*values: Any) -> List[Number]:
    """
    Bring values to one arithmetic mode.

    mpf arithmetic does not accept Fraction operands, so a parameter set with
    a single real entry is lifted to mpf entirely (at parse precision, so that
    rationals keep their digits).
    """
    if is_exact(*values):
        return [Fraction(v) for v in values]
    with mpmath.workdps(max(mpmath.mp.dps, _PARSE_DIGITS)):
        return [to_mpf(v) for v in values]


def coerce(value: Any, exact: bool) -> Number:
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int) and not isinstance(value, bool):
            return Fraction(value)
        raise TypeError(f"cannot represent {value!r} exactly")
    return to_mpf(value)


def parse_param(value: Any) -> Number:
    """
    Parse a family or grid parameter.

    Integers and rational strings ("1/2", "0.25", "-3") stay exact; floats and
    strings prefixed with ``real:`` become mpmath reals (real mode).
    """
    if isinstance(value, (Fraction, mpmath.mpf, mpmath.mpc)):
        return value
    if isinstance(value, bool):
        raise ValueError("boolean is not a numeric parameter")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return mpmath.mpf(value)
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("real:"):
            with mpmath.workdps(_PARSE_DIGITS):
                return mpmath.mpf(text[len("real:"):].strip())
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a numeric parameter: {value!r}") from exc
    raise ValueError(f"not a numeric parameter: {value!r}")


def format_value(value: Any, digits: Optional[int] = None) -> str:
    """Exact values print as integers or p/q; reals print with `digits` significant figures."""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, Fraction):
        return str(value)
    return format_sci(value, digits or 15)


def format_sci(value: Any, digits: int) -> str:
    """Decimal scientific notation, locale independent."""
    real = to_mpf(value)
    if isinstance(real, mpmath.mpc):
        return f"{format_sci(real.real, digits)}{'+' if real.imag >= 0 else '-'}{format_sci(abs(real.imag), digits)}j"
    return mpmath.nstr(real, digits, min_fixed=0, max_fixed=0)


def is_integer(value: Number, ctx: Optional[PrecisionContext] = None) -> bool:
    if isinstance(value, int):
        return True
    if isinstance(value, Fraction):
        return value.denominator == 1
    tolerance = mpmath.mpf(10) ** (-((ctx.digits if ctx else mpmath.mp.dps) // 2))
    return abs(value - mpmath.nint(value)) < tolerance


def is_nonpositive_integer(value: Number, ctx: Optional[PrecisionContext] = None) -> bool:
    """Exact test on rationals; |a - round(a)| < 10^(-digits/2) on reals."""
    if isinstance(value, mpmath.mpc):
        if value.imag != 0:
            return False
        value = value.real
    if not is_integer(value, ctx):
        return False
    if isinstance(value, (int, Fraction)):
        return value <= 0
    return mpmath.nint(value) <= 0


def nearest_int(value: Number) -> int:
    if isinstance(value, Fraction):
        return round(value)
    return int(mpmath.nint(value))


# ============================================================================
# Pochhammer and binomials
# ============================================================================


def pochhammer(a: Number, k: int) -> Number:
    """(a)_k = a(a+1)...(a+k-1) by running product; (a)_0 = 1, exact for exact a."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    result: Number = Fraction(1) if is_exact(a) else mpmath.mpf(1)
    if isinstance(a, int):
        a = Fraction(a)
    for i in range(k):
        result *= a + i
    return result


def gen_binomial(a: Number, k: int) -> Number:
    """a(a-1)...(a-k+1)/k! = (-1)^k (-a)_k / k!."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if isinstance(a, int):
        a = Fraction(a)
    numerator: Number = Fraction(1) if is_exact(a) else mpmath.mpf(1)
    for i in range(k):
        numerator *= a - i
    return numerator / math.factorial(k)


def rising_sequence(a: Number, count: int) -> List[Number]:
    """[(a)_0, (a)_1, ..., (a)_{count-1}] sharing one running product."""
    values: List[Number] = []
    current: Number = Fraction(1) if is_exact(a) else mpmath.mpf(1)
    for i in range(count):
        values.append(current)
        current = current * (a + i)
    return values


# ============================================================================
# Multi-indices
# ============================================================================


class MultiIndex(BaseModel):
    """A multi-index (n_1, ..., n_r); total = |n|."""

    model_config = ConfigDict(frozen=True)

    parts: List[int] = Field(..., min_length=1)

    @field_validator("parts")
    @classmethod
    def _nonnegative(cls, value: List[int]) -> List[int]:
        if any(part < 0 for part in value):
            raise ValueError("multi-index parts must be nonnegative")
        return value

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def r(self) -> int:
        return len(self.parts)

    @classmethod
    def of(cls, *parts: int) -> "MultiIndex":
        return cls(parts=list(parts))

    @classmethod
    def from_ratios(cls, q: Sequence[Number], n: int) -> "MultiIndex":
        """n_j = floor(q_j n); |n| may differ from n."""
        return cls(parts=[int(mpmath.floor(to_mpf(qj) * n)) if not is_exact(qj) else math.floor(Fraction(qj) * n) for qj in q])


# ============================================================================
# Polynomials
# ============================================================================


class BigPoly:
    """
    Dense polynomial in the monomial basis; coeffs[i] multiplies x^i.

    Coefficients are Fractions (exact) or mpmath numbers. Trailing zeros are
    stripped so that the last coefficient is nonzero unless the polynomial is 0.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Any]):
        values = [Fraction(c) if isinstance(c, int) and not isinstance(c, bool) else c for c in coeffs]
        while len(values) > 1 and values[-1] == 0:
            values.pop()
        if not values:
            values = [Fraction(0)]
        self.coeffs: List[Number] = values

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Number:
        return self.coeffs[-1]

    @property
    def is_exact(self) -> bool:
        return is_exact(*self.coeffs)

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __repr__(self) -> str:
        return f"BigPoly({[format_value(c) for c in self.coeffs]})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BigPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def _common(self, other: "BigPoly") -> tuple:
        if self.is_exact and other.is_exact:
            return self.coeffs, other.coeffs
        return [to_mpf(c) for c in self.coeffs], [to_mpf(c) for c in other.coeffs]

    def __add__(self, other: "BigPoly") -> "BigPoly":
        a, b = self._common(other)
        size = max(len(a), len(b))
        a = a + [0] * (size - len(a))
        b = b + [0] * (size - len(b))
        return BigPoly(x + y for x, y in zip(a, b))

    def __sub__(self, other: "BigPoly") -> "BigPoly":
        return self + other.scale(-1)

    def __mul__(self, other: "BigPoly") -> "BigPoly":
        a_coeffs, b_coeffs = self._common(other)
        result: List[Any] = [0] * (len(a_coeffs) + len(b_coeffs) - 1)
        for i, a in enumerate(a_coeffs):
            if a == 0:
                continue
            for j, b in enumerate(b_coeffs):
                result[i + j] += a * b
        return BigPoly(result)

    def __pow__(self, exponent: int) -> "BigPoly":
        result = BigPoly([1])
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor: Any) -> "BigPoly":
        if is_exact(factor) and self.is_exact:
            return BigPoly(c * Fraction(factor) for c in self.coeffs)
        factor = to_mpf(factor)
        return BigPoly(to_mpf(c) * factor for c in self.coeffs)

    def monic(self) -> "BigPoly":
        if self.is_exact:
            return self.scale(1 / Fraction(self.leading))
        return self.scale(1 / to_mpf(self.leading))

    def derivative(self) -> "BigPoly":
        return BigPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def to_real(self, ctx: PrecisionContext) -> "BigPoly":
        with ctx.workdps():
            return BigPoly(to_mpf(c) for c in self.coeffs)

    def evaluate(self, x: Any, ctx: PrecisionContext) -> Number:
        return poly_eval(self, x, ctx)

    def __call__(self, x: Any, ctx: PrecisionContext) -> Number:
        return poly_eval(self, x, ctx)


def poly_eval(p: BigPoly, x: Any, ctx: PrecisionContext) -> Number:
    """Horner evaluation; exact when p and x are exact, otherwise at working precision."""
    if is_exact(x) and p.is_exact:
        x = Fraction(x)
        result: Number = Fraction(0)
        for c in reversed(p.coeffs):
            result = result * x + c
        return result
    with ctx.workdps():
        xv = to_mpf(x)
        acc = mpmath.mpf(0)
        for c in reversed(p.coeffs):
            acc = acc * xv + (c if isinstance(c, (mpmath.mpf, mpmath.mpc)) else to_mpf(c))
        return +acc


def series_product(a: Sequence[Any], b: Sequence[Any], length: int) -> List[Any]:
    """First `length` coefficients of the product of two power series."""
    out: List[Any] = []
    for m in range(length):
        acc: Any = 0
        for i in range(max(0, m - len(b) + 1), min(m, len(a) - 1) + 1):
            acc += a[i] * b[m - i]
        out.append(acc)
    return out


def binomial_series(exponent: Number, sign: int, length: int) -> List[Number]:
    """Coefficients of (1 + sign*x)^exponent up to x^(length-1)."""
    return [gen_binomial(exponent, i) * sign ** i for i in range(length)]


def proportionality_spread(p: BigPoly, q: BigPoly, ctx: PrecisionContext) -> Number:
    """
    Relative spread of the coefficient ratios p_i/q_i around the leading ratio.

    Exactly zero (Fraction) when both polynomials are exact and proportional.
    Mismatched zero patterns or degrees give +inf.
    """
    if p.degree != q.degree:
        return mpmath.inf
    exact = p.is_exact and q.is_exact
    if not exact:
        p, q = p.to_real(ctx), q.to_real(ctx)
    reference = p.leading / q.leading
    spread: Any = Fraction(0) if exact else mpmath.mpf(0)
    with ctx.workdps():
        for a, b in zip(p.coeffs, q.coeffs):
            if b == 0:
                if exact and a != 0:
                    return mpmath.inf
                if not exact and abs(a) > ctx.eps * abs(p.leading):
                    return mpmath.inf
                continue
            deviation = abs(a / b - reference) / abs(reference)
            if deviation > spread:
                spread = deviation
    return spread
