"""
Generalized hypergeometric series pFq with controlled truncation.

This is the single series engine used by every family and limit function.
Terminating series (a numerator parameter equal to -n) are summed in full,
exactly when all inputs are rational. Entire and disc-convergent series are
summed at extended precision until three consecutive terms fall below
eps * |partial sum|; cancellation for large |z| is absorbed by re-running with
extra working digits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, List, Optional, Sequence, Tuple

import mpmath

from mopasym.core.errors import DivergentSeries, InvalidDenominator
from mopasym.core.precision import (
    Number,
    PrecisionContext,
    is_exact,
    is_nonpositive_integer,
    nearest_int,
    to_mpf,
)

logger = logging.getLogger(__name__)

MAX_TERMS = 200_000
SMALL_TERMS_TO_STOP = 3


@dataclass(frozen=True)
class HypSeriesSpec:
    """Numerator and denominator parameter lists of pFq."""

    num_params: Tuple[Number, ...] = field(default_factory=tuple)
    den_params: Tuple[Number, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "num_params", tuple(_normalize(a) for a in self.num_params))
        object.__setattr__(self, "den_params", tuple(_normalize(b) for b in self.den_params))

    @property
    def p(self) -> int:
        return len(self.num_params)

    @property
    def q(self) -> int:
        return len(self.den_params)

    @property
    def is_exact(self) -> bool:
        return is_exact(*self.num_params, *self.den_params)

    def terminating_degree(self, ctx: Optional[PrecisionContext] = None) -> Optional[int]:
        """n such that the series has exactly n+1 terms, or None if nonterminating."""
        degrees = [-nearest_int(a) for a in self.num_params if is_nonpositive_integer(a, ctx)]
        return min(degrees) if degrees else None

    def validate(self, ctx: Optional[PrecisionContext] = None) -> None:
        for b in self.den_params:
            if is_nonpositive_integer(b, ctx):
                raise InvalidDenominator(f"denominator parameter {b} is a nonpositive integer")


@dataclass(frozen=True)
class SeriesValue:
    value: Number
    terms_used: int


def _normalize(value: Any) -> Number:
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    return value


def pfq_term_recurrence(spec: HypSeriesSpec, k: int) -> Number:
    """term_{k+1} / (term_k * z) = prod(a+k) / prod(b+k) / (k+1)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    ratio: Any = Fraction(1, k + 1) if spec.is_exact else mpmath.mpf(1) / (k + 1)
    for a in spec.num_params:
        ratio *= a + k if spec.is_exact else to_mpf(a) + k
    for b in spec.den_params:
        ratio /= b + k if spec.is_exact else to_mpf(b) + k
    return ratio


def pfq_coefficients(spec: HypSeriesSpec, count: int) -> List[Number]:
    """Taylor coefficients c_0..c_{count-1} of pFq (exact for exact parameters)."""
    spec.validate()
    coefficients: List[Number] = []
    current: Any = Fraction(1) if spec.is_exact else mpmath.mpf(1)
    for k in range(count):
        coefficients.append(current)
        current = current * pfq_term_recurrence(spec, k)
    return coefficients


def _accumulate(
    first: Number,
    next_term: Callable[[Number, int], Number],
    ctx: PrecisionContext,
    length: Optional[int],
    min_terms: int = 0,
) -> Tuple[Number, int, Any]:
    """Sum terms; `length` = exact number of terms for terminating series."""
    term = first
    total = term
    largest = abs(term)
    small = 0
    k = 0
    eps = ctx.eps
    while True:
        if length is not None and k + 1 >= length:
            break
        term = next_term(term, k)
        k += 1
        total += term
        magnitude = abs(term)
        if magnitude > largest:
            largest = magnitude
        if length is None:
            if k >= min_terms and magnitude <= eps * abs(total):
                small += 1
                if small >= SMALL_TERMS_TO_STOP:
                    break
            else:
                small = 0
            if k > MAX_TERMS:
                raise DivergentSeries(f"series did not converge within {MAX_TERMS} terms")
    return total, k + 1, largest


def _cancellation_digits(total: Any, largest: Any) -> int:
    if total == 0 or largest == 0:
        return 0
    ratio = largest / abs(total)
    if ratio <= 1:
        return 0
    return int(mpmath.ceil(mpmath.log10(ratio)))


def _entire_growth_digits(spec: HypSeriesSpec, z: Any) -> int:
    """Rough log10 of the largest term of an entire pFq at |z|."""
    order = spec.q - spec.p + 1
    if order <= 0:
        return 0
    size = float(abs(to_mpf(z)))
    if size == 0:
        return 0
    return int(math.ceil(order * size ** (1.0 / order) / math.log(10)))


def sum_series(
    first: Number,
    next_term: Callable[[Number, int], Number],
    ctx: PrecisionContext,
    length: Optional[int] = None,
    min_terms: int = 0,
    extra: int = 0,
) -> SeriesValue:
    """
    Sum a real-mode series at working precision with cancellation control.

    `first` and `next_term` are evaluated inside the raised precision, so they
    must build their mpmath values lazily.
    """
    extra = extra + ctx.guard
    for _ in range(4):
        with ctx.workdps(extra):
            total, used, largest = _accumulate(
                first() if callable(first) else first, next_term, ctx, length, min_terms
            )
        lost = _cancellation_digits(total, largest)
        if lost <= extra - ctx.guard:
            break
        logger.debug("Series lost %s digits to cancellation, retrying with more precision", lost)
        extra = lost + 2 * ctx.guard
    with ctx.workdps():
        return SeriesValue(value=+total, terms_used=used)


def sum_power_series(
    coefficient: Callable[[int], Number],
    z: Any,
    ctx: PrecisionContext,
    min_terms: int = 0,
) -> SeriesValue:
    """Sum of coefficient(k) * z^k with the three-small-terms truncation rule."""

    def first() -> Number:
        return to_mpf(coefficient(0))

    state = {"power": None}

    def next_term(_: Number, k: int) -> Number:
        if state["power"] is None or k == 0:
            state["power"] = to_mpf(z)
        else:
            state["power"] = state["power"] * to_mpf(z)
        return to_mpf(coefficient(k + 1)) * state["power"]

    return sum_series(first, next_term, ctx, min_terms=min_terms)


def eval_pfq(spec: HypSeriesSpec, z: Any, ctx: PrecisionContext) -> SeriesValue:
    """
    Evaluate pFq(num; den; z).

    Raises:
        InvalidDenominator: a denominator parameter is a nonpositive integer.
        DivergentSeries: nonterminating series with p > q+1, or p = q+1 and |z| >= 1.
    """
    spec.validate(ctx)
    length_n = spec.terminating_degree(ctx)
    if length_n is not None:
        if spec.is_exact and is_exact(z):
            zq = Fraction(z)
            term = Fraction(1)
            total = Fraction(1)
            for k in range(length_n):
                term = term * pfq_term_recurrence(spec, k) * zq
                total += term
            return SeriesValue(value=total, terms_used=length_n + 1)
    elif spec.p > spec.q + 1:
        raise DivergentSeries(f"{spec.p}F{spec.q} with nonterminating parameters diverges")
    elif spec.p == spec.q + 1:
        with ctx.workdps():
            if abs(to_mpf(z)) >= 1:
                raise DivergentSeries(f"{spec.p}F{spec.q} requires |z| < 1, got |z| = {abs(to_mpf(z))}")

    num = spec.num_params
    den = spec.den_params

    def next_term(term: Number, k: int) -> Number:
        ratio = mpmath.mpf(1) / (k + 1)
        for a in num:
            ratio *= to_mpf(a) + k
        for b in den:
            ratio /= to_mpf(b) + k
        return term * ratio * to_mpf(z)

    extra = 0 if length_n is not None else _entire_growth_digits(spec, z)
    result = sum_series(
        lambda: mpmath.mpf(1),
        next_term,
        ctx,
        length=None if length_n is None else length_n + 1,
        extra=extra,
    )
    logger.debug("%sF%s summed with %s terms", spec.p, spec.q, result.terms_used)
    return result


def hyp0f(den_params: Sequence[Number], z: Any, ctx: PrecisionContext) -> Number:
    """Shorthand for 0Fr(-; den_params; z)."""
    return eval_pfq(HypSeriesSpec((), tuple(den_params)), z, ctx).value
