"""
Real zeros of polynomials and of the entire functions 0Fr(-; alpha+1; -z) and J_alpha.

Every zero is bracketed by a sign change on a scan grid and then polished by
plain bisection down to 10^-(digits-guard) relative width.
"""

from __future__ import annotations

import logging
from typing import Any, Callable, List, Optional, Sequence, Tuple

import mpmath

from mopasym.core.errors import InvalidParameters, SearchExhausted, ZeroCountMismatch
from mopasym.core.gen_bessel import GenBesselSpec
from mopasym.core.hypergeom import hyp0f
from mopasym.core.precision import BigPoly, PrecisionContext, to_mpf
from mopasym.core.schema import ZeroList

logger = logging.getLogger(__name__)

GRID_POINTS_PER_DEGREE = 16
MAX_GRID_DOUBLINGS = 6
FIRST_ZERO_STEP = mpmath.mpf("1.02")

Bracket = Tuple[Any, Any, Any, Any]


def _sign(value: Any) -> int:
    return (value > 0) - (value < 0)


def bisect(f: Callable[[Any], Any], a: Any, b: Any, fa: Any, fb: Any, ctx: PrecisionContext) -> Tuple[Any, Any]:
    """Root of f in [a, b] given opposite signs at the ends; returns (root, final width)."""
    tol = ctx.tolerance
    for _ in range(20 * ctx.digits):
        width = b - a
        if width <= tol * max(abs(a), abs(b)) or width == 0:
            break
        mid = (a + b) / 2
        fm = f(mid)
        if fm == 0:
            return mid, mpmath.mpf(0)
        if _sign(fm) == _sign(fa):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return (a + b) / 2, b - a


def _brackets(points: Sequence[Any], values: Sequence[Any]) -> List[Bracket]:
    found: List[Bracket] = []
    for i in range(len(points) - 1):
        if values[i] == 0:
            continue
        if values[i + 1] == 0:
            # exact grid hit; bracket around it with the next nonzero value
            j = i + 2
            while j < len(points) and values[j] == 0:
                j += 1
            if j < len(points) and _sign(values[i]) != _sign(values[j]):
                found.append((points[i], points[j], values[i], values[j]))
            continue
        if _sign(values[i]) != _sign(values[i + 1]):
            found.append((points[i], points[i + 1], values[i], values[i + 1]))
    return found


# ============================================================================
# Polynomials
# ============================================================================


def cauchy_bound(p: BigPoly) -> Any:
    """Every zero satisfies |x| < 1 + max |a_i / a_n|."""
    lead = abs(to_mpf(p.leading))
    return 1 + max((abs(to_mpf(c)) / lead for c in p.coeffs[:-1]), default=mpmath.mpf(0))


def _poly_evaluator(p: BigPoly, reach: Any, ctx: PrecisionContext) -> Tuple[Callable[[Any], Any], int]:
    """Horner evaluation with enough extra digits to absorb monomial-basis cancellation."""
    with ctx.workdps(ctx.guard):
        size = mpmath.fsum(abs(to_mpf(c)) * mpmath.power(max(1, reach), i) for i, c in enumerate(p.coeffs))
        extra = ctx.guard + max(0, int(mpmath.ceil(mpmath.log10(size)))) if size > 0 else ctx.guard
    with ctx.workdps(extra):
        coeffs = [to_mpf(c) for c in reversed(p.coeffs)]

    def evaluate(x: Any) -> Any:
        with ctx.workdps(extra):
            acc = mpmath.mpf(0)
            for c in coeffs:
                acc = acc * x + c
            return acc

    return evaluate, extra


def poly_real_zeros(
    p: BigPoly,
    interval: Tuple[Any, Any],
    ctx: PrecisionContext,
    expected: Optional[int] = None,
) -> ZeroList:
    """All zeros of p in [a, b] by sign-change bracketing on an adaptive grid, then bisection."""
    if p.is_zero():
        raise InvalidParameters("the zero polynomial has no isolated zeros")
    with ctx.workdps(ctx.guard):
        a, b = to_mpf(interval[0]), to_mpf(interval[1])
        if not a < b:
            raise InvalidParameters("zero search interval must satisfy a < b")
        f, extra = _poly_evaluator(p, max(abs(a), abs(b)), ctx)
        points_per = GRID_POINTS_PER_DEGREE * max(1, p.degree)
        brackets: List[Bracket] = []
        for attempt in range(MAX_GRID_DOUBLINGS + 1):
            count = points_per * 2 ** attempt
            grid = [a + (b - a) * i / count for i in range(count + 1)]
            # geometric refinement toward both ends, where zeros of orthogonal polynomials cluster
            edge = (b - a) / count
            for i in range(1, 4 * max(1, p.degree)):
                offset = edge * mpmath.power(2, -i)
                grid.extend([a + offset, b - offset])
            grid = sorted(set(grid))
            values = [f(x) for x in grid]
            brackets = _brackets(grid, values)
            if expected is None or len(brackets) >= expected:
                break
            logger.warning("Found %s of %s sign changes, refining grid", len(brackets), expected)
        if expected is not None and len(brackets) < expected:
            raise ZeroCountMismatch(
                f"detected {len(brackets)} sign changes in [{mpmath.nstr(a, 8)}, {mpmath.nstr(b, 8)}], expected {expected}"
            )
        roots: List[Any] = []
        widest = mpmath.mpf(0)
        for lo, hi, flo, fhi in brackets:
            root, width = bisect(f, lo, hi, flo, fhi, ctx)
            roots.append(root)
            widest = max(widest, width)
    with ctx.workdps():
        values_out = [+x for x in roots]
    return ZeroList(kind="polynomial", values=values_out, achieved_tolerance=widest)


def poly_first_zeros(
    p: BigPoly,
    count: int,
    ctx: PrecisionContext,
    upper: Optional[Any] = None,
) -> ZeroList:
    """
    The `count` smallest positive zeros of p, scanning geometrically from the
    Cauchy lower bound toward `upper` (default the Cauchy upper bound).
    """
    if count < 1:
        raise InvalidParameters("count must be positive")
    with ctx.workdps(ctx.guard):
        bound = cauchy_bound(p) if upper is None else to_mpf(upper)
        f, _ = _poly_evaluator(p, bound, ctx)
        c0 = abs(to_mpf(p.coeffs[0]))
        if c0 == 0:
            raise InvalidParameters("polynomial vanishes at 0; the first-zero scan needs p(0) != 0")
        biggest = max(abs(to_mpf(c)) for c in p.coeffs[1:]) if p.degree > 0 else mpmath.mpf(0)
        x = c0 / (c0 + biggest) / 2
        fx = f(x)
        roots: List[Any] = []
        widest = mpmath.mpf(0)
        while len(roots) < count:
            if x >= bound:
                raise ZeroCountMismatch(f"found {len(roots)} of {count} zeros below {mpmath.nstr(bound, 8)}")
            nxt = min(x * FIRST_ZERO_STEP, bound)
            fn = f(nxt)
            if fn == 0:
                roots.append(nxt)
                nxt = nxt * FIRST_ZERO_STEP
                fn = f(nxt)
            elif _sign(fn) != _sign(fx):
                root, width = bisect(f, x, nxt, fx, fn, ctx)
                roots.append(root)
                widest = max(widest, width)
            x, fx = nxt, fn
    with ctx.workdps():
        values_out = [+r for r in roots]
    return ZeroList(kind="polynomial", values=values_out, achieved_tolerance=widest)


# ============================================================================
# Entire functions
# ============================================================================


def _geometric_mean(values: Sequence[Any]) -> Any:
    product = mpmath.mpf(1)
    for v in values:
        product *= to_mpf(v)
    return mpmath.root(product, len(values))


def genbessel_zeros(spec: GenBesselSpec, count: int, ctx: PrecisionContext) -> ZeroList:
    """First `count` positive zeros f_k of z -> 0Fr(-; alpha_1+1, ..., alpha_r+1; -z)."""
    if not 1 <= count <= 20:
        raise InvalidParameters("count must lie in 1..20")
    den = spec.den_params
    if any(to_mpf(b) <= 0 for b in den):
        raise InvalidParameters("zero search needs alpha_j > -1")

    def g(z: Any) -> Any:
        return to_mpf(hyp0f(den, -z, ctx))

    with ctx.workdps(ctx.guard):
        scale = _geometric_mean(den)
        bound = mpmath.power(10 * count, spec.r + 1) * scale
        window = scale
        samples = 40 * count
        brackets: List[Bracket] = []
        while True:
            step = window / samples
            grid = [step * i for i in range(1, samples + 1)]
            values = [g(z) for z in grid]
            brackets = _brackets(grid, values)
            if len(brackets) >= count:
                break
            if window > bound:
                raise SearchExhausted(
                    f"found {len(brackets)} of {count} zeros of 0F{spec.r} below {mpmath.nstr(bound, 6)}"
                )
            window *= mpmath.mpf("1.5")
        # halve the step once so that close pairs cannot hide inside one cell
        grid = [step * i / 2 for i in range(1, 2 * samples + 1)]
        brackets = _brackets(grid, [g(z) for z in grid])[:count]
        logger.debug("Bracketed %s zeros of 0F%s within %s", count, spec.r, mpmath.nstr(window, 6))
        roots: List[Any] = []
        widest = mpmath.mpf(0)
        for lo, hi, flo, fhi in brackets:
            root, width = bisect(g, lo, hi, flo, fhi, ctx)
            roots.append(root)
            widest = max(widest, width)
    with ctx.workdps():
        values_out = [+r for r in roots]
    return ZeroList(kind="genbessel", values=values_out, achieved_tolerance=widest)


def bessel_zeros(alpha: Any, count: int, ctx: PrecisionContext) -> ZeroList:
    """First `count` positive zeros j_k of J_alpha, from j_k = 2 sqrt(f_k) with r = 1."""
    if alpha <= -1:
        raise InvalidParameters("bessel_zeros needs alpha > -1")
    f = genbessel_zeros(GenBesselSpec(alphas=(alpha,)), count, ctx)
    with ctx.workdps():
        values = [2 * mpmath.sqrt(v) for v in f.values]
        tolerance = f.achieved_tolerance / mpmath.sqrt(f.values[0]) if f.values else f.achieved_tolerance
    return ZeroList(kind="bessel", values=values, achieved_tolerance=tolerance)
