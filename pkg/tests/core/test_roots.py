from fractions import Fraction

import mpmath
import pytest

from mopasym.core.errors import InvalidParameters, ZeroCountMismatch
from mopasym.core.gen_bessel import GenBesselSpec
from mopasym.core.precision import BigPoly, to_mpf
from mopasym.core.roots import bessel_zeros, bisect, cauchy_bound, genbessel_zeros, poly_first_zeros, poly_real_zeros

CUBIC = BigPoly([-6, 11, -6, 1])  # (x-1)(x-2)(x-3)


def test_bisect_square_root_of_two(ctx):
    def f(x):
        return x * x - 2

    with ctx.workdps(ctx.guard):
        root, width = bisect(f, mpmath.mpf(1), mpmath.mpf(2), f(mpmath.mpf(1)), f(mpmath.mpf(2)), ctx)
        assert abs(root - mpmath.sqrt(2)) < mpmath.mpf("1e-39")
        assert width < mpmath.mpf("1e-39")


def test_cauchy_bound_encloses_roots():
    assert cauchy_bound(CUBIC) > 3


def test_shifted_legendre_zeros(ctx):
    zeros = poly_real_zeros(BigPoly([Fraction(1, 6), -1, 1]), (0, 1), ctx, expected=2)
    assert zeros.kind == "polynomial"
    with ctx.workdps():
        offset = 1 / (2 * mpmath.sqrt(3))
        assert mpmath.almosteq(zeros.values[0], mpmath.mpf(1) / 2 - offset, 1e-39)
        assert mpmath.almosteq(zeros.values[1], mpmath.mpf(1) / 2 + offset, 1e-39)


def test_chebyshev_zeros(ctx):
    zeros = poly_real_zeros(BigPoly([1, 0, -8, 0, 8]), (-1, 1), ctx, expected=4)
    with ctx.workdps():
        expected = sorted(mpmath.cos((2 * k - 1) * mpmath.pi / 8) for k in range(1, 5))
        for found, exact in zip(zeros.values, expected):
            assert mpmath.almosteq(found, exact, 1e-39)


def test_missing_zeros_are_reported(ctx):
    with pytest.raises(ZeroCountMismatch):
        poly_real_zeros(BigPoly([1, 0, 1]), (-2, 2), ctx, expected=1)


def test_bad_intervals_and_zero_polynomial(ctx):
    with pytest.raises(InvalidParameters):
        poly_real_zeros(CUBIC, (2, 1), ctx)
    with pytest.raises(InvalidParameters):
        poly_real_zeros(BigPoly([0]), (0, 1), ctx)


def test_first_zeros_scan_upwards(ctx):
    zeros = poly_first_zeros(CUBIC, 2, ctx)
    with ctx.workdps():
        assert mpmath.almosteq(zeros.values[0], 1, 1e-39)
        assert mpmath.almosteq(zeros.values[1], 2, 1e-39)


def test_first_zeros_respect_the_window(ctx):
    with pytest.raises(ZeroCountMismatch):
        poly_first_zeros(CUBIC, 3, ctx, upper=Fraction(5, 2))
    with pytest.raises(InvalidParameters):
        poly_first_zeros(BigPoly([0, 1]), 1, ctx)
    with pytest.raises(InvalidParameters):
        poly_first_zeros(CUBIC, 0, ctx)


@pytest.mark.parametrize("alpha", [0, Fraction(1, 2), Fraction(3, 2)])
def test_single_parameter_zeros_are_bessel_zeros(ctx, alpha):
    """0F1(-; alpha+1; -z) vanishes at z = j_{alpha,k}^2 / 4."""
    zeros = genbessel_zeros(GenBesselSpec(alphas=(alpha,)), 4, ctx)
    assert zeros.kind == "genbessel"
    with ctx.workdps():
        for k, f in enumerate(zeros.values, start=1):
            j = mpmath.besseljzero(to_mpf(alpha), k)
            assert mpmath.almosteq(f, j * j / 4, 1e-35)


def test_bessel_zeros_match_mpmath(ctx):
    zeros = bessel_zeros(0, 3, ctx)
    assert zeros.kind == "bessel"
    with ctx.workdps():
        for k, value in enumerate(zeros.values, start=1):
            assert mpmath.almosteq(value, mpmath.besseljzero(0, k), 1e-35)


def test_two_parameter_zeros_are_zeros(ctx):
    spec = GenBesselSpec(alphas=(Fraction(1, 2), Fraction(1, 3)))
    zeros = genbessel_zeros(spec, 3, ctx)
    with ctx.workdps():
        for f in zeros.values:
            assert abs(mpmath.hyper([], [mpmath.mpf(3) / 2, mpmath.mpf(4) / 3], -f)) < mpmath.mpf("1e-30")


@pytest.mark.parametrize("count", [0, 21])
def test_zero_count_bounds(ctx, count):
    with pytest.raises(InvalidParameters):
        genbessel_zeros(GenBesselSpec(alphas=(0,)), count, ctx)


def test_zero_search_needs_integrable_parameters(ctx):
    with pytest.raises(InvalidParameters):
        genbessel_zeros(GenBesselSpec(alphas=(Fraction(-3, 2),)), 1, ctx)
