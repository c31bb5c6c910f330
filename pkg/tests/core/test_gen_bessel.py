from fractions import Fraction

import mpmath
import pytest

from mopasym.core.errors import DegenerateParameters, InvalidParameters, OutOfDomain
from mopasym.core.gen_bessel import (
    GenBesselSpec,
    WrightSpec,
    bessel_j,
    check_derivative_identities,
    derivative_identity_coefficient_defects,
    eval_y0,
    eval_yj,
    ode_residual,
    wright_multiplication_constant,
    wright_phi,
    y0_series,
    yj_series,
)

TINY = mpmath.mpf(10) ** -35

PARAMETER_SETS = [
    (Fraction(1, 3),),
    (Fraction(1, 3), Fraction(-1, 5)),
    (Fraction(2, 3), Fraction(1, 5), Fraction(-3, 7)),
]


@pytest.mark.parametrize("alphas", PARAMETER_SETS)
def test_fundamental_solutions_solve_the_ode_exactly(alphas):
    spec = GenBesselSpec(alphas=alphas)
    series = y0_series(spec, 40)
    assert ode_residual(series.coeffs, series.sigma, spec, 40) == 0
    for j in range(1, spec.r + 1):
        shifted = yj_series(spec, j, 40)
        assert shifted.sigma == -alphas[j - 1]
        assert ode_residual(shifted.coeffs, shifted.sigma, spec, 40) == 0


def test_ode_residual_detects_wrong_series():
    spec = GenBesselSpec(alphas=(Fraction(1, 3),))
    series = y0_series(spec, 10)
    broken = list(series.coeffs)
    broken[3] *= 2
    assert ode_residual(broken, series.sigma, spec, 10) > 0


@pytest.mark.parametrize("alphas", PARAMETER_SETS)
def test_differentiation_formulas_exact(alphas):
    defects = derivative_identity_coefficient_defects(GenBesselSpec(alphas=alphas), 40)
    assert defects.first == 0
    assert defects.second == 0


def test_differentiation_formulas_numerically(ctx):
    spec = GenBesselSpec(alphas=(Fraction(1, 3), Fraction(3, 4)))
    defects = check_derivative_identities(spec, mpmath.mpf("2.5"), ctx)
    assert defects.first < TINY
    assert defects.second < TINY


def test_y0_matches_mpmath(ctx):
    spec = GenBesselSpec(alphas=(Fraction(1, 3), Fraction(-1, 5)))
    value = eval_y0(spec, -7, ctx)
    with ctx.workdps():
        expected = mpmath.hyper([], [mpmath.mpf(4) / 3, mpmath.mpf(4) / 5], -7)
        assert abs(value - expected) < TINY


def test_yj_matches_mpmath(ctx):
    spec = GenBesselSpec(alphas=(Fraction(1, 3), Fraction(-1, 5)))
    value = eval_yj(spec, 1, Fraction(3, 2), ctx)
    with ctx.workdps():
        z = mpmath.mpf(3) / 2
        expected = mpmath.power(z, -mpmath.mpf(1) / 3) * mpmath.hyper([], [mpmath.mpf(2) / 3, 1 - mpmath.mpf(1) / 5 - mpmath.mpf(1) / 3], z)
        assert abs(value - expected) < TINY


def test_yj_needs_fundamental_parameters(ctx):
    with pytest.raises(DegenerateParameters):
        eval_yj(GenBesselSpec(alphas=(Fraction(1),)), 1, 1, ctx)
    with pytest.raises(DegenerateParameters):
        eval_yj(GenBesselSpec(alphas=(Fraction(1, 2), Fraction(3, 2))), 1, 1, ctx)
    with pytest.raises(OutOfDomain):
        eval_yj(GenBesselSpec(alphas=(Fraction(1, 2),)), 1, -1, ctx)
    with pytest.raises(InvalidParameters):
        eval_yj(GenBesselSpec(alphas=(Fraction(1, 2),)), 2, 1, ctx)


def test_spec_requires_parameters():
    with pytest.raises(InvalidParameters):
        GenBesselSpec(alphas=())


@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 2), Fraction(5, 3)])
def test_bessel_j_matches_mpmath(ctx, alpha):
    value = bessel_j(alpha, mpmath.mpf("7.25"), ctx)
    with ctx.workdps():
        assert abs(value - mpmath.besselj(mpmath.mpf(alpha.numerator) / alpha.denominator, mpmath.mpf("7.25"))) < TINY


def test_wright_series_and_hypergeometric_routes_agree(ctx):
    spec = WrightSpec(rho=2, beta=Fraction(1, 2))
    series = wright_phi(spec, mpmath.mpf("1.7"), ctx, method="series")
    closed = wright_phi(spec, mpmath.mpf("1.7"), ctx, method="hypergeometric")
    with ctx.workdps():
        direct = mpmath.nsum(lambda k: mpmath.power(mpmath.mpf("1.7"), k) * mpmath.rgamma(2 * k + mpmath.mpf(1) / 2) / mpmath.factorial(k), [0, mpmath.inf])
        assert abs(series - closed) < TINY
        assert abs(series - direct) < TINY


def test_wright_multiplication_constant_r1(ctx):
    # rho = 1: phi(z) = 0F1(-; beta; z) / Gamma(beta)
    spec = WrightSpec(rho=1, beta=Fraction(3, 2))
    with ctx.workdps():
        assert abs(wright_multiplication_constant(spec, ctx) - mpmath.rgamma(mpmath.mpf(3) / 2)) < TINY


def test_wright_series_with_pole_parameters(ctx):
    # beta = -1 puts poles of Gamma in the first terms; they contribute zero
    spec = WrightSpec(rho=1, beta=-1)
    value = wright_phi(spec, mpmath.mpf(2), ctx)
    with ctx.workdps():
        direct = mpmath.nsum(lambda k: mpmath.power(2, k) * mpmath.rgamma(k - 1) / mpmath.factorial(k), [0, mpmath.inf])
        assert abs(value - direct) < TINY


def test_wright_rejects_nonpositive_rho():
    with pytest.raises(InvalidParameters):
        WrightSpec(rho=0, beta=1)
