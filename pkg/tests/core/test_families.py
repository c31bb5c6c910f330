from fractions import Fraction

import mpmath
import pytest

from mopasym.core.errors import InvalidParameters, OutOfDomain, SingularMomentMatrix
from mopasym.core.families import (
    FamilyFactory,
    IBesselMOP,
    JacobiAngelesco,
    d_ell,
    d_ell_convolution,
    d_ell_limit,
    ibessel_mop_eval,
    jacobi_angelesco_eval,
    jacobi_pineiro_eval,
    kbessel_mop_eval,
    meijerg_mop_eval,
    mh_limit_eval,
    mlaguerre1_eval,
    mlaguerre2_eval,
    sorokin_eval,
)
from mopasym.core.moments import orthogonality_residual
from mopasym.core.precision import BigPoly, MultiIndex, to_mpf
from mopasym.core.roots import bessel_zeros
from mopasym.core.schema import (
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


def close(a, b, tol="1e-40"):
    with mpmath.workdps(80):
        return abs(to_mpf(a) - to_mpf(b)) <= mpmath.mpf(tol) * (1 + abs(to_mpf(b)))


# -- d_ell -----------------------------------------------------------------


@pytest.mark.parametrize("ell", range(8))
def test_d_ell_agrees_with_convolution(ell):
    alpha, gamma = Fraction(1, 2), Fraction(1, 3)
    assert d_ell(5, alpha, gamma, ell) == d_ell_convolution(5, alpha, gamma, ell)


def test_d_ell_limits():
    assert d_ell_limit(0) == 1
    assert d_ell_limit(2) == -1
    assert d_ell_limit(3) == 0
    assert d_ell_limit(4) == Fraction(1, 2)
    assert d_ell_limit(6) == Fraction(-1, 6)


def test_d_ell_at_integer_exponents():
    # (1-z)(1+z) = 1 - z^2
    assert [d_ell(1, 0, 0, ell) for ell in range(3)] == [1, 0, -1]


# -- explicit polynomials ----------------------------------------------------


def test_angelesco_lowest_diagonal(ctx):
    family = JacobiAngelesco(JacobiAngelescoSpec(alpha=0, beta=0, gamma=0), ctx)
    nvec = family.index(1)
    assert family.coefficients(nvec) == BigPoly([-1, 0, 3])
    assert family.normalized_coefficients(nvec) == BigPoly([1, 0, -3])
    assert family.oracle(nvec) == BigPoly([Fraction(-1, 3), 0, 1])
    assert family.coefficients(nvec).leading == family.leading_coefficient(1)


def test_angelesco_needs_diagonal_indices(ctx):
    family = JacobiAngelesco(JacobiAngelescoSpec(), ctx)
    with pytest.raises(InvalidParameters):
        family.coefficients(MultiIndex.of(2, 1))


def test_angelesco_series_matches_polynomial(ctx):
    spec = JacobiAngelescoSpec(alpha="1/2", beta="1/3", gamma="1/4")
    family = JacobiAngelesco(spec, ctx)
    x = Fraction(2, 5)
    assert close(jacobi_angelesco_eval(4, spec, x, ctx), family.evaluate(family.index(4), x))
    with pytest.raises(OutOfDomain):
        jacobi_angelesco_eval(4, spec, Fraction(9995, 10000), ctx)


def test_pineiro_degree_one_is_shifted_legendre(ctx):
    family = FamilyFactory.create(JacobiPineiroSpec(alphas=[0], beta=0), ctx)
    assert family.coefficients(MultiIndex.of(1)) == BigPoly([Fraction(-1, 2), 1])


def test_pineiro_routes_agree(ctx):
    spec = JacobiPineiroSpec(alphas=["1/3", "-1/4"], beta="1/2")
    family = FamilyFactory.create(spec, ctx)
    nvec = MultiIndex.of(3, 2)
    x = Fraction(1, 3)
    value = jacobi_pineiro_eval(nvec, spec, x, ctx)
    assert close(value.raw, family.evaluate(nvec, x))
    assert close(value.normalized, family.evaluate_normalized(nvec, x))
    # beyond x = 1 the polynomial route takes over
    outside = jacobi_pineiro_eval(nvec, spec, Fraction(3, 2), ctx)
    assert close(outside.raw, family.evaluate(nvec, Fraction(3, 2)))


def test_laguerre1_degree_one(ctx):
    family = FamilyFactory.create(MultipleLaguerre1Spec(alphas=[0]), ctx)
    nvec = MultiIndex.of(1)
    assert family.evaluate(nvec, 0) == -1
    assert close(mlaguerre1_eval(nvec, family.spec, 0, ctx), 1)


def test_laguerre1_series_matches_polynomial(ctx):
    spec = MultipleLaguerre1Spec(alphas=["1/3", "-1/4", "1/5"])
    family = FamilyFactory.create(spec, ctx)
    nvec = MultiIndex.of(3, 2, 2)
    assert close(mlaguerre1_eval(nvec, spec, Fraction(7, 4), ctx), family.evaluate_normalized(nvec, Fraction(7, 4)))


def test_laguerre2_explicit_sum_matches_polynomial(ctx):
    spec = MultipleLaguerre2Spec(alpha="1/2", cs=[1, 3])
    family = FamilyFactory.create(spec, ctx)
    nvec = MultiIndex.of(3, 2)
    x = Fraction(5, 2)
    assert mlaguerre2_eval(nvec, spec, x, ctx) == family.evaluate(nvec, x)


def test_sorokin_series_matches_polynomial(ctx):
    spec = SorokinLaguerreSpec(p="1/2", r=2)
    family = FamilyFactory.create(spec, ctx)
    nvec = MultiIndex.of(3)
    assert family.coefficients(nvec).degree == 6
    assert family.coefficients(nvec).leading == Fraction(-1, 6)
    assert close(sorokin_eval(3, Fraction(1, 2), 2, Fraction(3, 4), ctx), family.evaluate(nvec, Fraction(3, 4)))


def test_kbessel_degree_one(ctx):
    assert kbessel_mop_eval(1, 0, 1, 3, ctx) == 1
    family = FamilyFactory.create(KBesselSpec(alpha=0, nu=1), ctx)
    assert family.coefficients(MultiIndex.of(1)) == BigPoly([-2, 1])


def test_meijerg_degree_zero(ctx):
    assert meijerg_mop_eval(0, [Fraction(1, 2), Fraction(1, 3)], Fraction(7), ctx) == 1


def test_single_index_families_reject_multi_indices(ctx):
    family = FamilyFactory.create(MeijerGSpec(nus=["1/2", "1/3"]), ctx)
    with pytest.raises(InvalidParameters):
        family.coefficients(MultiIndex.of(1, 1))


@pytest.mark.parametrize(
    "spec, n",
    [
        (JacobiAngelescoSpec(alpha=1, beta="1/2", gamma=2), 3),
        (JacobiPineiroSpec(alphas=["1/3", "-1/4"], beta="1/2"), 5),
        (MultipleLaguerre1Spec(alphas=["1/3", "-1/4", "1/5"]), 6),
        (MultipleLaguerre2Spec(alpha="1/2", cs=[1, 3]), 5),
        (SorokinLaguerreSpec(p="1/2", r=2), 3),
        (KBesselSpec(alpha="1/2", nu="1/3"), 5),
        (MeijerGSpec(nus=["1/2", "1/3", "1/4"]), 5),
    ],
)
def test_explicit_formula_agrees_with_moment_oracle(ctx, spec, n):
    """Exact rational parameters: the monic explicit polynomial is the oracle polynomial."""
    family = FamilyFactory.create(spec, ctx)
    explicit = family.coefficients(family.index(n))
    assert explicit.scale(1 / explicit.leading) == family.oracle(family.index(n))


def test_real_explicit_formula_agrees_with_oracle(ctx):
    family = FamilyFactory.create(JacobiPineiroSpec(alphas=["real:0.3", "real:0.75"], beta="real:0.5"), ctx)
    nvec = family.index(4)
    explicit, oracle = family.coefficients(nvec), family.oracle(nvec)
    assert all(close(a, b, "1e-30") for a, b in zip(explicit.coeffs, oracle.coeffs))


def test_ibessel_is_monic_and_orthogonal(ctx):
    family = IBesselMOP(IBesselSpec(nu="1/2", c=2), ctx)
    nvec = MultiIndex.of(5)
    poly = family.coefficients(nvec)
    assert poly.degree == 5
    assert poly.leading == 1
    assert orthogonality_residual(poly, family.catalog(), family.oracle_index(nvec), ctx) == 0
    assert ibessel_mop_eval(5, Fraction(1, 2), 2, Fraction(1, 3), ctx) == family.evaluate(nvec, Fraction(1, 3))


def test_ibessel_real_oracle_is_accurate(ctx):
    """The widened real system agrees with the exact one at a rational parameter set."""
    exact = IBesselMOP(IBesselSpec(nu="1/2", c=2), ctx).coefficients(MultiIndex.of(12))
    real = IBesselMOP(IBesselSpec(nu="real:0.5", c="real:2"), ctx).coefficients(MultiIndex.of(12))
    assert all(close(a, b, "1e-35") for a, b in zip(exact.coeffs, real.coeffs))


# -- limits ----------------------------------------------------------------


@pytest.mark.parametrize(
    "theorem, spec",
    [
        (1, JacobiAngelescoSpec(beta="1/2")),
        (2, JacobiPineiroSpec(alphas=["1/3", "-1/4"])),
        (3, MultipleLaguerre1Spec(alphas=["1/3"])),
        (4, MultipleLaguerre2Spec(alpha="1/2", cs=[1, 3])),
        (6, KBesselSpec(alpha=0, nu=1)),
        (8, MeijerGSpec(nus=["1/2", "1/3"])),
    ],
)
def test_limits_are_one_at_the_origin(ctx, theorem, spec):
    assert close(mh_limit_eval(theorem, spec, 0, ctx), 1)


def test_constant_carrying_limits_at_the_origin(ctx):
    with ctx.workdps():
        sorokin = mh_limit_eval(5, SorokinLaguerreSpec(p="1/2", r=2), 0, ctx)
        assert close(sorokin, mpmath.rgamma(mpmath.mpf(3) / 2))
        ibessel = mh_limit_eval(7, IBesselSpec(nu="1/2", c=2), 0, ctx)
        assert close(ibessel, mpmath.exp(mpmath.mpf(1) / 2) * mpmath.rgamma(mpmath.mpf(3) / 2))


def test_kbessel_limit_against_mpmath(ctx):
    with ctx.workdps():
        expected = mpmath.hyper([], [1, 2], -mpmath.mpf(3) / 2)
    assert close(mh_limit_eval(6, KBesselSpec(alpha=0, nu=1), Fraction(3, 2), ctx), expected)


def test_laguerre1_limit_uses_ratio_product(ctx):
    spec = MultipleLaguerre1Spec(alphas=["1/3", "-1/4"])
    with ctx.workdps():
        expected = mpmath.hyper([], [mpmath.mpf(4) / 3, mpmath.mpf(3) / 4], -mpmath.mpf(2) * 3 / 16)
    assert close(mh_limit_eval(3, spec, 2, ctx, RatioWeights(q=["1/4", "3/4"])), expected)


def test_limit_rejects_mismatched_theorems(ctx):
    with pytest.raises(InvalidParameters):
        mh_limit_eval(4, KBesselSpec(), 1, ctx)
    with pytest.raises(InvalidParameters):
        mh_limit_eval(9, KBesselSpec(), 1, ctx)
    with pytest.raises(InvalidParameters):
        FamilyFactory.for_theorem(2, KBesselSpec(), ctx)


def test_scaled_argument_and_zero_scale(ctx):
    kbessel = FamilyFactory.create(KBesselSpec(), ctx)
    assert kbessel.scaled_argument(Fraction(3), 6) == Fraction(1, 2)
    angelesco = FamilyFactory.create(JacobiAngelescoSpec(), ctx)
    with ctx.workdps():
        assert close(angelesco.scaled_argument(8, 4), 1)
        assert close(angelesco.zero_scale(4), 8)


def test_sorokin_has_no_zero_target(ctx):
    family = FamilyFactory.create(SorokinLaguerreSpec(p="1/2", r=2), ctx)
    with pytest.raises(InvalidParameters):
        family.zero_target(1)


@pytest.mark.slow
def test_ibessel_real_oracle_at_degree_64(ctx):
    """A non-dyadic real parameter set tracks the exact polynomial at the top of the default grid."""
    nvec = MultiIndex.of(64)
    exact = IBesselMOP(IBesselSpec(nu="3/10", c="3/2"), ctx).coefficients(nvec)
    real = IBesselMOP(IBesselSpec(nu="real:0.3", c="real:1.5"), ctx).coefficients(nvec)
    assert to_mpf(real.coeffs[0]) > 0
    assert close(real.coeffs[0], exact.coeffs[0], "1e-20")


def test_ibessel_real_oracle_rejects_a_broken_sign_pattern(ctx, monkeypatch):
    monkeypatch.setattr("mopasym.core.families.construct_mop", lambda catalog, index, wide: BigPoly([1, 1, 1]))
    family = IBesselMOP(IBesselSpec(nu="real:0.3", c="real:1.5"), ctx)
    with pytest.raises(SingularMomentMatrix, match="sign pattern"):
        family.coefficients(MultiIndex.of(2))


def test_ibessel_real_oracle_rejects_unstable_solutions(ctx, monkeypatch):
    solutions = iter([BigPoly([2, -3, 1]), BigPoly([1, -3, 1])])
    monkeypatch.setattr("mopasym.core.families.construct_mop", lambda catalog, index, wide: next(solutions))
    family = IBesselMOP(IBesselSpec(nu="real:0.3", c="real:1.5"), ctx)
    with pytest.raises(SingularMomentMatrix, match="precision increase"):
        family.coefficients(MultiIndex.of(2))


def test_laguerre2_zero_target_is_the_classical_laguerre_law(ctx):
    """r = 1, c = 1, alpha = 0: n x_{k,n} -> j_k^2 / 4, as for L_n(x)."""
    family = FamilyFactory.create(MultipleLaguerre2Spec(alpha=0, cs=[1]), ctx)
    j = bessel_zeros(0, 2, ctx).values
    for k in (1, 2):
        with ctx.workdps():
            expected = j[k - 1] ** 2 / 4
        assert close(family.zero_target(k, RatioWeights(q=[1])), expected, "1e-30")


def test_laguerre2_zero_target_divides_by_the_total_rate(ctx):
    family = FamilyFactory.create(MultipleLaguerre2Spec(alpha="1/2", cs=[1, 3]), ctx)
    j1 = bessel_zeros(Fraction(1, 2), 1, ctx).values[0]
    with ctx.workdps():
        # Q = 1/2 * 1 + 1/2 * 3 = 2
        expected = j1 ** 2 / 8
    assert close(family.zero_target(1, RatioWeights(q=["1/2", "1/2"])), expected, "1e-30")
