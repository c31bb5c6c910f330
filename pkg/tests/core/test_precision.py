from fractions import Fraction

import mpmath
import pytest
from pydantic import ValidationError

from mopasym.core.precision import (
    BigPoly,
    MultiIndex,
    PrecisionContext,
    binomial_series,
    format_value,
    gen_binomial,
    is_exact,
    is_integer,
    is_nonpositive_integer,
    parse_param,
    pochhammer,
    poly_eval,
    proportionality_spread,
    series_product,
    unify,
)


@pytest.mark.parametrize(
    "a, k, expected",
    [
        (Fraction(1, 2), 3, Fraction(15, 8)),
        (Fraction(5), 0, Fraction(1)),
        (Fraction(-2), 3, Fraction(0)),
        (Fraction(1), 5, Fraction(120)),
    ],
)
def test_pochhammer_exact(a, k, expected):
    assert pochhammer(a, k) == expected


def test_pochhammer_real_matches_mpmath(ctx):
    with ctx.workdps():
        value = pochhammer(mpmath.mpf("0.3"), 7)
        assert mpmath.almosteq(value, mpmath.rf(mpmath.mpf("0.3"), 7), 1e-45)


def test_gen_binomial():
    assert gen_binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert gen_binomial(Fraction(5), 2) == 10
    assert gen_binomial(Fraction(3), 5) == 0


def test_binomial_series_geometric():
    # (1 - x)^-1 = 1 + x + x^2 + ...
    assert binomial_series(Fraction(-1), -1, 5) == [1, 1, 1, 1, 1]


def test_series_product_truncates():
    assert series_product([1, 1], [1, 1], 2) == [1, 2]
    assert series_product([1, 1], [1, 1], 3) == [1, 2, 1]


@pytest.mark.parametrize(
    "text, expected",
    [("1/2", Fraction(1, 2)), ("0.25", Fraction(1, 4)), (3, Fraction(3)), ("-3", Fraction(-3))],
)
def test_parse_param_exact(text, expected):
    value = parse_param(text)
    assert isinstance(value, Fraction)
    assert value == expected


def test_parse_param_real():
    value = parse_param("real:0.3")
    assert isinstance(value, mpmath.mpf)
    assert abs(value - mpmath.mpf("0.3")) < mpmath.mpf(10) ** -45
    assert isinstance(parse_param(0.5), mpmath.mpf)


@pytest.mark.parametrize("bad", [True, "abc", None])
def test_parse_param_rejects(bad):
    with pytest.raises(ValueError):
        parse_param(bad)


def test_unify_lifts_everything_once_a_real_appears():
    exact = unify(1, Fraction(1, 3))
    assert all(isinstance(v, Fraction) for v in exact)
    mixed = unify(Fraction(1, 3), mpmath.mpf("0.5"))
    assert all(isinstance(v, mpmath.mpf) for v in mixed)


def test_integer_predicates():
    assert is_integer(Fraction(4))
    assert not is_integer(Fraction(1, 2))
    assert is_nonpositive_integer(Fraction(-3))
    assert not is_nonpositive_integer(Fraction(2))
    assert is_exact(1, Fraction(1, 2))
    assert not is_exact(Fraction(1), mpmath.mpf(1))
    assert not is_exact(True)


def test_format_value():
    assert format_value(Fraction(1, 2)) == "1/2"
    assert format_value(7) == "7"
    assert format_value(mpmath.mpf("0.125"), 5).startswith("1.25")


def test_precision_context_bounds():
    with pytest.raises(ValidationError):
        PrecisionContext(digits=10)
    with pytest.raises(ValidationError):
        PrecisionContext(digits=20, guard=25)


def test_workdps_restores_precision(ctx):
    before = mpmath.mp.dps
    with ctx.workdps(5):
        assert mpmath.mp.dps == 55
    assert mpmath.mp.dps == before


def test_multi_index():
    nvec = MultiIndex.from_ratios([Fraction(1, 2), Fraction(1, 2)], 8)
    assert nvec.parts == [4, 4]
    assert nvec.total == 8
    assert nvec.r == 2
    assert MultiIndex.from_ratios([Fraction(1, 3), Fraction(2, 3)], 4).parts == [1, 2]
    with pytest.raises(ValidationError):
        MultiIndex(parts=[1, -1])


class TestBigPoly:
    def test_trailing_zeros_trimmed(self):
        assert BigPoly([1, 2, 0, 0]).degree == 1
        assert BigPoly([]).is_zero()

    def test_arithmetic(self):
        x_minus_1 = BigPoly([-1, 1])
        x_plus_1 = BigPoly([1, 1])
        assert x_minus_1 * x_plus_1 == BigPoly([-1, 0, 1])
        assert x_minus_1 + x_plus_1 == BigPoly([0, 2])
        assert x_plus_1 - x_minus_1 == BigPoly([2])
        assert x_plus_1 ** 2 == BigPoly([1, 2, 1])

    def test_monic_and_derivative(self):
        p = BigPoly([Fraction(1), Fraction(0), Fraction(3)])
        assert p.monic() == BigPoly([Fraction(1, 3), 0, 1])
        assert p.derivative() == BigPoly([0, 6])

    def test_mixed_modes_lift_to_real(self, ctx):
        p = BigPoly([Fraction(1, 2), Fraction(1)])
        q = BigPoly([mpmath.mpf("0.25")])
        total = p + q
        assert not total.is_exact
        assert abs(total.coeffs[0] - mpmath.mpf("0.75")) < mpmath.mpf(10) ** -40

    def test_evaluation(self, ctx):
        p = BigPoly([Fraction(-1), 0, Fraction(3)])
        assert poly_eval(p, Fraction(1, 3), ctx) == Fraction(-2, 3)
        with ctx.workdps():
            assert abs(poly_eval(p, mpmath.mpf("0.5"), ctx) + mpmath.mpf("0.25")) < mpmath.mpf(10) ** -45

    def test_proportionality_spread(self, ctx):
        p = BigPoly([Fraction(1), Fraction(-3), Fraction(2)])
        assert proportionality_spread(p, p.scale(Fraction(-7, 2)), ctx) == 0
        assert proportionality_spread(p, BigPoly([1, 1]), ctx) == mpmath.inf
        assert proportionality_spread(p, BigPoly([1, -3, 3]), ctx) > 0
