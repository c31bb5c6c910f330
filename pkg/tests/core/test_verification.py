from fractions import Fraction

import mpmath
import pytest

from mopasym.core.errors import SingularMomentMatrix
from mopasym.core.precision import to_mpf
from mopasym.core.schema import (
    JacobiAngelescoSpec,
    JacobiPineiroSpec,
    KBesselSpec,
    MeijerGSpec,
    MultipleLaguerre1Spec,
    MultipleLaguerre2Spec,
    PanelEntry,
    RatioWeights,
    RunConfig,
    SorokinLaguerreSpec,
    ZeroPanelEntry,
    load_run_config,
)
from mopasym.core.verification import (
    RATIONAL_PANEL,
    _timed,
    bessel_reference,
    check_classical_reductions,
    check_dell_limit,
    check_explicit_vs_oracle,
    check_exact_orthogonality,
    check_hurwitz_zeros,
    check_laguerre2_invariance,
    check_meijerg_kbessel,
    check_mh_convergence,
    check_series_identities,
    check_zero_scaling,
    limit_alphas,
    reduction_errors,
    run_verification,
)


def test_failing_check_reports_the_error_name():
    def broken():
        raise SingularMomentMatrix("rank deficiency at column 2")

    result = _timed("broken", broken)
    assert not result.passed
    assert result.detail == "SingularMomentMatrix: rank deficiency at column 2"
    assert result.seconds >= 0


def test_dell_limit(ctx):
    passed, detail = check_dell_limit(ctx)
    assert passed, detail
    assert detail.count("l=") == 3


def test_laguerre2_invariance(ctx):
    passed, detail = check_laguerre2_invariance(ctx)
    assert passed, detail


def test_meijerg_reduces_to_kbessel(ctx):
    passed, detail = check_meijerg_kbessel(ctx)
    assert passed, detail


def test_series_identities(ctx):
    passed, detail = check_series_identities(ctx)
    assert passed, detail
    assert detail.startswith("15 parameter sets")


@pytest.mark.parametrize(
    "spec, expected",
    [
        (JacobiAngelescoSpec(beta="1/2"), (Fraction(-1, 4), Fraction(1, 4))),
        (KBesselSpec(alpha="1/2", nu="1/3"), (Fraction(1, 2), Fraction(5, 6))),
        (SorokinLaguerreSpec(p="1/2", r=2), (Fraction(-1, 4), Fraction(1, 4))),
        (MeijerGSpec(nus=["1/2", "1/3"]), (Fraction(1, 2), Fraction(1, 3))),
    ],
)
def test_limit_alphas(spec, expected):
    assert limit_alphas(spec) == expected


def test_hurwitz_zeros_on_a_small_panel(low_ctx):
    config = RunConfig(
        panel=[
            PanelEntry(theorem=6, family=KBesselSpec(alpha=0, nu=1)),
            PanelEntry(theorem=8, family=MeijerGSpec(nus=["1/2", "1/3", "1/4"])),
        ],
        zero_panel=[ZeroPanelEntry(family=KBesselSpec(alpha=0, nu=1))],
    )
    passed, detail = check_hurwitz_zeros(config, low_ctx)
    assert passed, detail
    assert detail == "2 parameter sets"


@pytest.mark.slow
def test_exact_orthogonality(ctx):
    passed, detail = check_exact_orthogonality(ctx)
    assert passed, detail


@pytest.mark.slow
def test_explicit_formulas_match_the_oracle(ctx):
    passed, detail = check_explicit_vs_oracle(ctx)
    assert passed, detail


def test_rational_panel_reaches_degree_eight_and_three_weights():
    assert all(largest >= 8 for _, largest in RATIONAL_PANEL)
    assert any(isinstance(spec, SorokinLaguerreSpec) and spec.r == 3 for spec, _ in RATIONAL_PANEL)
    weights = {
        JacobiPineiroSpec: lambda spec: len(spec.alphas),
        MultipleLaguerre1Spec: lambda spec: len(spec.alphas),
        MultipleLaguerre2Spec: lambda spec: len(spec.cs),
        MeijerGSpec: lambda spec: len(spec.nus),
    }
    for kind, count in weights.items():
        assert max(count(spec) for spec, _ in RATIONAL_PANEL if isinstance(spec, kind)) == 3


def test_bessel_reference_is_the_zeroth_hypergeometric_limit(ctx):
    for alpha, z in [(Fraction(1, 2), Fraction(3, 2)), (Fraction(-1, 3), Fraction(4)), (Fraction(0), Fraction(1, 4))]:
        value = bessel_reference(alpha, z, ctx)
        with ctx.workdps():
            expected = mpmath.hyp0f1(to_mpf(alpha) + 1, -to_mpf(z))
            assert abs(value - expected) < mpmath.mpf(10) ** -40


def test_reduction_errors_shrink_like_one_over_n(low_ctx):
    errors = reduction_errors(MultipleLaguerre2Spec(alpha="1/2", cs=[1]), RatioWeights(q=[1]), [8, 16, 32], low_ctx)
    assert errors[0] > errors[1] > errors[2]
    assert errors[0] / errors[2] > 2.5


@pytest.mark.slow
def test_classical_reductions(ctx):
    passed, detail = check_classical_reductions(ctx)
    assert passed, detail
    assert "classical Laguerre" in detail


@pytest.mark.slow
def test_default_panel_zero_scaling(ctx):
    passed, detail = check_zero_scaling(load_run_config(), ctx)
    assert passed, detail
    assert detail == "5 zero sequences"


@pytest.mark.slow
def test_default_panel_mehler_heine_convergence(ctx):
    passed, detail = check_mh_convergence(load_run_config(), ctx)
    assert passed, detail
    assert detail == "16 experiments"


@pytest.mark.slow
def test_default_panel_passes_every_check(ctx):
    report = run_verification(load_run_config(), ctx)
    failed = [f"{check.name}: {check.detail}" for check in report.checks if not check.passed]
    assert not failed
    assert len(report.checks) == 10
    assert report.all_passed
