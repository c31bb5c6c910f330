"""
Acceptance checks.

Each check returns a CheckResult; a check that raises a MopAsymError fails
with the error name in its detail instead of aborting the run.
"""

from __future__ import annotations

import logging
import random
import time
from fractions import Fraction
from typing import Any, Callable, Iterable, List, Tuple

import mpmath

from mopasym.core.errors import MopAsymError
from mopasym.core.families import (
    Family,
    FamilyFactory,
    d_ell,
    d_ell_limit,
    kbessel_mop_eval,
    meijerg_mop_eval,
    mh_limit_eval,
)
from mopasym.core.gen_bessel import (
    GenBesselSpec,
    derivative_identity_coefficient_defects,
    ode_residual,
    y0_series,
    yj_series,
)
from mopasym.core.harness import DEFAULT_Z_GRID, run_mh_panel, run_zero_panel
from mopasym.core.moments import orthogonality_residual
from mopasym.core.precision import (
    MultiIndex,
    PrecisionContext,
    pochhammer,
    poly_eval,
    proportionality_spread,
    to_mpf,
)
from mopasym.core.roots import genbessel_zeros
from mopasym.core.schema import (
    CheckResult,
    FamilySpec,
    IBesselSpec,
    JacobiAngelescoSpec,
    JacobiPineiroSpec,
    KBesselSpec,
    MeijerGSpec,
    MultipleLaguerre1Spec,
    MultipleLaguerre2Spec,
    RatioWeights,
    RunConfig,
    SorokinLaguerreSpec,
    VerifyReport,
)

logger = logging.getLogger(__name__)

ORDER_WINDOW = (0.8, 1.3)
ZERO_TOLERANCE = 0.05
SPREAD_LIMIT = mpmath.mpf(10) ** -30
POINTWISE_LIMIT = mpmath.mpf(10) ** -40
IDENTITY_TERMS = 40
RANDOM_SEED = 20240611

# (spec, largest n) for the exact constructions; three-weight entries reach (3, 3, 3)
RATIONAL_PANEL: List[Tuple[FamilySpec, int]] = [
    (JacobiAngelescoSpec(alpha=1, beta="1/2", gamma=1), 8),
    (JacobiPineiroSpec(alphas=["1/3", "-1/4"], beta="1/2"), 8),
    (JacobiPineiroSpec(alphas=["1/3", "-1/4", "1/5"], beta="1/2"), 9),
    (MultipleLaguerre1Spec(alphas=["1/3", "-1/4"]), 8),
    (MultipleLaguerre1Spec(alphas=["1/3", "-1/4", "1/5"]), 9),
    (MultipleLaguerre2Spec(alpha="1/2", cs=[1, 3]), 8),
    (MultipleLaguerre2Spec(alpha="1/2", cs=[1, 2, 3]), 9),
    (SorokinLaguerreSpec(p="1/2", r=2), 8),
    (SorokinLaguerreSpec(p="1/3", r=3), 8),
    (KBesselSpec(alpha="1/2", nu="1/3"), 8),
    (IBesselSpec(nu="1/2", c=2), 8),
    (MeijerGSpec(nus=["1/2", "1/3"]), 8),
    (MeijerGSpec(nus=["1/2", "1/3", "1/4"]), 8),
]

REAL_PANEL: List[Tuple[FamilySpec, int]] = [
    (JacobiPineiroSpec(alphas=["real:0.3", "real:-0.2"], beta="real:0.7"), 6),
    (MultipleLaguerre1Spec(alphas=["real:0.3", "real:1.6"]), 6),
    (KBesselSpec(alpha="real:0.25", nu="real:1.5"), 6),
]


def _timed(name: str, check: Callable[[], Tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = check()
    except MopAsymError as exc:
        passed, detail = False, f"{exc.name}: {exc}"
    seconds = time.perf_counter() - start
    logger.info("check %s: %s in %.2fs", name, "PASS" if passed else "FAIL", seconds)
    return CheckResult(name=name, passed=passed, detail=detail, seconds=seconds)


def _indices(family: Family, largest: int) -> Iterable[MultiIndex]:
    for n in range(1, largest + 1):
        nvec = family.index(n)
        if nvec.total > 0:
            yield nvec


# ============================================================================
# Checks
# ============================================================================


def check_exact_orthogonality(ctx: PrecisionContext) -> Tuple[bool, str]:
    """Moment-oracle polynomials annihilate their moment rows exactly."""
    failures: List[str] = []
    for spec, largest in RATIONAL_PANEL:
        family = FamilyFactory.create(spec, ctx)
        catalog = family.catalog()
        for nvec in _indices(family, largest):
            target = family.oracle_index(nvec)
            poly = family.oracle(nvec)
            residual = orthogonality_residual(poly, catalog, target, ctx)
            if not poly.is_exact or residual != 0:
                failures.append(f"{spec.label()} n={target.parts}")
    if failures:
        return False, "nonzero residuals: " + "; ".join(failures)
    return True, f"{len(RATIONAL_PANEL)} parameter sets exact"


def check_explicit_vs_oracle(ctx: PrecisionContext) -> Tuple[bool, str]:
    """Explicit formulas are proportional to the moment-oracle polynomials."""
    failures: List[str] = []
    worst = mpmath.mpf(0)
    panel = [(s, n) for s, n in RATIONAL_PANEL if not isinstance(s, IBesselSpec)]
    for spec, largest in panel + REAL_PANEL:
        family = FamilyFactory.create(spec, ctx)
        for nvec in _indices(family, largest):
            spread = to_mpf(proportionality_spread(family.coefficients(nvec), family.oracle(nvec), ctx))
            worst = max(worst, spread)
            if not spread < SPREAD_LIMIT:
                failures.append(f"{spec.label()} n={nvec.parts} spread {mpmath.nstr(spread, 3)}")
    if failures:
        return False, "; ".join(failures)
    return True, f"largest spread {mpmath.nstr(worst, 3)}"


def _random_alphas(rng: random.Random, r: int) -> Tuple[Fraction, ...]:
    # distinct prime denominators keep alpha_j and alpha_i - alpha_j off the integers
    denominators = (3, 5, 7)[:r]
    alphas = []
    for d in denominators:
        m = rng.randint(-d + 1, 3 * d)
        while m % d == 0:
            m = rng.randint(-d + 1, 3 * d)
        alphas.append(Fraction(m, d))
    return tuple(alphas)


def check_series_identities(ctx: PrecisionContext) -> Tuple[bool, str]:
    """The differential equation and both differentiation formulas hold termwise."""
    rng = random.Random(RANDOM_SEED)
    failures: List[str] = []
    tried = 0
    for r in (1, 2, 3):
        for _ in range(5):
            spec = GenBesselSpec(alphas=_random_alphas(rng, r))
            spec.check_fundamental(ctx)
            tried += 1
            solutions = [y0_series(spec, IDENTITY_TERMS)] + [yj_series(spec, j, IDENTITY_TERMS) for j in range(1, r + 1)]
            for series in solutions:
                if ode_residual(series.coeffs, series.sigma, spec, IDENTITY_TERMS) != 0:
                    failures.append(f"ode alphas={[str(a) for a in spec.alphas]} sigma={series.sigma}")
            defects = derivative_identity_coefficient_defects(spec, IDENTITY_TERMS)
            if defects.first != 0 or defects.second != 0:
                failures.append(f"derivatives alphas={[str(a) for a in spec.alphas]}")
    if failures:
        return False, "; ".join(failures)
    return True, f"{tried} parameter sets, {IDENTITY_TERMS} terms"


def _strictly_decreasing(values: List[Any]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def check_mh_convergence(config: RunConfig, ctx: PrecisionContext, workers: int = 1) -> Tuple[bool, str]:
    failures: List[str] = []
    reports = run_mh_panel(config, ctx, workers)
    for entry, report in zip(config.panel, reports):
        tag = entry.label or f"theorem {report.theorem_id} {report.family.label()}"
        if not _strictly_decreasing(report.sup_errors):
            failures.append(f"{tag}: errors not decreasing")
        order = report.estimated_order
        if order is None or not ORDER_WINDOW[0] <= order <= ORDER_WINDOW[1]:
            failures.append(f"{tag}: order {order if order is None else round(order, 3)}")
    if failures:
        return False, "; ".join(failures)
    return True, f"{len(reports)} experiments"


def bessel_reference(alpha: Any, z: Any, ctx: PrecisionContext) -> Any:
    """Gamma(alpha+1) z^(-alpha/2) J_alpha(2 sqrt z) from mpmath.besselj, z > 0."""
    with ctx.workdps():
        a, zv = to_mpf(alpha), to_mpf(z)
        return mpmath.gamma(a + 1) * mpmath.power(zv, -a / 2) * mpmath.besselj(a, 2 * mpmath.sqrt(zv))


def reduction_errors(spec: FamilySpec, q: RatioWeights, n_grid: List[int], ctx: PrecisionContext) -> List[Any]:
    """sup over the positive default grid of |normalized p_n(z / n^s) - bessel_reference(z)| for r = 1."""
    family = FamilyFactory.create(spec, ctx)
    alpha = limit_alphas(spec)[0]
    zs = [z for z in DEFAULT_Z_GRID if z > 0]
    limits = [bessel_reference(alpha, z, ctx) for z in zs]
    errors = []
    for n in n_grid:
        poly = family.normalized_coefficients(family.index(n, q))
        with ctx.workdps():
            values = [to_mpf(poly_eval(poly, family.scaled_argument(z, n), ctx)) for z in zs]
            errors.append(max(abs(v - lim) for v, lim in zip(values, limits)))
    return errors


def _classical_laguerre_errors(alpha: Fraction, n_grid: List[int], ctx: PrecisionContext) -> List[Any]:
    """sup_z |n^-alpha L_n^alpha(z/n) - z^(-alpha/2) J_alpha(2 sqrt z)| over the positive default grid."""
    family = FamilyFactory.create(MultipleLaguerre1Spec(alphas=[alpha]), ctx)
    zs = [z for z in DEFAULT_Z_GRID if z > 0]
    with ctx.workdps():
        limits = [
            mpmath.power(to_mpf(z), -to_mpf(alpha) / 2) * mpmath.besselj(to_mpf(alpha), 2 * mpmath.sqrt(to_mpf(z)))
            for z in zs
        ]
    errors = []
    for n in n_grid:
        nvec = MultiIndex.of(n)
        poly = family.normalized_coefficients(nvec)
        with ctx.workdps():
            scale = to_mpf(pochhammer(alpha + 1, n)) / mpmath.factorial(n) / mpmath.power(n, to_mpf(alpha))
            values = [to_mpf(scale) * to_mpf(poly_eval(poly, family.scaled_argument(z, n), ctx)) for z in zs]
            errors.append(max(abs(v - lim) for v, lim in zip(values, limits)))
    return errors


def check_classical_reductions(ctx: PrecisionContext) -> Tuple[bool, str]:
    """r = 1 reductions to the Jacobi and Laguerre hard-edge limits, against mpmath's J_alpha."""
    n_grid = [8, 16, 32, 64]
    cases = [
        ("Jacobi", JacobiPineiroSpec(alphas=["1/2"], beta="1/3")),
        ("Laguerre II", MultipleLaguerre2Spec(alpha="1/2", cs=[1])),
    ]
    ratios: List[str] = []
    passed = True
    for name, spec in cases:
        errors = reduction_errors(spec, RatioWeights(q=[1]), n_grid, ctx)
        gain = errors[0] / errors[-1]
        ratios.append(f"{name}: {mpmath.nstr(gain, 4)}")
        passed = passed and gain >= 4
    errors = _classical_laguerre_errors(Fraction(1, 2), n_grid, ctx)
    gain = errors[0] / errors[-1]
    ratios.append(f"classical Laguerre: {mpmath.nstr(gain, 4)}")
    passed = passed and gain >= 4
    return passed, "error reduction n=8 -> 64: " + ", ".join(ratios)


def check_zero_scaling(config: RunConfig, ctx: PrecisionContext, workers: int = 1) -> Tuple[bool, str]:
    failures: List[str] = []
    reports = run_zero_panel(config, ctx, workers)
    for report in reports:
        tag = f"{report.family.label()} k={report.k}"
        last = report.rel_errors[-1]
        if not last < ZERO_TOLERANCE:
            failures.append(f"{tag}: rel error {mpmath.nstr(last, 3)} at n={report.n_grid[-1]}")
        if not last < report.rel_errors[0]:
            failures.append(f"{tag}: rel error not decreasing")
    if failures:
        return False, "; ".join(failures)
    return True, f"{len(reports)} zero sequences"


def limit_alphas(spec: FamilySpec) -> Tuple[Any, ...]:
    """alpha_1, ..., alpha_r of the 0Fr whose zeros govern the family's hard edge."""
    if isinstance(spec, JacobiAngelescoSpec):
        return ((spec.beta - 1) / 2, spec.beta / 2)
    if isinstance(spec, (JacobiPineiroSpec, MultipleLaguerre1Spec)):
        return tuple(spec.alphas)
    if isinstance(spec, MultipleLaguerre2Spec):
        return (spec.alpha,)
    if isinstance(spec, SorokinLaguerreSpec):
        return tuple((spec.p + j) / spec.r - 1 for j in range(1, spec.r + 1))
    if isinstance(spec, KBesselSpec):
        return (spec.alpha, spec.alpha + spec.nu)
    if isinstance(spec, IBesselSpec):
        return (spec.nu,)
    return tuple(spec.nus)


def check_hurwitz_zeros(config: RunConfig, ctx: PrecisionContext) -> Tuple[bool, str]:
    """The first five zeros of each panel's 0Fr(-; .; -z) are real, positive and simple."""
    seen = set()
    failures: List[str] = []
    for spec in [entry.family for entry in config.panel] + [entry.family for entry in config.zero_panel]:
        alphas = limit_alphas(spec)
        key = tuple(str(a) for a in alphas)
        if key in seen:
            continue
        seen.add(key)
        zeros = genbessel_zeros(GenBesselSpec(alphas=alphas), 5, ctx)
        if len(zeros.values) != 5 or not zeros.values[0] > 0:
            failures.append(f"alphas={list(key)}")
    if failures:
        return False, "; ".join(failures)
    return True, f"{len(seen)} parameter sets"


def check_laguerre2_invariance(ctx: PrecisionContext) -> Tuple[bool, str]:
    """The Laguerre-II limit depends on (q, c) only through sum q_j c_j."""
    first = (MultipleLaguerre2Spec(alpha="1/2", cs=[1, 3]), RatioWeights(q=["1/2", "1/2"]))
    second = (MultipleLaguerre2Spec(alpha="1/2", cs=[5, 1]), RatioWeights(q=["1/4", "3/4"]))
    mismatches = [
        z for z in DEFAULT_Z_GRID if mh_limit_eval(4, first[0], z, ctx, first[1]) != mh_limit_eval(4, second[0], z, ctx, second[1])
    ]
    if mismatches:
        return False, f"limits differ at z = {[str(z) for z in mismatches]}"
    return True, f"{len(DEFAULT_Z_GRID)} points identical"


def check_meijerg_kbessel(ctx: PrecisionContext) -> Tuple[bool, str]:
    """Meijer-G with r = 2 is the K-Bessel family with nu = nu_1 - nu_2, alpha = nu_2."""
    pairs = [(Fraction(3, 2), Fraction(1, 3)), (mpmath.mpf("2.25"), mpmath.mpf("0.5"))]
    xs = [Fraction(1, 3), Fraction(2), Fraction(-5, 4), Fraction(7)]
    worst = mpmath.mpf(0)
    for nu1, nu2 in pairs:
        for n in range(11):
            for x in xs:
                a = meijerg_mop_eval(n, [nu1, nu2], x, ctx)
                b = kbessel_mop_eval(n, nu2, nu1 - nu2, x, ctx)
                with ctx.workdps():
                    scale = max(abs(to_mpf(b)), mpmath.mpf(1))
                    worst = max(worst, abs(to_mpf(a) - to_mpf(b)) / scale)
    return worst < POINTWISE_LIMIT, f"largest relative difference {mpmath.nstr(worst, 3)}"


def check_dell_limit(ctx: PrecisionContext) -> Tuple[bool, str]:
    """n^(-l/2) d_l(n) approaches its limit at least three times closer from n = 100 to n = 10000."""
    alpha, gamma = Fraction(1, 2), Fraction(1, 3)
    gains: List[str] = []
    passed = True
    with ctx.workdps():
        for ell in (2, 3, 4):
            errs = []
            for n in (100, 10_000):
                scaled = to_mpf(d_ell(n, alpha, gamma, ell)) / mpmath.power(n, mpmath.mpf(ell) / 2)
                errs.append(abs(scaled - to_mpf(d_ell_limit(ell))))
            gain = errs[0] / errs[1]
            gains.append(f"l={ell}: {mpmath.nstr(gain, 4)}")
            passed = passed and gain >= 3
    return passed, ", ".join(gains)


# ============================================================================
# Runner
# ============================================================================


def run_verification(config: RunConfig, ctx: PrecisionContext, workers: int = 1) -> VerifyReport:
    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("exact_orthogonality", lambda: check_exact_orthogonality(ctx)),
        ("explicit_vs_oracle", lambda: check_explicit_vs_oracle(ctx)),
        ("series_identities", lambda: check_series_identities(ctx)),
        ("mehler_heine_convergence", lambda: check_mh_convergence(config, ctx, workers)),
        ("classical_reductions", lambda: check_classical_reductions(ctx)),
        ("zero_scaling", lambda: check_zero_scaling(config, ctx, workers)),
        ("hurwitz_zeros", lambda: check_hurwitz_zeros(config, ctx)),
        ("laguerre2_invariance", lambda: check_laguerre2_invariance(ctx)),
        ("meijerg_kbessel", lambda: check_meijerg_kbessel(ctx)),
        ("dell_limit", lambda: check_dell_limit(ctx)),
    ]
    report = VerifyReport(digits=ctx.digits)
    for name, check in checks:
        report.checks.append(_timed(name, check))
    return report
