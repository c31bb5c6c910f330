"""
Desk-scale Mehler-Heine experiments.

``run_mh_experiment`` samples |normalized polynomial(z / n^s) - limit(z)| over a
real z-grid for a sequence of n; ``run_zero_scaling`` follows one scaled zero
towards its limit; ``estimate_order`` fits the log-log slope of the errors.
Panels of independent experiments run in a process pool.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from mopasym.core.errors import DegenerateFit, InvalidParameters
from mopasym.core.families import FamilyFactory, IBesselMOP
from mopasym.core.precision import PrecisionContext, poly_eval, to_mpf
from mopasym.core.roots import poly_first_zeros
from mopasym.core.schema import (
    FamilySpec,
    MHReport,
    PanelEntry,
    RatioWeights,
    RunConfig,
    ZeroPanelEntry,
    ZeroScalingReport,
)

logger = logging.getLogger(__name__)

N_MIN, N_MAX = 4, 128
Z_MAX = 5

# 21 points on [0, 4] plus two negative samples
DEFAULT_Z_GRID: List[Fraction] = [Fraction(k, 5) for k in range(21)] + [Fraction(-1), Fraction(-2)]


def _check_n_grid(n_grid: Sequence[int]) -> List[int]:
    grid = list(n_grid)
    if not grid:
        raise InvalidParameters("n grid must not be empty")
    if any(n < N_MIN or n > N_MAX for n in grid):
        raise InvalidParameters(f"n grid values must lie in [{N_MIN}, {N_MAX}], got {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidParameters(f"n grid must be strictly increasing, got {grid}")
    return grid


def _check_z_grid(z_grid: Sequence[Any]) -> List[Any]:
    grid = list(z_grid)
    if not grid:
        raise InvalidParameters("z grid must not be empty")
    if any(abs(z) > Z_MAX for z in grid):
        raise InvalidParameters(f"z grid values must satisfy |z| <= {Z_MAX}")
    return grid


def estimate_order(sup_errors: Sequence[Any], n_grid: Sequence[int]) -> float:
    """Negated least-squares slope of log(error) against log(n)."""
    if len(sup_errors) != len(n_grid):
        raise InvalidParameters("errors and n grid differ in length")
    zeros = [n for n, e in zip(n_grid, sup_errors) if e == 0]
    if zeros:
        raise DegenerateFit(f"errors vanish at n = {zeros}; no slope to fit")
    if len(n_grid) < 3:
        raise DegenerateFit(f"an order fit needs at least 3 points, got {len(n_grid)}")
    log_n = np.log(np.asarray(n_grid, dtype=float))
    log_e = np.asarray([float(mpmath.log(abs(to_mpf(e)))) for e in sup_errors])
    slope, _ = np.polyfit(log_n, log_e, 1)
    return float(-slope)


def run_mh_experiment(
    theorem_id: int,
    params: FamilySpec,
    q: Optional[RatioWeights],
    n_grid: Sequence[int],
    z_grid: Optional[Sequence[Any]],
    ctx: PrecisionContext,
) -> MHReport:
    family = FamilyFactory.for_theorem(theorem_id, params, ctx)
    ns = _check_n_grid(n_grid)
    zs = _check_z_grid(DEFAULT_Z_GRID if z_grid is None else z_grid)
    if q is not None and not family.uses_ratios:
        raise InvalidParameters(f"{params.kind} takes no ratio weights")
    logger.info("Mehler-Heine experiment for theorem %s (%s), n = %s", theorem_id, family.spec.label(), ns)

    ratio_form = isinstance(family, IBesselMOP)
    with ctx.workdps():
        limits = [to_mpf(family.limit(z, q)) for z in zs]
        if ratio_form:
            at_zero = to_mpf(family.limit(0, q))
            limits = [v / at_zero for v in limits]

    report = MHReport(theorem_id=theorem_id, family=params, q=q, n_grid=ns, z_grid=zs, limit_values=limits)
    for n in ns:
        nvec = family.index(n, q)
        poly = family.normalized_coefficients(nvec)
        values = [to_mpf(poly_eval(poly, family.scaled_argument(z, n), ctx)) for z in zs]
        with ctx.workdps():
            errors = [abs(v - lim) for v, lim in zip(values, limits)]
            worst = max(range(len(zs)), key=lambda i: errors[i])
        report.scaled_values.append(values)
        report.sup_errors.append(errors[worst])
        report.z_sup.append(zs[worst])
        if ratio_form:
            report.fitted_constants.append(family.fitted_constant(nvec))
        logger.info("theorem %s, n = %s: sup error %s at z = %s", theorem_id, n, mpmath.nstr(errors[worst], 6), zs[worst])

    try:
        report.estimated_order = estimate_order(report.sup_errors, ns)
    except DegenerateFit as exc:
        logger.warning("No convergence order for theorem %s: %s", theorem_id, exc)
    return report


def run_zero_scaling(
    params: FamilySpec,
    q: Optional[RatioWeights],
    k: int,
    n_grid: Sequence[int],
    ctx: PrecisionContext,
) -> ZeroScalingReport:
    """Scaled k-th positive zero n^s x_{k,n} against its limit."""
    if not 1 <= k <= 5:
        raise InvalidParameters(f"zero index k must lie in 1..5, got {k}")
    family = FamilyFactory.create(params, ctx)
    ns = _check_n_grid(n_grid)
    target = family.zero_target(k, q)
    report = ZeroScalingReport(family=params, q=q, k=k, n_grid=ns, target=target)
    for n in ns:
        nvec = family.index(n, q)
        zeros = poly_first_zeros(family.coefficients(nvec), k, ctx, upper=family.zero_window(nvec))
        with ctx.workdps():
            scaled = to_mpf(family.zero_scale(n)) * zeros.values[k - 1]
            report.scaled_zeros.append(scaled)
            report.rel_errors.append(abs(scaled - target) / abs(target))
        logger.info("%s zero %s at n = %s: %s", params.kind, k, n, mpmath.nstr(scaled, 10))
    return report


# ============================================================================
# Panels
# ============================================================================

Job = Tuple[str, Union[PanelEntry, ZeroPanelEntry], List[int], Optional[List[Any]], PrecisionContext]
Report = Union[MHReport, ZeroScalingReport]


def _run_job(job: Job) -> Report:
    kind, entry, n_grid, z_grid, ctx = job
    if kind == "mh":
        return run_mh_experiment(entry.theorem, entry.family, entry.q, n_grid, z_grid, ctx)
    return run_zero_scaling(entry.family, entry.q, entry.k, n_grid, ctx)


def _run_jobs(jobs: List[Job], workers: int) -> List[Report]:
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map keeps submission order
        return list(pool.map(_run_job, jobs))


def run_mh_panel(config: RunConfig, ctx: PrecisionContext, workers: int = 1) -> List[MHReport]:
    jobs: List[Job] = [("mh", entry, config.n_grid, config.z_grid, ctx) for entry in config.panel]
    return [r for r in _run_jobs(jobs, workers) if isinstance(r, MHReport)]


def run_zero_panel(config: RunConfig, ctx: PrecisionContext, workers: int = 1) -> List[ZeroScalingReport]:
    jobs: List[Job] = [("zeros", entry, config.zero_n_grid, None, ctx) for entry in config.zero_panel]
    return [r for r in _run_jobs(jobs, workers) if isinstance(r, ZeroScalingReport)]
