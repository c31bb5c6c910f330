"""
mopasym Command-Line Interface

Evaluate multiple orthogonal polynomials and their hard-edge limits, find
zeros, and run the Mehler-Heine experiments and acceptance checks.

Usage:
    # Polynomials
    mopasym eval --family kbessel --alpha 0 --nu 1 --n 1 --x 3
    mopasym coeffs --family jacobipineiro --alphas 1/3,-1/4 --n 2,2

    # Zeros
    mopasym zeros --genbessel --alphas 0,0 --count 3
    mopasym zeros --bessel --alpha 1/2 --count 5

    # Experiments (single run or the configured panel)
    mopasym mh-table --theorem 6 --family kbessel --alpha 0 --nu 1
    mopasym zero-scaling --family jacobipineiro --alphas 1/3,-1/4 --q 1/2,1/2 --k 1
    mopasym --config panel.json verify

    # System information
    mopasym info
"""

import csv
import io
import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional

import typer
from pydantic import TypeAdapter, ValidationError

from .config import settings

app = typer.Typer(
    name="mopasym",
    help="mopasym - Mehler-Heine asymptotics of multiple orthogonal polynomials",
    add_completion=False,
)

logger = logging.getLogger(__name__)

FAMILY_ALIASES: Dict[str, str] = {
    "angelesco": "jacobi_angelesco",
    "jacobiangelesco": "jacobi_angelesco",
    "jacobipineiro": "jacobi_pineiro",
    "pineiro": "jacobi_pineiro",
    "mlag1": "multiple_laguerre_1",
    "mlag2": "multiple_laguerre_2",
    "sorokin": "sorokin_laguerre",
    "kbessel": "kbessel",
    "ibessel": "ibessel",
    "meijerg": "meijer_g",
}

MH_COLUMNS = ["theorem", "n", "z_sup", "sup_error", "order_estimate"]
ZERO_SCALING_COLUMNS = ["family", "k", "n", "scaled_zero", "target", "rel_error"]
ZEROS_COLUMNS = ["kind", "k", "value", "tolerance"]


@dataclass
class GlobalOptions:
    digits: Optional[int] = None
    output_format: Optional[str] = None
    out: Optional[Path] = None
    config: Optional[Path] = None


state = GlobalOptions()


# ============================================================================
# Helper Functions
# ============================================================================


@contextmanager
def reported_errors() -> Iterator[None]:
    """Turn library and validation errors into one stderr line and exit code 2."""
    from .core.errors import MopAsymError

    try:
        yield
    except MopAsymError as exc:
        typer.echo(f"error: {exc.name}: {exc}", err=True)
        raise typer.Exit(code=2)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ()))
        typer.echo(f"error: ValidationError: {where}: {first.get('msg')}", err=True)
        raise typer.Exit(code=2)


def load_config():
    """Run configuration from --config, MOPASYM_PANEL_FILE or the bundled default."""
    from .core.schema import load_run_config

    path = state.config or (Path(settings.PANEL_FILE) if settings.PANEL_FILE else None)
    return load_run_config(path)


def resolve_digits(config_digits: Optional[int] = None) -> int:
    """--digits, then MOPASYM_DIGITS, then the run configuration, then the default."""
    if state.digits is not None:
        return state.digits
    if "DIGITS" in settings.model_fields_set:
        return settings.DIGITS
    return config_digits or settings.DIGITS


def precision(config_digits: Optional[int] = None):
    from .core.errors import ConfigError
    from .core.precision import PrecisionContext

    digits = resolve_digits(config_digits)
    if digits < 20 or settings.GUARD >= digits:
        raise ConfigError(f"digits must be at least 20 and above the guard {settings.GUARD}, got {digits}")
    return PrecisionContext(digits=digits, guard=settings.GUARD)


def output_format(config_format: Optional[str] = None) -> str:
    return state.output_format or config_format or settings.OUTPUT_FORMAT


def emit(text: str) -> None:
    if state.out is not None:
        state.out.write_text(text, encoding="utf-8")
        logger.info("Wrote %s", state.out)
    else:
        typer.echo(text, nl=False)


def render_csv(columns: List[str], rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2) + "\n"


def split_list(value: Optional[str]) -> Optional[List[str]]:
    if value is None:
        return None
    return [part.strip() for part in value.split(",") if part.strip()]


def build_family(
    family: str,
    alpha: Optional[str] = None,
    beta: Optional[str] = None,
    gamma: Optional[str] = None,
    nu: Optional[str] = None,
    c: Optional[str] = None,
    p: Optional[str] = None,
    r: Optional[int] = None,
    alphas: Optional[str] = None,
    cs: Optional[str] = None,
    nus: Optional[str] = None,
):
    """Validate command-line parameters into a family specification."""
    from .core.errors import InvalidParameters
    from .core.schema import FamilySpec

    kind = FAMILY_ALIASES.get(family.lower().replace("-", "").replace("_", ""), family)
    if kind not in FAMILY_ALIASES.values():
        raise InvalidParameters(f"unknown family {family!r}; choose from {', '.join(sorted(FAMILY_ALIASES))}")
    raw = {
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "nu": nu,
        "c": c,
        "p": p,
        "r": r,
        "alphas": split_list(alphas),
        "cs": split_list(cs),
        "nus": split_list(nus),
    }
    payload = {"kind": kind, **{k: v for k, v in raw.items() if v is not None}}
    return TypeAdapter(FamilySpec).validate_python(payload)


def parse_index(text: str):
    from .core.errors import InvalidParameters
    from .core.precision import MultiIndex

    try:
        parts = [int(part) for part in split_list(text) or []]
    except ValueError as exc:
        raise InvalidParameters(f"multi-index must be comma-separated integers, got {text!r}") from exc
    return MultiIndex(parts=parts)


def parse_value(text: str, option: str) -> Any:
    from .core.errors import InvalidParameters
    from .core.precision import parse_param

    try:
        return parse_param(text)
    except ValueError as exc:
        raise InvalidParameters(f"{option}: {exc}") from exc


def parse_grid(text: Optional[str]) -> Optional[List[Any]]:
    values = split_list(text)
    return None if values is None else [parse_value(v, "--z-grid") for v in values]


def parse_ints(text: Optional[str], option: str = "--n-grid") -> Optional[List[int]]:
    from .core.errors import InvalidParameters

    values = split_list(text)
    if values is None:
        return None
    try:
        return [int(v) for v in values]
    except ValueError as exc:
        raise InvalidParameters(f"{option} must be comma-separated integers, got {text!r}") from exc


def parse_weights(text: Optional[str]):
    from .core.schema import RatioWeights

    values = split_list(text)
    return None if values is None else RatioWeights(q=values)


# Shared parameter options
FAMILY_OPTION = typer.Option(..., "--family", help="Family: angelesco, jacobipineiro, mlag1, mlag2, sorokin, kbessel, ibessel, meijerg")
ALPHA_OPTION = typer.Option(None, "--alpha", help="alpha (Angelesco, Laguerre II, K-Bessel)")
BETA_OPTION = typer.Option(None, "--beta", help="beta (Angelesco, Jacobi-Pineiro)")
GAMMA_OPTION = typer.Option(None, "--gamma", help="gamma (Angelesco)")
NU_OPTION = typer.Option(None, "--nu", help="nu (K-Bessel, I-Bessel)")
C_OPTION = typer.Option(None, "--c", help="c (I-Bessel)")
P_OPTION = typer.Option(None, "--p", help="p (Sorokin)")
R_OPTION = typer.Option(None, "--r", help="number of rays (Sorokin)")
ALPHAS_OPTION = typer.Option(None, "--alphas", help="comma-separated alpha_j")
CS_OPTION = typer.Option(None, "--cs", help="comma-separated c_j (Laguerre II)")
NUS_OPTION = typer.Option(None, "--nus", help="comma-separated nu_j (Meijer-G)")


# ============================================================================
# Commands
# ============================================================================


@app.callback()
def main_options(
    digits: Optional[int] = typer.Option(None, "--digits", help="Decimal working precision (>= 20)"),
    report_format: Optional[str] = typer.Option(None, "--format", help="Report format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the report to this path"),
    config: Optional[Path] = typer.Option(None, "--config", help="Run configuration JSON"),
):
    """Global options shared by every command."""
    logging.basicConfig(
        level=settings.LOG_LEVEL.upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    if report_format is not None and report_format.lower() not in {"csv", "json"}:
        typer.echo("error: ConfigError: --format must be csv or json", err=True)
        raise typer.Exit(code=2)
    state.digits = digits
    state.output_format = report_format.lower() if report_format else None
    state.out = out
    state.config = config


@app.command("eval")
def eval_command(
    family: str = FAMILY_OPTION,
    n: str = typer.Option(..., "--n", help="n or a multi-index n_1,...,n_r"),
    x: str = typer.Option(..., "--x", help="Evaluation point"),
    normalized: bool = typer.Option(False, "--normalized", help="Also print the theorem-normalized value"),
    alpha: Optional[str] = ALPHA_OPTION,
    beta: Optional[str] = BETA_OPTION,
    gamma: Optional[str] = GAMMA_OPTION,
    nu: Optional[str] = NU_OPTION,
    c: Optional[str] = C_OPTION,
    p: Optional[str] = P_OPTION,
    r: Optional[int] = R_OPTION,
    alphas: Optional[str] = ALPHAS_OPTION,
    cs: Optional[str] = CS_OPTION,
    nus: Optional[str] = NUS_OPTION,
):
    """
    Evaluate a polynomial of a family at x.

    Example:
        mopasym eval --family kbessel --alpha 0 --nu 1 --n 1 --x 3
    """
    from .core.families import FamilyFactory
    from .core.precision import format_value

    with reported_errors():
        spec = build_family(family, alpha, beta, gamma, nu, c, p, r, alphas, cs, nus)
        ctx = precision()
        fam = FamilyFactory.create(spec, ctx)
        nvec = parse_index(n)
        point = parse_value(x, "--x")
        lines = [format_value(fam.evaluate(nvec, point), ctx.digits)]
        if normalized:
            lines.append(format_value(fam.evaluate_normalized(nvec, point), ctx.digits))
    emit("\n".join(lines) + "\n")


@app.command()
def coeffs(
    family: str = FAMILY_OPTION,
    n: str = typer.Option(..., "--n", help="n or a multi-index n_1,...,n_r"),
    normalized: bool = typer.Option(False, "--normalized", help="Theorem-normalized coefficients"),
    oracle: bool = typer.Option(False, "--oracle", help="Monic polynomial from the moment system"),
    alpha: Optional[str] = ALPHA_OPTION,
    beta: Optional[str] = BETA_OPTION,
    gamma: Optional[str] = GAMMA_OPTION,
    nu: Optional[str] = NU_OPTION,
    c: Optional[str] = C_OPTION,
    p: Optional[str] = P_OPTION,
    r: Optional[int] = R_OPTION,
    alphas: Optional[str] = ALPHAS_OPTION,
    cs: Optional[str] = CS_OPTION,
    nus: Optional[str] = NUS_OPTION,
):
    """Print the coefficient vector, lowest power first."""
    from .core.families import FamilyFactory
    from .core.precision import format_value

    with reported_errors():
        spec = build_family(family, alpha, beta, gamma, nu, c, p, r, alphas, cs, nus)
        ctx = precision()
        fam = FamilyFactory.create(spec, ctx)
        nvec = parse_index(n)
        if oracle:
            poly = fam.oracle(nvec)
        elif normalized:
            poly = fam.normalized_coefficients(nvec)
        else:
            poly = fam.coefficients(nvec)
        values = [format_value(value, ctx.digits) for value in poly.coeffs]
    if output_format() == "json":
        emit(render_json({"family": spec.model_dump(mode="json"), "n": nvec.parts, "coefficients": values}))
    else:
        emit(render_csv(["power", "coefficient"], [[str(i), v] for i, v in enumerate(values)]))


@app.command()
def zeros(
    genbessel: bool = typer.Option(False, "--genbessel", help="Zeros of 0Fr(-; alpha_j+1; -z)"),
    bessel: bool = typer.Option(False, "--bessel", help="Positive zeros of J_alpha"),
    family: Optional[str] = typer.Option(None, "--family", help="Positive zeros of a family polynomial"),
    n: Optional[str] = typer.Option(None, "--n", help="Multi-index for --family"),
    count: int = typer.Option(5, "--count", help="How many zeros"),
    alpha: Optional[str] = ALPHA_OPTION,
    beta: Optional[str] = BETA_OPTION,
    gamma: Optional[str] = GAMMA_OPTION,
    nu: Optional[str] = NU_OPTION,
    c: Optional[str] = C_OPTION,
    p: Optional[str] = P_OPTION,
    r: Optional[int] = R_OPTION,
    alphas: Optional[str] = ALPHAS_OPTION,
    cs: Optional[str] = CS_OPTION,
    nus: Optional[str] = NUS_OPTION,
):
    """
    Find zeros by sign-change bracketing and bisection.

    Example:
        mopasym zeros --genbessel --alphas 0,0 --count 3
    """
    from .core.errors import InvalidParameters
    from .core.families import FamilyFactory
    from .core.gen_bessel import GenBesselSpec
    from .core.precision import format_value
    from .core.roots import bessel_zeros, genbessel_zeros, poly_first_zeros

    with reported_errors():
        ctx = precision()
        if sum([genbessel, bessel, family is not None]) != 1:
            raise InvalidParameters("choose exactly one of --genbessel, --bessel, --family")
        if genbessel:
            values = split_list(alphas)
            if not values:
                raise InvalidParameters("--genbessel needs --alphas")
            found = genbessel_zeros(GenBesselSpec(alphas=tuple(parse_value(v, "--alphas") for v in values)), count, ctx)
        elif bessel:
            if alpha is None:
                raise InvalidParameters("--bessel needs --alpha")
            found = bessel_zeros(parse_value(alpha, "--alpha"), count, ctx)
        else:
            if n is None:
                raise InvalidParameters("--family needs --n")
            spec = build_family(family, alpha, beta, gamma, nu, c, p, r, alphas, cs, nus)
            fam = FamilyFactory.create(spec, ctx)
            nvec = parse_index(n)
            found = poly_first_zeros(fam.coefficients(nvec), count, ctx, upper=fam.zero_window(nvec))
        tolerance = format_value(found.achieved_tolerance, 5)
        rows = [[found.kind, str(k), format_value(v, ctx.digits), tolerance] for k, v in enumerate(found.values, start=1)]
    if output_format() == "json":
        emit(render_json(found.model_dump(mode="json", context={"digits": ctx.digits})))
    else:
        emit(render_csv(ZEROS_COLUMNS, rows))


def _mh_rows(report, digits: int) -> List[List[str]]:
    from .core.precision import format_value

    order = "" if report.estimated_order is None else format_value(report.estimated_order, 6)
    return [
        [str(report.theorem_id), str(n), format_value(z, digits), format_value(err, digits), order]
        for n, z, err in zip(report.n_grid, report.z_sup, report.sup_errors)
    ]


@app.command("mh-table")
def mh_table(
    theorem: Optional[int] = typer.Option(None, "--theorem", help="Theorem 1..8; omit to run the configured panel"),
    family: Optional[str] = typer.Option(None, "--family", help="Family of a single experiment"),
    q: Optional[str] = typer.Option(None, "--q", help="Ratio weights q_j (sum 1)"),
    n_grid: Optional[str] = typer.Option(None, "--n-grid", help="Comma-separated n values"),
    z_grid: Optional[str] = typer.Option(None, "--z-grid", help="Comma-separated z values"),
    alpha: Optional[str] = ALPHA_OPTION,
    beta: Optional[str] = BETA_OPTION,
    gamma: Optional[str] = GAMMA_OPTION,
    nu: Optional[str] = NU_OPTION,
    c: Optional[str] = C_OPTION,
    p: Optional[str] = P_OPTION,
    r: Optional[int] = R_OPTION,
    alphas: Optional[str] = ALPHAS_OPTION,
    cs: Optional[str] = CS_OPTION,
    nus: Optional[str] = NUS_OPTION,
):
    """
    Sup-errors of the Mehler-Heine limits along n.

    Example:
        mopasym mh-table --theorem 6 --family kbessel --alpha 0 --nu 1
    """
    from .core.errors import InvalidParameters
    from .core.harness import run_mh_experiment, run_mh_panel

    with reported_errors():
        config = load_config()
        ctx = precision(config.digits)
        grid_n = parse_ints(n_grid) or config.n_grid
        grid_z = parse_grid(z_grid) or config.z_grid
        if theorem is None:
            panel = config.model_copy(update={"n_grid": grid_n, "z_grid": grid_z})
            reports = run_mh_panel(panel, ctx, settings.WORKERS)
        else:
            if family is None:
                raise InvalidParameters("--theorem needs --family and its parameters")
            spec = build_family(family, alpha, beta, gamma, nu, c, p, r, alphas, cs, nus)
            reports = [run_mh_experiment(theorem, spec, parse_weights(q), grid_n, grid_z, ctx)]
        fmt = output_format(config.output_format)
        if fmt == "json":
            text = render_json([rep.model_dump(mode="json", context={"digits": ctx.digits}) for rep in reports])
        else:
            text = render_csv(MH_COLUMNS, [row for rep in reports for row in _mh_rows(rep, ctx.digits)])
    emit(text)


@app.command("zero-scaling")
def zero_scaling(
    family: Optional[str] = typer.Option(None, "--family", help="Family; omit to run the configured zero panel"),
    q: Optional[str] = typer.Option(None, "--q", help="Ratio weights q_j (sum 1)"),
    k: int = typer.Option(1, "--k", help="Zero index, 1..5"),
    n_grid: Optional[str] = typer.Option(None, "--n-grid", help="Comma-separated n values"),
    alpha: Optional[str] = ALPHA_OPTION,
    beta: Optional[str] = BETA_OPTION,
    gamma: Optional[str] = GAMMA_OPTION,
    nu: Optional[str] = NU_OPTION,
    c: Optional[str] = C_OPTION,
    p: Optional[str] = P_OPTION,
    r: Optional[int] = R_OPTION,
    alphas: Optional[str] = ALPHAS_OPTION,
    cs: Optional[str] = CS_OPTION,
    nus: Optional[str] = NUS_OPTION,
):
    """Scaled k-th zeros against their limits."""
    from .core.harness import run_zero_panel, run_zero_scaling
    from .core.precision import format_value

    with reported_errors():
        config = load_config()
        ctx = precision(config.digits)
        grid_n = parse_ints(n_grid) or config.zero_n_grid
        if family is None:
            panel = config.model_copy(update={"zero_n_grid": grid_n})
            reports = run_zero_panel(panel, ctx, settings.WORKERS)
        else:
            spec = build_family(family, alpha, beta, gamma, nu, c, p, r, alphas, cs, nus)
            reports = [run_zero_scaling(spec, parse_weights(q), k, grid_n, ctx)]
        fmt = output_format(config.output_format)
        if fmt == "json":
            text = render_json([rep.model_dump(mode="json", context={"digits": ctx.digits}) for rep in reports])
        else:
            rows = [
                [rep.family.kind, str(rep.k), str(n), format_value(s, ctx.digits), format_value(rep.target, ctx.digits), format_value(e, 6)]
                for rep in reports
                for n, s, e in zip(rep.n_grid, rep.scaled_zeros, rep.rel_errors)
            ]
            text = render_csv(ZERO_SCALING_COLUMNS, rows)
    emit(text)


@app.command()
def verify():
    """
    Run every acceptance check and print a PASS/FAIL table.

    The JSON report goes to --out, or to MOPASYM_VERIFY_REPORT
    (mopasym-verify.json) otherwise. Exits 1 if any check fails.
    """
    from .core.verification import run_verification

    with reported_errors():
        config = load_config()
        ctx = precision(config.digits)
        report = run_verification(config, ctx, settings.WORKERS)
    payload = report.model_dump(mode="json", exclude={"checks": {"__all__": {"seconds"}}})
    target = state.out or Path(settings.VERIFY_REPORT)
    target.write_text(render_json(payload), encoding="utf-8")
    logger.info("Wrote verify report to %s", target)
    if output_format(config.output_format) == "json" and state.out is None:
        typer.echo(render_json(payload), nl=False)
    else:
        for check in report.checks:
            typer.echo(f"{check.name:<28} {'PASS' if check.passed else 'FAIL'}  {check.detail}")
    if not report.all_passed:
        raise typer.Exit(code=1)


@app.command()
def info():
    """
    Display current configuration.

    Example:
        mopasym info
    """
    typer.echo("=" * 70)
    typer.echo("mopasym - Configuration")
    typer.echo("=" * 70)
    typer.echo("")
    typer.echo("[Version]")
    typer.echo(f"  mopasym:          v{_version()}")
    typer.echo("")
    typer.echo("[Configuration]")
    typer.echo(f"  Digits:           {resolve_digits()}")
    typer.echo(f"  Guard digits:     {settings.GUARD}")
    typer.echo(f"  Workers:          {settings.WORKERS}")
    typer.echo(f"  Output format:    {output_format()}")
    typer.echo(f"  Log Level:        {settings.LOG_LEVEL}")
    typer.echo(f"  Panel file:       {settings.PANEL_FILE or 'bundled default'}")
    typer.echo(f"  Verify report:    {settings.VERIFY_REPORT}")
    typer.echo("")


def _version() -> str:
    try:
        return metadata.version("mopasym")
    except metadata.PackageNotFoundError:
        return "unknown"


@app.command()
def version():
    """Print the installed version."""
    typer.echo(f"mopasym v{_version()}")


def main():
    """Console-script entry point."""
    app()


if __name__ == "__main__":
    main()
