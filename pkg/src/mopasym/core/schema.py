"""
mopasym data models
-------------------
Pydantic models for family specifications, run configurations and reports.

Numeric parameters are stored as ``Fraction`` (exact) or ``mpmath.mpf``
(real mode) and written back as strings, so a configuration round-trips
without losing exactness. Report values are written in decimal scientific
notation; the number of significant figures comes from the serialization
context (``model_dump(mode="json", context={"digits": 30})``).
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Union

import mpmath
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    SerializationInfo,
    ValidationError,
    computed_field,
    field_validator,
    model_validator,
)

from mopasym.core.errors import ConfigError, DegenerateParameters, InvalidParameters
from mopasym.core.precision import (
    PrecisionContext,
    format_value,
    is_exact,
    is_integer,
    parse_param,
    to_mpf,
    unify,
)

DEFAULT_REPORT_DIGITS = 20


def _param_to_text(value: Any) -> str:
    if is_exact(value):
        return str(Fraction(value))
    with mpmath.workdps(60):
        return "real:" + mpmath.nstr(to_mpf(value), 50, min_fixed=0, max_fixed=0)


def _value_to_text(value: Any, info: SerializationInfo) -> Optional[str]:
    if value is None:
        return None
    context = info.context or {}
    return format_value(value, context.get("digits", DEFAULT_REPORT_DIGITS))


Param = Annotated[Any, BeforeValidator(parse_param), PlainSerializer(_param_to_text, return_type=str)]
Value = Annotated[Any, PlainSerializer(_value_to_text, return_type=Optional[str])]


class Support(BaseModel):
    """An interval [lower, upper] (upper None = +inf) or, when ray is set, the ray omega^ray * [0, inf)."""

    lower: Param = Fraction(0)
    upper: Optional[Param] = None
    ray: Optional[int] = None


# ============================================================================
# Family specifications
# ============================================================================


class _FamilyBase(BaseModel):
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _one_arithmetic_mode(self) -> "_FamilyBase":
        names = [name for name, value in self if _is_param(value)]
        flat = [v for name in names for v in _as_list(getattr(self, name))]
        if flat and not is_exact(*flat):
            lifted = iter(unify(*flat))
            for name in names:
                value = getattr(self, name)
                if isinstance(value, list):
                    object.__setattr__(self, name, [next(lifted) for _ in value])
                else:
                    object.__setattr__(self, name, next(lifted))
        return self

    @property
    def weight_count(self) -> int:
        return 1

    @property
    def supports(self) -> List[Support]:
        return [Support()]

    @property
    def is_exact(self) -> bool:
        raise NotImplementedError

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        """Raise InvalidParameters / DegenerateParameters for excluded parameters."""

    def label(self) -> str:
        fields = {k: v for k, v in self.model_dump(mode="json").items() if k != "kind"}
        return f"{self.kind}({', '.join(f'{k}={v}' for k, v in fields.items())})"


def _is_param(value: Any) -> bool:
    if isinstance(value, list):
        return bool(value) and all(_is_param(v) for v in value)
    return isinstance(value, (Fraction, mpmath.mpf, mpmath.mpc))


def _as_list(value: Any) -> List[Any]:
    return list(value) if isinstance(value, list) else [value]


def _above_minus_one(name: str, value: Any) -> None:
    if value <= -1:
        raise InvalidParameters(f"{name} must exceed -1, got {format_value(value)}")


def _no_integer_differences(values: List[Any], ctx: Optional[PrecisionContext]) -> None:
    for i, a in enumerate(values):
        for b in values[i + 1:]:
            if is_integer(a - b, ctx):
                raise DegenerateParameters(
                    f"parameters {format_value(a)} and {format_value(b)} differ by an integer"
                )


class JacobiAngelescoSpec(_FamilyBase):
    kind: Literal["jacobi_angelesco"] = "jacobi_angelesco"
    alpha: Param = Fraction(0)
    beta: Param = Fraction(0)
    gamma: Param = Fraction(0)

    @property
    def weight_count(self) -> int:
        return 2

    @property
    def supports(self) -> List[Support]:
        return [Support(lower=Fraction(-1), upper=Fraction(0)), Support(lower=Fraction(0), upper=Fraction(1))]

    @property
    def is_exact(self) -> bool:
        return is_exact(self.alpha, self.beta, self.gamma)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        for name in ("alpha", "beta", "gamma"):
            _above_minus_one(name, getattr(self, name))


class JacobiPineiroSpec(_FamilyBase):
    kind: Literal["jacobi_pineiro"] = "jacobi_pineiro"
    alphas: List[Param] = Field(..., min_length=1)
    beta: Param = Fraction(0)

    @property
    def r(self) -> int:
        return len(self.alphas)

    @property
    def weight_count(self) -> int:
        return self.r

    @property
    def supports(self) -> List[Support]:
        return [Support(lower=Fraction(0), upper=Fraction(1))]

    @property
    def is_exact(self) -> bool:
        return is_exact(*self.alphas, self.beta)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        for a in self.alphas:
            _above_minus_one("alpha_j", a)
        _above_minus_one("beta", self.beta)
        _no_integer_differences(list(self.alphas), ctx)


class MultipleLaguerre1Spec(_FamilyBase):
    kind: Literal["multiple_laguerre_1"] = "multiple_laguerre_1"
    alphas: List[Param] = Field(..., min_length=1)

    @property
    def r(self) -> int:
        return len(self.alphas)

    @property
    def weight_count(self) -> int:
        return self.r

    @property
    def is_exact(self) -> bool:
        return is_exact(*self.alphas)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        for a in self.alphas:
            _above_minus_one("alpha_j", a)
        _no_integer_differences(list(self.alphas), ctx)


class MultipleLaguerre2Spec(_FamilyBase):
    kind: Literal["multiple_laguerre_2"] = "multiple_laguerre_2"
    alpha: Param = Fraction(0)
    cs: List[Param] = Field(..., min_length=1)

    @property
    def r(self) -> int:
        return len(self.cs)

    @property
    def weight_count(self) -> int:
        return self.r

    @property
    def is_exact(self) -> bool:
        return is_exact(self.alpha, *self.cs)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        _above_minus_one("alpha", self.alpha)
        for i, c in enumerate(self.cs):
            if c <= 0:
                raise InvalidParameters(f"c_{i + 1} must be positive, got {format_value(c)}")
            for other in self.cs[i + 1:]:
                if c == other:
                    raise InvalidParameters(f"c values must be pairwise distinct, {format_value(c)} repeats")


class SorokinLaguerreSpec(_FamilyBase):
    kind: Literal["sorokin_laguerre"] = "sorokin_laguerre"
    p: Param = Fraction(0)
    r: int = Field(default=2, ge=1)

    @property
    def weight_count(self) -> int:
        return self.r

    @property
    def supports(self) -> List[Support]:
        return [Support(ray=j) for j in range(self.r)]

    @property
    def is_exact(self) -> bool:
        return is_exact(self.p)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        _above_minus_one("p", self.p)


class KBesselSpec(_FamilyBase):
    kind: Literal["kbessel"] = "kbessel"
    alpha: Param = Fraction(0)
    nu: Param = Fraction(0)

    @property
    def weight_count(self) -> int:
        return 2

    @property
    def is_exact(self) -> bool:
        return is_exact(self.alpha, self.nu)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        _above_minus_one("alpha", self.alpha)
        if self.nu < 0:
            raise InvalidParameters(f"nu must be nonnegative, got {format_value(self.nu)}")


class IBesselSpec(_FamilyBase):
    kind: Literal["ibessel"] = "ibessel"
    nu: Param = Fraction(0)
    c: Param = Fraction(1)

    @property
    def weight_count(self) -> int:
        return 2

    @property
    def is_exact(self) -> bool:
        return is_exact(self.nu, self.c)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        _above_minus_one("nu", self.nu)
        if self.c <= 0:
            raise InvalidParameters(f"c must be positive, got {format_value(self.c)}")


class MeijerGSpec(_FamilyBase):
    kind: Literal["meijer_g"] = "meijer_g"
    nus: List[Param] = Field(..., min_length=1)

    @property
    def r(self) -> int:
        return len(self.nus)

    @property
    def weight_count(self) -> int:
        return self.r

    @property
    def is_exact(self) -> bool:
        return is_exact(*self.nus)

    def check(self, ctx: Optional[PrecisionContext] = None) -> None:
        for nu in self.nus:
            _above_minus_one("nu_j", nu)


FamilySpec = Annotated[
    Union[
        JacobiAngelescoSpec,
        JacobiPineiroSpec,
        MultipleLaguerre1Spec,
        MultipleLaguerre2Spec,
        SorokinLaguerreSpec,
        KBesselSpec,
        IBesselSpec,
        MeijerGSpec,
    ],
    Field(discriminator="kind"),
]


class RatioWeights(BaseModel):
    """Proportions q_j > 0 with sum q_j = 1; n_j = floor(q_j n)."""

    model_config = ConfigDict(frozen=True)

    q: List[Param] = Field(..., min_length=1)

    @field_validator("q")
    @classmethod
    def _positive_and_normalized(cls, value: List[Any]) -> List[Any]:
        value = unify(*value)
        if any(v <= 0 for v in value):
            raise ValueError("ratio weights must be positive")
        if is_exact(*value):
            total = sum(value, Fraction(0))
            if total != 1:
                raise ValueError(f"ratio weights must sum to 1, got {total}")
        elif abs(mpmath.fsum(value) - 1) > mpmath.mpf(10) ** -30:
            raise ValueError("ratio weights must sum to 1")
        return value

    @property
    def r(self) -> int:
        return len(self.q)

    @classmethod
    def uniform(cls, r: int) -> "RatioWeights":
        return cls(q=[Fraction(1, r)] * r)


# ============================================================================
# Results
# ============================================================================


class ZeroList(BaseModel):
    kind: Literal["polynomial", "genbessel", "bessel"]
    values: List[Value] = Field(default_factory=list)
    achieved_tolerance: Value = None

    @model_validator(mode="after")
    def _strictly_increasing(self) -> "ZeroList":
        for a, b in zip(self.values, self.values[1:]):
            if not a < b:
                raise ValueError("zero list must be strictly increasing")
        return self


class MHReport(BaseModel):
    """Convergence table for one Mehler-Heine limit."""

    theorem_id: int = Field(..., ge=1, le=8)
    family: FamilySpec
    q: Optional[RatioWeights] = None
    n_grid: List[int]
    z_grid: List[Param]
    limit_values: List[Value] = Field(default_factory=list)
    scaled_values: List[List[Value]] = Field(default_factory=list)
    sup_errors: List[Value] = Field(default_factory=list)
    z_sup: List[Param] = Field(default_factory=list)
    estimated_order: Value = None
    fitted_constants: List[Value] = Field(default_factory=list)

    @field_validator("n_grid")
    @classmethod
    def _increasing(cls, value: List[int]) -> List[int]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return value


class ZeroScalingReport(BaseModel):
    family: FamilySpec
    q: Optional[RatioWeights] = None
    k: int = Field(..., ge=1)
    n_grid: List[int]
    scaled_zeros: List[Value] = Field(default_factory=list)
    target: Value = None
    rel_errors: List[Value] = Field(default_factory=list)


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0


class VerifyReport(BaseModel):
    digits: int
    checks: List[CheckResult] = Field(default_factory=list)

    @computed_field
    @property
    def all_passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)


# ============================================================================
# Run configuration
# ============================================================================


class PanelEntry(BaseModel):
    """One Mehler-Heine experiment of a panel."""

    theorem: int = Field(..., ge=1, le=8)
    family: FamilySpec
    q: Optional[RatioWeights] = None
    label: str = ""


class ZeroPanelEntry(BaseModel):
    family: FamilySpec
    q: Optional[RatioWeights] = None
    k: int = Field(default=1, ge=1, le=5)


class RunConfig(BaseModel):
    digits: Optional[int] = Field(default=None, ge=20)
    panel: List[PanelEntry] = Field(..., min_length=1)
    zero_panel: List[ZeroPanelEntry] = Field(default_factory=list)
    n_grid: List[int] = Field(default_factory=lambda: [8, 16, 32, 64], min_length=1)
    zero_n_grid: List[int] = Field(default_factory=lambda: [16, 32, 64], min_length=1)
    z_grid: Optional[List[Param]] = None
    output_format: Literal["csv", "json"] = "csv"
    output: Optional[str] = None

    @field_validator("n_grid", "zero_n_grid")
    @classmethod
    def _n_range(cls, value: List[int]) -> List[int]:
        if any(n < 4 or n > 128 for n in value):
            raise ValueError("grid values of n must lie in [4, 128]")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("n grids must be strictly increasing")
        return value

    @field_validator("z_grid")
    @classmethod
    def _z_range(cls, value: Optional[List[Any]]) -> Optional[List[Any]]:
        if value is not None:
            if not value:
                raise ValueError("z_grid must not be empty")
            if any(abs(z) > 5 for z in value):
                raise ValueError("z_grid values must satisfy |z| <= 5")
        return value


def default_panel_path() -> Path:
    """Return the packaged default run configuration."""
    return Path(__file__).resolve().parent.parent / "resources" / "panels" / "default.json"


def load_run_config(path: Optional[Path] = None) -> RunConfig:
    """Parse a run configuration; any parse or validation failure becomes ConfigError."""
    source = Path(path) if path else default_panel_path()
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read run configuration {source}: {exc}") from exc
    try:
        return RunConfig.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ()))
        raise ConfigError(f"invalid run configuration {source.name}: {where}: {first.get('msg')}") from exc
