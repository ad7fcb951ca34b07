"""Run configuration: a strict JSON schema for verification runs.

Complex numbers are written as ``[re, im]`` or as a bare real number.
Unknown keys anywhere in the file are rejected.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    NonNegativeInt,
    PlainSerializer,
    PositiveFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

__all__ = ["RunConfig", "SweepConfig", "ParamsConfig", "ConfigError", "parse_config", "MODES"]

MODES = ("theorem1", "confluent", "prop1", "prop3", "alpha", "examples", "beta")


def _to_complex(v: Any) -> complex:
    if isinstance(v, bool):
        raise ValueError("expected a number or [re, im]")
    if isinstance(v, (int, float, complex)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise ValueError("expected a number or [re, im]")


Complex = Annotated[
    complex,
    BeforeValidator(_to_complex),
    PlainSerializer(lambda z: [z.real, z.imag], return_type=list),
]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ParamsConfig(_Strict):
    """One explicit parameter set.  ``len(b) == len(a)`` selects the
    ``r phi r-1`` identity, ``len(b) < len(a)`` the confluent one."""

    q: Complex = 0.5 + 0j
    a: list[Complex]
    b: list[Complex]
    m: list[int]
    n: list[int]
    t: int = 0

    @model_validator(mode="after")
    def _lengths(self) -> "ParamsConfig":
        if len(self.n) != len(self.a):
            raise ValueError("n must have the same length as a")
        if len(self.m) != len(self.b):
            raise ValueError("m must have the same length as b")
        if not 0 < abs(self.q) < 1:
            raise ValueError("need 0 < |q| < 1")
        return self


class SweepConfig(_Strict):
    r: list[Annotated[int, Field(ge=1)]] = Field(default_factory=lambda: [2, 3, 4], min_length=1)
    rs_pairs: list[tuple[PositiveInt, NonNegativeInt]] = Field(
        default_factory=lambda: [(2, 1), (3, 1), (3, 2)], min_length=1
    )
    q: list[Complex] = Field(default_factory=lambda: [0.5 + 0j], min_length=1)
    m_bound: NonNegativeInt = 3
    n_bound: NonNegativeInt = 3
    t_bound: NonNegativeInt = 3
    imag: Annotated[float, Field(ge=0)] = 0.0
    t_values: Optional[list[int]] = Field(default=None, min_length=1)
    p_index_values: Optional[list[int]] = Field(default=None, min_length=1)
    w_max: PositiveFloat = 1.0

    @model_validator(mode="after")
    def _ranges(self) -> "SweepConfig":
        for q in self.q:
            if not 0 < abs(q) < 1:
                raise ValueError("every q needs 0 < |q| < 1")
        for r, s in self.rs_pairs:
            if not s < r:
                raise ValueError(f"rs_pairs entry ({r}, {s}) needs s < r")
        return self


class RunConfig(_Strict):
    mode: Literal["theorem1", "confluent", "prop1", "prop3", "alpha", "examples", "beta"]
    samples: PositiveInt = 50
    seed: Annotated[int, Field(ge=0, lt=2**64)] = 0
    tol: PositiveFloat = 1e-8
    z_samples_per_case: PositiveInt = 5
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    params: Optional[ParamsConfig] = None
    k: Optional[int] = None
    output_path: Optional[str] = None

    def with_overrides(self, **changes: Any) -> "RunConfig":
        """A copy with the non-``None`` entries of ``changes`` applied and revalidated."""
        data = self.model_dump()
        data.update({key: v for key, v in changes.items() if v is not None})
        return RunConfig.model_validate(data)


class ConfigError(ValueError):
    """The configuration file cannot be read or violates the schema."""


def _describe(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "\n".join(lines)


def parse_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{path}: invalid configuration\n{_describe(exc)}") from exc
