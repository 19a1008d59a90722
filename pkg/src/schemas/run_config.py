"""
Run configuration: a TOML document (``*.cfg``) validated by pydantic.

Grammar (all sections optional unless noted):

    command = "solve"            # basis-dump | interp-study | solve | sweep | mesh-info
    seed = 0
    output = "out/square_n16"
    dump_pencil = false
    eigenfunctions = [1, 2]      # 1-based indices of eigenfunctions to dump
    grid = 21                    # samples per direction and element in dumps

    [domain]                     # required except for basis-dump
    boxes = [[[-0.5, 0.5], [-0.5, 0.5]]]

    [discretization]             # required
    m = 2
    N = 15                       # or a list for sweeps
    level = 0                    # or a list for sweeps
    quadrature = 17              # optional; default N + 2 (N + 4 for exp-affine)

    [problem]
    coefficient = "constant 16"  # | "affine c0 c1 .. cd" | "exp-affine c0 c1 .. cd"

    [eigen]
    count = 8
    k_guess = 1.9
    shift = 2.3                  # optional; default (0.8 k_guess)^2
    method = "auto"              # auto | dense | arnoldi
    tol = 1e-10

    [interp]
    function = "sine"            # sine | exp | power
    exponent = 3.5

    [basis]
    normalization = "jacobi"     # jacobi | compact
"""

import json
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.core.exceptions import ConfigError
from src.core.spectral.assembly import Coefficient

COMMANDS = ("basis-dump", "interp-study", "solve", "sweep", "mesh-info")

_POSITION = re.compile(r"line (\d+), column (\d+)")


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DomainSection(_Section):
    boxes: List[List[Tuple[float, float]]] = Field(..., min_length=1, description="Boxes as [lo, hi] per direction")


class DiscretizationSection(_Section):
    m: int = Field(2, ge=1, description="Smoothness order of the conforming space")
    N: Union[int, List[int]] = Field(..., description="Polynomial degree, or a list for sweeps")
    level: Union[int, List[int]] = Field(0, description="Uniform refinement level, or a list for sweeps")
    quadrature: Optional[int] = Field(None, ge=1, description="Gauss points per direction")

    @field_validator("N", "level")
    @classmethod
    def _non_empty(cls, value):
        if isinstance(value, list) and not value:
            raise ValueError("sweep list must not be empty")
        values = value if isinstance(value, list) else [value]
        if any(v < 0 for v in values):
            raise ValueError("must be non-negative")
        return value

    @property
    def degrees(self) -> List[int]:
        return self.N if isinstance(self.N, list) else [self.N]

    @property
    def levels(self) -> List[int]:
        return self.level if isinstance(self.level, list) else [self.level]


class ProblemSection(_Section):
    coefficient: str = Field("constant 16", description="Refraction index n(x)")

    @field_validator("coefficient")
    @classmethod
    def _parses(cls, value: str) -> str:
        Coefficient.parse(value)
        return value


class EigenSection(_Section):
    count: int = Field(8, ge=1)
    k_guess: float = Field(2.0, gt=0)
    shift: Optional[float] = None
    method: Literal["auto", "dense", "arnoldi"] = "auto"
    tol: float = Field(1e-10, gt=0)


class InterpSection(_Section):
    function: Literal["sine", "exp", "power"] = "sine"
    exponent: float = Field(3.5, gt=0)


class BasisSection(_Section):
    normalization: Literal["jacobi", "compact"] = "jacobi"


class RunConfig(_Section):
    """Validated run configuration with every default filled."""

    command: Literal["basis-dump", "interp-study", "solve", "sweep", "mesh-info"]
    seed: Optional[int] = Field(None, ge=0, description="ARPACK start vector seed; DEFAULT_SEED when omitted")
    output: Optional[str] = Field(None, description="Artifact directory; OUTPUT_DIR when omitted")
    dump_pencil: bool = False
    eigenfunctions: List[int] = Field(default_factory=list)
    grid: int = Field(21, ge=2)
    domain: Optional[DomainSection] = None
    discretization: DiscretizationSection
    problem: ProblemSection = Field(default_factory=ProblemSection)
    eigen: EigenSection = Field(default_factory=EigenSection)
    interp: InterpSection = Field(default_factory=InterpSection)
    basis: BasisSection = Field(default_factory=BasisSection)

    @field_validator("eigenfunctions")
    @classmethod
    def _one_based(cls, value: List[int]) -> List[int]:
        if any(i < 1 for i in value):
            raise ValueError("eigenfunction indices are 1-based")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        if self.command != "basis-dump" and self.domain is None:
            raise ValueError(f"command '{self.command}' needs a [domain] section")
        if self.command == "solve" and (len(self.discretization.degrees) > 1 or len(self.discretization.levels) > 1):
            raise ValueError("solve takes a single N and level; use command = 'sweep' for lists")
        return self

    @property
    def coefficient(self) -> Coefficient:
        return Coefficient.parse(self.problem.coefficient)


def _error_path(loc) -> str:
    return ".".join(str(part) for part in loc if not isinstance(part, int)) or "<root>"


def validate_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = _error_path(first["loc"])
        messages = "; ".join(f"{_error_path(err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"invalid configuration: {messages}", key=key)


def parse_config(text: str) -> RunConfig:
    """Parse and validate TOML text; syntax errors carry line and column."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        position = _POSITION.search(str(e))
        context = {"line": int(position.group(1)), "column": int(position.group(2))} if position else {}
        raise ConfigError(f"configuration syntax error: {e}", **context)
    return validate_config(data)


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read configuration {path}: {e.strerror}")
    return parse_config(text)


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise ConfigError(f"cannot emit value of type {type(value).__name__}")


def emit_config(config: RunConfig) -> str:
    """TOML text with parse_config(emit_config(c)) == c."""
    data = config.model_dump(exclude_none=True)
    lines = []
    sections = []
    for key, value in data.items():
        if isinstance(value, dict):
            sections.append((key, value))
        else:
            lines.append(f"{key} = {_toml_value(value)}")
    for name, values in sections:
        lines.append("")
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {_toml_value(value)}" for key, value in values.items())
    return "\n".join(lines) + "\n"
