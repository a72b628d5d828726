"""Experiment configuration files.

A file consists of `[section]` headers followed by `key = value` lines::

    [params]
    A0H = 10
    A1H = 20
    A0L = -10
    A1L = -20
    p = 0.4

    [distribution]
    type = jackson_rogers
    m = 7
    r = 2

    [optimizer]
    type = referral
    price_grid_size = 400

Known sections are `params`, `distribution`, `policy`, `optimizer`, `sweep`,
`output` and `figure`. Every section is validated by the pydantic model of the
same name, so unknown keys are rejected.
"""

from __future__ import annotations

import configparser
import io
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, TypeAdapter, field_validator, model_validator

from mfpricing.exceptions import ExperimentConfigError, InvalidParamsError
from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.network.config import CustomDistributionConfig, DistributionConfig
from mfpricing.optimizer.config import OptimizerConfig
from mfpricing.utils.csv import format_real, read_csv

__all__ = [
    "SECTIONS",
    "ExperimentConfig",
    "FigureConfig",
    "OutputConfig",
    "SweepConfig",
    "format_pmf",
    "parse_distribution",
    "parse_params",
    "parse_pmf",
]

SECTIONS = ("params", "distribution", "policy", "optimizer", "sweep", "output", "figure")

_DISTRIBUTION_ADAPTER: TypeAdapter[DistributionConfig] = TypeAdapter(DistributionConfig)
_OPTIMIZER_ADAPTER: TypeAdapter[OptimizerConfig] = TypeAdapter(OptimizerConfig)

# positional fields of the compact `type:a,b,c` distribution syntax
_DISTRIBUTION_FIELDS = {
    "regular": ("degree",),
    "two_degree": ("d_l", "d_u", "q"),
    "jackson_rogers": ("m", "r", "d_max"),
}


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(item.strip() for item in value.split(",") if item.strip())
    return value


class SweepConfig(BaseModel):
    """Sweep of one policy field over an evenly spaced range."""

    variable: Literal["P0", "P1", "eta"]
    start: float
    stop: float
    num: int = 50
    """Number of points, endpoints included."""

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _check_range(self) -> SweepConfig:
        if self.num < 1:
            msg = f"Sweep needs at least one point, got num={self.num}"
            raise ValueError(msg)
        if self.num > 1 and self.start == self.stop:
            msg = f"Sweep range [{self.start}, {self.stop}] is empty"
            raise ValueError(msg)
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


class OutputConfig(BaseModel):
    directory: Path = Path(".")
    """Directory receiving the CSV (and SVG) files."""
    svg: bool = False
    """Also write an SVG line plot for figure commands."""

    model_config = ConfigDict(extra="forbid")


class FigureConfig(BaseModel):
    id: int | None = None
    """Figure number, 2 to 8."""
    jobs: int = 1
    """Number of parallel workers for the sweep points."""
    curves: tuple[float, ...] = (3.0, 7.0, 12.0)
    """Fixed mean degrees of the curves in the 1/r sweep."""
    caps: tuple[float, ...] = (1.0, 2.0, 5.0, 10.0, 20.0, math.inf)
    """Referral caps of the capped-referral sweep. `inf` is the uncapped optimum."""
    price_grid_size: int = 400
    alpha_grid_size: int = 400

    model_config = ConfigDict(extra="forbid")

    @field_validator("curves", "caps", mode="before")
    @classmethod
    def _split_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @model_validator(mode="after")
    def _check_figure(self) -> FigureConfig:
        if self.id is not None and self.id not in range(2, 9):
            msg = f"Unknown figure {self.id}, expected one of 2..8"
            raise ValueError(msg)
        if self.jobs == 0:
            msg = "jobs must be nonzero (negative values count back from the number of CPUs)"
            raise ValueError(msg)
        for cap in self.caps:
            if cap < 1 or (not math.isinf(cap) and cap != int(cap)):
                msg = f"Referral caps must be integers >= 1 or inf, got {cap}"
                raise ValueError(msg)
        return self


class ExperimentConfig(BaseModel):
    """Everything a CLI command needs. Deterministic: there is no seed."""

    params: GameParams = GameParams()
    distribution: DistributionConfig | None = None
    policy: PricingPolicy | None = None
    optimizer: OptimizerConfig | None = None
    sweep: SweepConfig | None = None
    output: OutputConfig = OutputConfig()
    figure: FigureConfig = FigureConfig()

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def parse(cls, text: str, *, base_dir: Path | None = None) -> ExperimentConfig:
        """Parse the text of a configuration file. Relative file references are
        resolved against `base_dir`.
        """
        parser = _make_parser()
        try:
            parser.read_string(text)
        except configparser.Error as e:
            msg = f"Malformed configuration: {e}"
            raise ExperimentConfigError(msg) from e
        unknown = [name for name in parser.sections() if name not in SECTIONS]
        if unknown:
            msg = f"Unknown configuration section(s): {', '.join(unknown)}"
            raise ExperimentConfigError(msg, extra_info={"key": unknown[0]})

        sections = {name: dict(parser.items(name)) for name in parser.sections()}
        data: dict[str, Any] = {}
        if "params" in sections:
            data["params"] = GameParams(**sections["params"])
        if "distribution" in sections:
            data["distribution"] = _distribution_from_section(sections["distribution"], base_dir or Path("."))
        if "optimizer" in sections:
            if "type" not in sections["optimizer"]:
                msg = "[optimizer] needs a `type`"
                raise ExperimentConfigError(msg, extra_info={"key": "optimizer.type"})
            data["optimizer"] = _OPTIMIZER_ADAPTER.validate_python(sections["optimizer"])
        for name in ("policy", "sweep", "output", "figure"):
            if name in sections:
                data[name] = sections[name]
        return cls.model_validate(data)

    @classmethod
    def from_file(cls, path: Path | str) -> ExperimentConfig:
        path = Path(path)
        if not path.is_file():
            msg = f"Configuration file {path} does not exist"
            raise ExperimentConfigError(msg, extra_info={"key": "config"})
        return cls.parse(path.read_text(encoding="utf-8"), base_dir=path.parent)

    def serialize(self) -> str:
        parser = _make_parser()
        parser["params"] = _ini_section(self.params.model_dump())
        if self.distribution is not None:
            values = self.distribution.model_dump()
            if isinstance(self.distribution, CustomDistributionConfig):
                values["pmf"] = format_pmf(self.distribution.pmf)
            parser["distribution"] = _ini_section(values)
        if self.policy is not None:
            parser["policy"] = _ini_section(self.policy.model_dump())
        if self.optimizer is not None:
            parser["optimizer"] = _ini_section(self.optimizer.model_dump(exclude={"search", "solver"}))
        if self.sweep is not None:
            parser["sweep"] = _ini_section(self.sweep.model_dump())
        parser["output"] = _ini_section(self.output.model_dump())
        parser["figure"] = _ini_section(self.figure.model_dump())
        buffer = io.StringIO()
        parser.write(buffer)
        return buffer.getvalue()

    def require_distribution(self) -> DistributionConfig:
        if self.distribution is None:
            msg = "No degree distribution configured: pass --dist or add a [distribution] section"
            raise ExperimentConfigError(msg, extra_info={"key": "distribution"})
        return self.distribution


def _make_parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    return parser


def _ini_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple | list):
        return ",".join(_ini_value(item) for item in value)
    return format_real(value)


def _ini_section(values: dict[str, Any]) -> dict[str, str]:
    return {key: _ini_value(value) for key, value in values.items() if value is not None}


def format_pmf(pmf: dict[int, float]) -> str:
    return ",".join(f"{d}={format_real(prob)}" for d, prob in sorted(pmf.items()))


def parse_pmf(text: str) -> dict[int, float]:
    """`1=0.5,3=0.5` -> {1: 0.5, 3: 0.5}"""
    pmf: dict[int, float] = {}
    for item in text.split(","):
        degree, sep, prob = item.partition("=")
        try:
            if not sep:
                raise ValueError(item)
            pmf[int(degree)] = float(prob)
        except ValueError as e:
            msg = f"Malformed pmf entry {item!r}, expected degree=probability"
            raise ExperimentConfigError(msg, extra_info={"key": "pmf"}) from e
    return pmf


def _distribution_from_section(section: dict[str, str], base_dir: Path) -> DistributionConfig:
    section = dict(section)
    kind = section.get("type")
    if kind is None:
        msg = "[distribution] needs a `type`"
        raise ExperimentConfigError(msg, extra_info={"key": "distribution.type"})
    if kind == "custom":
        if "file" in section:
            path = base_dir / section.pop("file")
            if not path.is_file():
                msg = f"Distribution file {path} does not exist"
                raise ExperimentConfigError(msg, extra_info={"key": "distribution.file"})
            frame, _ = read_csv(path)
            degrees = frame["degree"].astype(int).tolist()
            section["pmf"] = dict(zip(degrees, frame["probability"].astype(float).tolist()))
        elif "pmf" in section:
            section["pmf"] = parse_pmf(section["pmf"])
        else:
            msg = "Custom distribution needs `pmf` or `file`"
            raise ExperimentConfigError(msg, extra_info={"key": "distribution.pmf"})
    return _DISTRIBUTION_ADAPTER.validate_python(section)


def parse_distribution(text: str) -> DistributionConfig:
    """Compact command-line syntax, e.g. `regular:5`, `two_degree:6,13,0.1`,
    `jackson_rogers:7,2,200` or `custom:1=0.5,3=0.5`.
    """
    kind, sep, args = text.partition(":")
    if not sep or not args:
        msg = f"Malformed distribution {text!r}, expected type:arguments"
        raise ExperimentConfigError(msg, extra_info={"key": "dist"})
    if kind == "custom":
        return CustomDistributionConfig(pmf=parse_pmf(args))
    if kind not in _DISTRIBUTION_FIELDS:
        msg = f"Unknown distribution type {kind!r}, expected one of {', '.join([*_DISTRIBUTION_FIELDS, 'custom'])}"
        raise ExperimentConfigError(msg, extra_info={"key": "dist"})
    fields = _DISTRIBUTION_FIELDS[kind]
    values = [v.strip() for v in args.split(",")]
    if len(values) > len(fields):
        msg = f"Too many arguments for {kind}: expected at most {len(fields)} ({', '.join(fields)})"
        raise ExperimentConfigError(msg, extra_info={"key": "dist"})
    return _DISTRIBUTION_ADAPTER.validate_python({"type": kind, **dict(zip(fields, values))})


def parse_params(text: str) -> GameParams:
    """`a0h,a1h,a0l,a1l,p` -> GameParams"""
    items = [item.strip() for item in text.split(",")]
    if len(items) != 5:
        msg = f"Expected five comma-separated values A0H,A1H,A0L,A1L,p, got {len(items)}"
        raise InvalidParamsError(msg)
    try:
        values = [float(item) for item in items]
    except ValueError as e:
        msg = f"Non-numeric payoff in {text!r}"
        raise InvalidParamsError(msg) from e
    return GameParams(**dict(zip(("A0H", "A1H", "A0L", "A1L", "p"), values)))
