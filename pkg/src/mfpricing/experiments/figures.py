"""Sweeps behind the profit figures.

Each figure is a list of sweep points (a degree distribution, plus referral caps
for the capped sweep). Points are evaluated independently, in parallel with
joblib if requested, and collected in sweep order so the written CSV does not
depend on the number of workers.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict

from mfpricing.exceptions import ExperimentConfigError
from mfpricing.experiments.config import FigureConfig
from mfpricing.game.abstract import GameParams
from mfpricing.network.config import (
    DistributionConfig,
    JacksonRogersDistributionConfig,
    RegularDistributionConfig,
    TwoDegreeDistributionConfig,
)
from mfpricing.network.degree_dist import moments
from mfpricing.optimizer.abstract import AbstractOptimizer
from mfpricing.optimizer.hooks.status import SetStatusOptimizerHook
from mfpricing.optimizer.referral import CappedReferralOptimizer, ReferralOptimizer
from mfpricing.optimizer.two_price import TwoPriceOptimizer
from mfpricing.utils.csv import format_real, write_csv
from mfpricing.utils.log import get_logger, register_thread_name
from mfpricing.utils.svg import write_line_plot

__all__ = ["FIGURE_IDS", "FigureResult", "FigureTable", "run_figure", "write_figure"]

FIGURE_IDS = (2, 3, 4, 5, 6, 7, 8)

REGULAR_DEGREES = (*range(1, 51), *range(60, 201, 20))
JACKSON_ROGERS_MEANS = tuple(range(2, 16))
JACKSON_ROGERS_R = 2.0
JACKSON_ROGERS_D_MAX = 200
INVERSE_R = tuple(np.linspace(0.0, 1.0, 21))
TWO_DEGREE_Q = 0.1
SHIFTED_LOWER = tuple(range(5, 21))
SHIFT = 7
SPREAD_LOWER = 6
SPREAD_UPPER = tuple(range(12, 191))

_logger = get_logger("mfpricing.figures", emoji="🖼️")


class FigureTable(BaseModel):
    """One CSV file of a figure, with what to plot from it."""

    name: str
    """File stem, e.g. `figure6_std`."""
    frame: pd.DataFrame
    x: str
    ys: list[str]
    ylabel: str = ""
    title: str = ""
    hlines: dict[str, float] = {}

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class FigureResult(BaseModel):
    id: int
    tables: list[FigureTable]
    metadata: dict[str, Any] = {}

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def _jackson_rogers(m: float, r: float = JACKSON_ROGERS_R) -> JacksonRogersDistributionConfig:
    return JacksonRogersDistributionConfig(m=m, r=r, d_max=JACKSON_ROGERS_D_MAX)


def _cap_column(cap: float) -> str:
    return "cap_inf" if math.isinf(cap) else f"cap_{int(cap)}"


def _optimizers(config: FigureConfig, caps: tuple[float, ...]) -> dict[str, AbstractOptimizer]:
    grids = {"price_grid_size": config.price_grid_size, "alpha_grid_size": config.alpha_grid_size}
    if not caps:
        return {"two_price": TwoPriceOptimizer(), "referral": ReferralOptimizer(**grids)}
    return {
        _cap_column(cap): ReferralOptimizer(**grids)
        if math.isinf(cap)
        else CappedReferralOptimizer(cap=int(cap), **grids)
        for cap in caps
    }


def optimal_profits(
    label: str,
    params: GameParams,
    distribution: DistributionConfig,
    config: FigureConfig,
    caps: tuple[float, ...] = (),
) -> dict[str, float]:
    """Optimal two-price and referral profits at one sweep point, or the capped
    referral optima if `caps` is given.
    """
    register_thread_name(label)
    logger = get_logger("mfpricing.figures", emoji="🖼️")
    hook = SetStatusOptimizerHook(label, lambda id, message: logger.debug("%s: %s", id, message))
    f = distribution.get_distribution()
    mean, std = moments(f)
    row: dict[str, float] = {"mean": mean, "std": std}
    for column, optimizer in _optimizers(config, caps).items():
        optimizer.add_hook(hook)
        row[column] = optimizer.optimize(params, f).best_profit
    logger.info("%s: %s", label, ", ".join(f"{k}={v:.6g}" for k, v in row.items()))
    return row


def _sweep(
    params: GameParams,
    config: FigureConfig,
    points: list[tuple[str, DistributionConfig]],
    caps: tuple[float, ...] = (),
) -> list[dict[str, float]]:
    _logger.info("Evaluating %d sweep points with %d job(s)", len(points), config.jobs)
    return Parallel(n_jobs=config.jobs)(
        delayed(optimal_profits)(label, params, distribution, config, caps) for label, distribution in points
    )


def _profit_table(name: str, frame: pd.DataFrame, x: str, title: str, **kwargs: Any) -> FigureTable:
    return FigureTable(
        name=name, frame=frame, x=x, ys=["two_price", "referral"], ylabel="optimal profit", title=title, **kwargs
    )


def _std_table(name: str, frame: pd.DataFrame, key: str, title: str) -> FigureTable:
    return FigureTable(
        name=name, frame=frame[[key, "mean", "std"]], x="mean", ys=["std"], ylabel="std dev of degree", title=title
    )


def _figure2(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    points = [(f"d={d}", RegularDistributionConfig(degree=d)) for d in REGULAR_DEGREES]
    rows = _sweep(params, config, points)
    frame = pd.DataFrame(
        {
            "d": list(REGULAR_DEGREES),
            "two_price": [row["two_price"] for row in rows],
            "referral": [row["referral"] for row in rows],
            "A1H": params.A1H,
        }
    )
    return [
        _profit_table(
            "figure2", frame, "d", "Optimal profit on d-regular networks", hlines={"A1H": params.A1H}
        )
    ]


def _jackson_rogers_rows(params: GameParams, config: FigureConfig) -> pd.DataFrame:
    points = [(f"m={m}", _jackson_rogers(m)) for m in JACKSON_ROGERS_MEANS]
    rows = _sweep(params, config, points)
    return pd.DataFrame({"m": list(JACKSON_ROGERS_MEANS), **pd.DataFrame(rows).to_dict("list")})


def _figure3(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    frame = _jackson_rogers_rows(params, config)
    return [
        _profit_table(
            "figure3", frame[["m", "mean", "two_price", "referral"]], "m", "Optimal profit vs mean degree (r=2)"
        )
    ]


def _figure4(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    rows = []
    for m in JACKSON_ROGERS_MEANS:
        mean, std = moments(_jackson_rogers(m).get_distribution())
        rows.append({"m": m, "mean": mean, "std": std})
    frame = pd.DataFrame(rows)
    return [
        FigureTable(
            name="figure4", frame=frame, x="m", ys=["std"], ylabel="std dev of degree", title="Degree spread (r=2)"
        )
    ]


def _figure5(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    points = []
    for m in config.curves:
        for inv_r in INVERSE_R:
            r = math.inf if inv_r == 0.0 else 1.0 / inv_r
            points.append((f"m={format_real(m)}, 1/r={inv_r:.3g}", _jackson_rogers(m, r)))
    rows = _sweep(params, config, points)
    columns: dict[str, list[float]] = {"inv_r": list(INVERSE_R)}
    ys = []
    for i, m in enumerate(config.curves):
        block = rows[i * len(INVERSE_R) : (i + 1) * len(INVERSE_R)]
        for policy_class in ("two_price", "referral"):
            column = f"{policy_class}_m{format_real(m)}"
            columns[column] = [row[policy_class] for row in block]
            ys.append(column)
    return [
        FigureTable(
            name="figure5",
            frame=pd.DataFrame(columns),
            x="inv_r",
            ys=ys,
            ylabel="optimal profit",
            title="Optimal profit vs 1/r at fixed mean degree",
        )
    ]


def _two_degree_figure(
    figure_id: int,
    params: GameParams,
    config: FigureConfig,
    pairs: list[tuple[int, int]],
    key: str,
    title: str,
) -> list[FigureTable]:
    points = [
        (f"d_l={d_l}, d_u={d_u}", TwoDegreeDistributionConfig(d_l=d_l, d_u=d_u, q=TWO_DEGREE_Q)) for d_l, d_u in pairs
    ]
    rows = pd.DataFrame(_sweep(params, config, points))
    frame = pd.DataFrame({"d_l": [p[0] for p in pairs], "d_u": [p[1] for p in pairs], **rows.to_dict("list")})
    return [
        _profit_table(f"figure{figure_id}", frame[["d_l", "d_u", "mean", "two_price", "referral"]], "mean", title),
        _std_table(f"figure{figure_id}_std", frame, key, "Std dev of degree vs mean degree"),
    ]


def _figure6(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    pairs = [(d_l, d_l + SHIFT) for d_l in SHIFTED_LOWER]
    return _two_degree_figure(6, params, config, pairs, "d_l", "Shifted two-degree distribution")


def _figure7(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    pairs = [(SPREAD_LOWER, d_u) for d_u in SPREAD_UPPER]
    return _two_degree_figure(7, params, config, pairs, "d_u", "Two-degree distribution with growing spread")


def _figure8(params: GameParams, config: FigureConfig) -> list[FigureTable]:
    points = [(f"m={m}", _jackson_rogers(m)) for m in JACKSON_ROGERS_MEANS]
    rows = _sweep(params, config, points, caps=config.caps)
    columns = [_cap_column(cap) for cap in config.caps]
    frame = pd.DataFrame({"m": list(JACKSON_ROGERS_MEANS), **{c: [row[c] for row in rows] for c in columns}})
    return [
        FigureTable(
            name="figure8",
            frame=frame,
            x="m",
            ys=columns,
            ylabel="optimal profit",
            title="Capped referral optima vs mean degree (r=2)",
        )
    ]


_FIGURES = {
    2: _figure2,
    3: _figure3,
    4: _figure4,
    5: _figure5,
    6: _figure6,
    7: _figure7,
    8: _figure8,
}


def run_figure(figure_id: int, params: GameParams | None = None, config: FigureConfig | None = None) -> FigureResult:
    if figure_id not in _FIGURES:
        msg = f"Unknown figure {figure_id}, expected one of {', '.join(map(str, FIGURE_IDS))}"
        raise ExperimentConfigError(msg, extra_info={"key": "figure.id"})
    params = params or GameParams()
    config = config or FigureConfig()
    tables = _FIGURES[figure_id](params, config)
    metadata: dict[str, Any] = {"figure": figure_id, **params.model_dump()}
    if figure_id != 4:
        metadata |= {"price_grid_size": config.price_grid_size, "alpha_grid_size": config.alpha_grid_size}
    return FigureResult(id=figure_id, tables=tables, metadata=metadata)


def write_figure(result: FigureResult, directory: Path | str, *, svg: bool = False) -> list[Path]:
    """Writes one CSV per table, and an SVG next to it if requested."""
    directory = Path(directory)
    written = []
    for table in result.tables:
        written.append(write_csv(directory / f"{table.name}.csv", table.frame, result.metadata))
        if svg:
            written.append(
                write_line_plot(
                    directory / f"{table.name}.svg",
                    table.frame,
                    table.x,
                    table.ys,
                    ylabel=table.ylabel,
                    title=table.title,
                    hlines=table.hlines,
                )
            )
    return written
