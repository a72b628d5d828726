import logging
from abc import ABC, abstractmethod

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from typing_extensions import Self

from mfpricing.game.abstract import (
    GameParams,
    MeanFieldEquilibrium,
    MeanFieldStrategy,
    PolicyClass,
    PricingPolicy,
)
from mfpricing.game.payoffs import delta_payoffs
from mfpricing.network.degree_dist import DegreeDistribution
from mfpricing.optimizer.hooks.abstract import OptimizerHook
from mfpricing.pricing.limit import LimitProfit

__all__ = ["AbstractOptimizer", "OptimizationResult", "TraceRecord", "limit_equilibrium"]

TRACE_COLUMNS = ["P0", "P1", "eta", "d_L", "d_U", "mixing_degree", "mixing_weight", "profit"]

TIE_TOL = 1e-12


class TraceRecord(BaseModel):
    """One evaluated policy of a search."""

    P0: float
    P1: float
    eta: float
    d_L: int | float
    d_U: int | float
    mixing_degree: int | None = None
    mixing_weight: float | None = None
    profit: float

    model_config = ConfigDict(extra="forbid", frozen=True)

    @classmethod
    def from_limit(cls, policy: PricingPolicy, limit: LimitProfit) -> Self:
        return cls(
            P0=policy.P0,
            P1=policy.P1,
            eta=policy.eta,
            d_L=limit.d_L,
            d_U=limit.d_U,
            mixing_degree=limit.mixing_degree,
            mixing_weight=limit.mixing_weight,
            profit=limit.profit,
        )


class OptimizationResult(BaseModel):
    policy_class: PolicyClass
    best_policy: PricingPolicy
    best_profit: float
    """Limit profit of `best_policy` within `policy_class`."""
    equilibrium: MeanFieldEquilibrium
    """The adoption pattern attaining `best_profit`."""
    search_trace: list[TraceRecord] = []
    diagnostic: str = ""
    """Non-empty if the search found nothing better than the null policy or had to prune."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    def trace_frame(self) -> pd.DataFrame:
        if not self.search_trace:
            return pd.DataFrame(columns=TRACE_COLUMNS)
        return pd.DataFrame([record.model_dump() for record in self.search_trace], columns=TRACE_COLUMNS)


def limit_equilibrium(params: GameParams, policy: PricingPolicy, limit: LimitProfit) -> MeanFieldEquilibrium:
    """Equilibrium at `policy` whose strategy is the pattern selected by the limit."""
    degrees = np.array(sorted(limit.mu))
    delta = delta_payoffs(params, policy, limit.alpha, degrees)
    return MeanFieldEquilibrium(
        strategy=MeanFieldStrategy(mu=limit.mu),
        alpha_star=limit.alpha,
        d_L=limit.d_L,
        d_U=limit.d_U,
        mixing_degrees=tuple(d for d, v in limit.mu.items() if 0.0 < v < 1.0),
        delta_payoffs={int(d): float(v) for d, v in zip(degrees, delta)},
    )


def better(candidate: tuple[float, PricingPolicy], incumbent: tuple[float, PricingPolicy] | None) -> bool:
    """Higher profit wins. Ties go to the smaller referral payment, then the
    larger second-period price, then the larger first-period price.
    """
    if incumbent is None:
        return True
    profit, policy = candidate
    best_profit, best_policy = incumbent
    if abs(profit - best_profit) > TIE_TOL:
        return profit > best_profit
    return (-policy.eta, policy.P1, policy.P0) > (-best_policy.eta, best_policy.P1, best_policy.P0)


class AbstractOptimizer(ABC):
    def __init__(self, *args, **kwargs):
        self.logger: logging.Logger

    @abstractmethod
    def add_hook(self, hook: OptimizerHook): ...

    @abstractmethod
    def optimize(self, params: GameParams, f: DegreeDistribution) -> OptimizationResult:
        """Maximizes the limit profit over the optimizer's policy class."""
