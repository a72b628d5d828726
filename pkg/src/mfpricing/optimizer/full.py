import logging
from typing import Any

from typing_extensions import Self

from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.network.degree_dist import DegreeDistribution
from mfpricing.optimizer.abstract import (
    AbstractOptimizer,
    OptimizationResult,
    TraceRecord,
    better,
    limit_equilibrium,
)
from mfpricing.optimizer.config import FullOptimizerConfig
from mfpricing.optimizer.hooks.abstract import CombinedOptimizerHook, OptimizerHook
from mfpricing.optimizer.referral import ReferralOptimizer
from mfpricing.optimizer.two_price import TwoPriceOptimizer
from mfpricing.pricing.limit import evaluate_limit_policy
from mfpricing.utils.log import get_logger

__all__ = ["FullOptimizer", "FullOptimizerConfig", "optimize_full"]


class FullOptimizer(AbstractOptimizer):
    def __init__(self, *, logger: logging.Logger | None = None, **kwargs: Any):
        """Optimal unrestricted policy (P0, P1, η).

        Approaching (Ā, A1H, 0) with independent price cuts and a vanishing
        referral payment can select any double-threshold adoption pattern while
        extracting the full early and late values. The candidates are that limit
        policy and the optima of the two restricted classes, all compared by their
        limit profit in the unrestricted class.

        Args:
            **kwargs: Keyword arguments (see `FullOptimizerConfig` for details).
        """
        self._config = FullOptimizerConfig(**kwargs)
        self.logger = logger or get_logger("mfpricing.optimize")
        self._hooks = CombinedOptimizerHook()

    def add_hook(self, hook: OptimizerHook):
        self._hooks.add_hook(hook)

    @classmethod
    def from_config(cls, config: FullOptimizerConfig) -> Self:
        return cls(**config.model_dump())

    def optimize(self, params: GameParams, f: DegreeDistribution) -> OptimizationResult:
        config = self._config
        self._hooks.on_start("full", 3)
        two_price = TwoPriceOptimizer(
            monopolist_informed=config.monopolist_informed, search=config.search, solver=config.solver
        )
        referral = ReferralOptimizer(
            monopolist_informed=config.monopolist_informed,
            price_grid_size=config.price_grid_size,
            alpha_grid_size=config.alpha_grid_size,
            search=config.search,
            solver=config.solver,
        )
        candidates = [
            PricingPolicy(
                P0=params.A_bar, P1=params.A1H, eta=0.0, monopolist_informed=config.monopolist_informed
            )
        ]
        for i, optimizer in enumerate((two_price, referral)):
            self._hooks.on_custom_step(f"Optimizing {type(optimizer).__name__}")
            candidates.append(optimizer.optimize(params, f).best_policy)
            self._hooks.on_grid_point(i, 3)

        trace = []
        best = None
        best_limit = None
        for policy in candidates:
            limit = evaluate_limit_policy(
                params, policy, f, "full", solver_config=config.solver, search_config=config.search
            )
            trace.append(TraceRecord.from_limit(policy, limit))
            if better((limit.profit, policy), best):
                best, best_limit = (limit.profit, policy), limit
        self._hooks.on_grid_point(2, 3)

        assert best is not None and best_limit is not None
        profit, policy = best
        self.logger.info(
            "Unrestricted optimum %.10g at P0=%.10g, P1=%.10g, eta=%.10g", profit, policy.P0, policy.P1, policy.eta
        )
        return OptimizationResult(
            policy_class="full",
            best_policy=policy,
            best_profit=profit,
            equilibrium=limit_equilibrium(params, policy, best_limit),
            search_trace=trace,
        )


def optimize_full(
    params: GameParams,
    f: DegreeDistribution,
    *,
    price_grid_size: int = 400,
    alpha_grid_size: int = 400,
    monopolist_informed: bool = True,
) -> OptimizationResult:
    return FullOptimizer(
        price_grid_size=price_grid_size, alpha_grid_size=alpha_grid_size, monopolist_informed=monopolist_informed
    ).optimize(params, f)
