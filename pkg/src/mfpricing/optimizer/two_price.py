import logging
from typing import Any

from typing_extensions import Self

from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.network.degree_dist import DegreeDistribution
from mfpricing.optimizer.abstract import AbstractOptimizer, OptimizationResult, TraceRecord, limit_equilibrium
from mfpricing.optimizer.config import TwoPriceOptimizerConfig
from mfpricing.optimizer.hooks.abstract import CombinedOptimizerHook, OptimizerHook
from mfpricing.pricing.limit import evaluate_limit_policy
from mfpricing.pricing.patterns import SupportArrays, search_patterns
from mfpricing.utils.log import get_logger

__all__ = ["TwoPriceOptimizer", "TwoPriceOptimizerConfig", "optimize_two_price"]


class TwoPriceOptimizer(AbstractOptimizer):
    def __init__(self, *, logger: logging.Logger | None = None, **kwargs: Any):
        """Optimal policy without referrals.

        Charging the expected early value Ā first and the full late value A1H
        second is optimal among two-price policies, so only the lower-threshold
        adoption pattern that the approach to these prices selects is searched.

        Args:
            **kwargs: Keyword arguments (see `TwoPriceOptimizerConfig` for details).
        """
        self._config = TwoPriceOptimizerConfig(**kwargs)
        self.logger = logger or get_logger("mfpricing.optimize")
        self._hooks = CombinedOptimizerHook()

    def add_hook(self, hook: OptimizerHook):
        self._hooks.add_hook(hook)

    @classmethod
    def from_config(cls, config: TwoPriceOptimizerConfig) -> Self:
        return cls(**config.model_dump())

    def optimize(self, params: GameParams, f: DegreeDistribution) -> OptimizationResult:
        policy = PricingPolicy(
            P0=params.A_bar, P1=params.A1H, eta=0.0, monopolist_informed=self._config.monopolist_informed
        )
        arrays = SupportArrays.from_distribution(f)
        self._hooks.on_start("two_price", arrays.size)
        scale = 1.0 if policy.monopolist_informed else params.p
        _, segments = search_patterns(
            arrays, policy.P0, scale * policy.P1, upper_block=False, config=self._config.search
        )
        trace = []
        for i, pattern in enumerate(segments):
            self._hooks.on_grid_point(i, len(segments))
            trace.append(
                TraceRecord(
                    P0=policy.P0,
                    P1=policy.P1,
                    eta=0.0,
                    d_L=int(arrays.degrees[pattern.lower]),
                    d_U=float("inf"),
                    mixing_degree=int(arrays.degrees[pattern.mixing_index]),
                    mixing_weight=pattern.mixing_weight,
                    profit=pattern.value,
                )
            )
        limit = evaluate_limit_policy(
            params, policy, f, "two_price", solver_config=self._config.solver, search_config=self._config.search
        )
        self.logger.info("Two-price optimum %.10g at P0=%.10g, P1=%.10g", limit.profit, policy.P0, policy.P1)
        return OptimizationResult(
            policy_class="two_price",
            best_policy=policy,
            best_profit=limit.profit,
            equilibrium=limit_equilibrium(params, policy, limit),
            search_trace=trace,
        )


def optimize_two_price(
    params: GameParams, f: DegreeDistribution, *, monopolist_informed: bool = True
) -> OptimizationResult:
    return TwoPriceOptimizer(monopolist_informed=monopolist_informed).optimize(params, f)
