"""Referral policies: one price P charged in both periods plus a referral payment η.

For a fixed price and a target informational access α, every degree has a
referral payment that makes it indifferent. Sorting degrees by that payment, the
cheapest ones adopt until their edge mass reaches α; the payment of the marginal
degree is then the unique η that sustains α. This turns the search over (P, η)
into a search over (P, α) on which every point is an equilibrium.
"""

import logging
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import minimize_scalar
from typing_extensions import Self

from mfpricing.exceptions import InvalidPolicyError
from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.game.equilibrium import label_thresholds
from mfpricing.game.payoffs import expected_referrals_grid
from mfpricing.network.degree_dist import DegreeDistribution
from mfpricing.optimizer.abstract import (
    AbstractOptimizer,
    OptimizationResult,
    TraceRecord,
    better,
    limit_equilibrium,
)
from mfpricing.optimizer.config import CappedReferralOptimizerConfig, ReferralOptimizerConfig
from mfpricing.optimizer.hooks.abstract import CombinedOptimizerHook, OptimizerHook
from mfpricing.pricing.limit import evaluate_limit_policy
from mfpricing.pricing.patterns import SupportArrays
from mfpricing.utils.log import get_logger

__all__ = [
    "CappedReferralOptimizer",
    "ReferralOptimizer",
    "ReferralSurface",
    "optimize_capped_referral",
    "optimize_referral",
]

MASS_TOL = 1e-12


class SurfacePoint(BaseModel):
    """Consistent referral policy at price `price` sustaining access `alpha`."""

    price: float
    alpha: float
    eta: float
    profit: float
    mu: dict[int, float]

    model_config = ConfigDict(extra="forbid", frozen=True)


class ReferralSurface:
    """Profit of consistent referral policies as a function of price and access."""

    def __init__(
        self, params: GameParams, f: DegreeDistribution, *, cap: int | None = None, monopolist_informed: bool = True
    ):
        self.params = params
        self.arrays = SupportArrays.from_distribution(f)
        self.cap = cap
        self.monopolist_informed = monopolist_informed

    def tables(self, alphas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Informed probability and expected referrals, one row per access."""
        return self.arrays.informed(alphas), expected_referrals_grid(self.arrays.degrees, alphas, self.cap)

    def evaluate(
        self, price: float, alphas: np.ndarray, informed: np.ndarray, referrals: np.ndarray
    ) -> dict[str, np.ndarray]:
        params, f = self.params, self.arrays.f
        n, k = informed.shape
        with np.errstate(divide="ignore", invalid="ignore"):
            indifference = (params.p * (params.A1H - price) * informed - (params.A_bar - price)) / (
                params.p * referrals
            )
        order = np.argsort(indifference, axis=1, kind="stable")
        cumulative = np.cumsum(self.arrays.f_tilde[order], axis=1)
        j = np.minimum(np.argmax(cumulative >= alphas[:, None] - MASS_TOL, axis=1), k - 1)
        rows = np.arange(n)
        marginal = order[rows, j]
        mass = self.arrays.f_tilde[marginal]
        weight = np.clip((alphas - (cumulative[rows, j] - mass)) / mass, 0.0, 1.0)
        eta = indifference[rows, marginal]

        def adopters(values: np.ndarray) -> np.ndarray:
            ordered = np.take_along_axis(values, order, axis=1)
            return np.cumsum(ordered, axis=1)[rows, j] - ordered[rows, j] + weight * ordered[rows, j]

        beta = adopters(np.broadcast_to(f, (n, k)))
        late_informed = f[None, :] * informed
        gamma = late_informed.sum(axis=1) - adopters(late_informed)
        phi = adopters(f[None, :] * referrals)
        if self.monopolist_informed:
            profit = price * (beta + gamma) - phi * eta
        else:
            profit = price * beta + params.p * (gamma * price - phi * eta)
        feasible = np.isfinite(eta) & (eta >= 0.0)
        return {
            "profit": np.where(feasible, profit, -np.inf),
            "eta": eta,
            "order": order,
            "j": j,
            "weight": weight,
        }

    def point(self, price: float, alpha: float) -> SurfacePoint:
        alphas = np.array([alpha])
        values = self.evaluate(price, alphas, *self.tables(alphas))
        order, j, w = values["order"][0], int(values["j"][0]), float(values["weight"][0])
        mu = np.zeros(self.arrays.size)
        mu[order[:j]] = 1.0
        mu[order[j]] = w
        return SurfacePoint(
            price=price,
            alpha=alpha,
            eta=float(values["eta"][0]),
            profit=float(values["profit"][0]),
            mu={int(d): float(v) for d, v in zip(self.arrays.degrees, mu)},
        )


class ReferralOptimizer(AbstractOptimizer):
    _config_class: type[ReferralOptimizerConfig] = ReferralOptimizerConfig

    def __init__(self, *, logger: logging.Logger | None = None, **kwargs: Any):
        """Optimal policy with a single price and a referral payment.

        Args:
            **kwargs: Keyword arguments (see `ReferralOptimizerConfig` for details).
        """
        self._config = self._config_class(**kwargs)
        self.logger = logger or get_logger("mfpricing.optimize")
        self._hooks = CombinedOptimizerHook()

    def add_hook(self, hook: OptimizerHook):
        self._hooks.add_hook(hook)

    @classmethod
    def from_config(cls, config: ReferralOptimizerConfig) -> Self:
        return cls(**config.model_dump())

    @property
    def cap(self) -> int | None:
        return None

    def _policy(self, point: SurfacePoint) -> PricingPolicy:
        return PricingPolicy(
            P0=point.price,
            P1=point.price,
            eta=point.eta,
            referral_cap=self.cap,
            monopolist_informed=self._config.monopolist_informed,
        )

    def _best_alpha(self, surface: ReferralSurface, price: float, alphas: np.ndarray, tables) -> SurfacePoint | None:
        values = surface.evaluate(price, alphas, *tables)
        i = int(np.argmax(values["profit"]))
        if not np.isfinite(values["profit"][i]):
            return None
        grid_point = surface.point(price, float(alphas[i]))
        lo = float(alphas[i - 1]) if i > 0 else 0.0
        hi = float(alphas[i + 1]) if i + 1 < len(alphas) else 0.5 * (float(alphas[i]) + 1.0)
        result = minimize_scalar(
            lambda a: -surface.point(price, a).profit,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": self._config.alpha_tol},
        )
        refined = surface.point(price, float(result.x))
        return refined if refined.profit > grid_point.profit else grid_point

    def optimize(self, params: GameParams, f: DegreeDistribution) -> OptimizationResult:
        config = self._config
        surface = ReferralSurface(params, f, cap=self.cap, monopolist_informed=config.monopolist_informed)
        prices = np.linspace(0.0, params.A1H, config.price_grid_size)
        alphas = np.linspace(0.0, 1.0, config.alpha_grid_size + 2)[1:-1]
        tables = surface.tables(alphas)

        self._hooks.on_start("referral", len(prices))
        trace: list[TraceRecord] = []
        best: tuple[float, PricingPolicy] | None = None
        best_index = -1
        for i, price in enumerate(prices):
            self._hooks.on_grid_point(i, len(prices))
            values = surface.evaluate(float(price), alphas, *tables)
            a = int(np.argmax(values["profit"]))
            if not np.isfinite(values["profit"][a]):
                continue
            point = surface.point(float(price), float(alphas[a]))
            policy = self._policy(point)
            trace.append(self._trace_record(params, policy, point))
            if better((point.profit, policy), best):
                best, best_index = (point.profit, policy), i

        if best is None:
            msg = "No referral policy sustains an interior informational access on the grid"
            self.logger.warning(msg)
            null = PricingPolicy(
                P0=0.0, P1=0.0, eta=0.0, referral_cap=self.cap, monopolist_informed=config.monopolist_informed
            )
            return self._result(params, f, null, trace, diagnostic=msg)

        point = self._refine(surface, prices, best_index, alphas, tables)
        policy = self._policy(point)
        if not better((point.profit, policy), best):
            policy = best[1]
        return self._result(params, f, policy, trace)

    def _refine(self, surface: ReferralSurface, prices: np.ndarray, i: int, alphas: np.ndarray, tables) -> SurfacePoint:
        grid_point = self._best_alpha(surface, float(prices[i]), alphas, tables)
        lo = float(prices[max(i - 1, 0)])
        hi = float(prices[min(i + 1, len(prices) - 1)])

        def negative_profit(price: float) -> float:
            point = self._best_alpha(surface, price, alphas, tables)
            return np.inf if point is None else -point.profit

        result = minimize_scalar(
            negative_profit, bounds=(lo, hi), method="bounded", options={"xatol": self._config.price_tol}
        )
        refined = self._best_alpha(surface, float(result.x), alphas, tables)
        if refined is not None and refined.profit > grid_point.profit:
            return refined
        return grid_point

    def _trace_record(self, params: GameParams, policy: PricingPolicy, point: SurfacePoint) -> TraceRecord:
        d_L, d_U = label_thresholds(params, policy, point.alpha, point.mu)
        mixing = [(d, w) for d, w in point.mu.items() if 0.0 < w < 1.0]
        return TraceRecord(
            P0=policy.P0,
            P1=policy.P1,
            eta=policy.eta,
            d_L=d_L,
            d_U=d_U,
            mixing_degree=mixing[0][0] if mixing else None,
            mixing_weight=mixing[0][1] if mixing else None,
            profit=point.profit,
        )

    def _result(
        self,
        params: GameParams,
        f: DegreeDistribution,
        policy: PricingPolicy,
        trace: list[TraceRecord],
        diagnostic: str = "",
    ) -> OptimizationResult:
        limit = evaluate_limit_policy(
            params, policy, f, "referral", solver_config=self._config.solver, search_config=self._config.search
        )
        self.logger.info(
            "Referral optimum %.10g at P=%.10g, eta=%.10g%s",
            limit.profit,
            policy.P0,
            policy.eta,
            "" if self.cap is None else f" (cap {self.cap})",
        )
        return OptimizationResult(
            policy_class="referral",
            best_policy=policy,
            best_profit=limit.profit,
            equilibrium=limit_equilibrium(params, policy, limit),
            search_trace=trace,
            diagnostic=diagnostic,
        )


class CappedReferralOptimizer(ReferralOptimizer):
    """Referral optimization with at most `cap` paid referrals per early adopter.

    A cap makes the referral value concave in the degree, so adopters need not form
    a double-threshold block; the access parameterization covers those patterns too.
    """

    _config_class = CappedReferralOptimizerConfig

    @property
    def cap(self) -> int | None:
        return self._config.cap  # type: ignore[attr-defined]

    @classmethod
    def from_config(cls, config: CappedReferralOptimizerConfig) -> Self:  # type: ignore[override]
        return cls(**config.model_dump())


def optimize_referral(
    params: GameParams,
    f: DegreeDistribution,
    price_grid_size: int = 400,
    cap: int | None = None,
    *,
    monopolist_informed: bool = True,
) -> OptimizationResult:
    if cap is not None:
        return optimize_capped_referral(
            params, f, cap, price_grid_size=price_grid_size, monopolist_informed=monopolist_informed
        )
    return ReferralOptimizer(price_grid_size=price_grid_size, monopolist_informed=monopolist_informed).optimize(
        params, f
    )


def optimize_capped_referral(
    params: GameParams,
    f: DegreeDistribution,
    d_max_cap: int,
    *,
    price_grid_size: int = 400,
    monopolist_informed: bool = True,
) -> OptimizationResult:
    if d_max_cap < 1:
        msg = f"Referral cap must be at least 1, got {d_max_cap}"
        raise InvalidPolicyError(msg)
    return CappedReferralOptimizer(
        cap=d_max_cap, price_grid_size=price_grid_size, monopolist_informed=monopolist_informed
    ).optimize(params, f)
