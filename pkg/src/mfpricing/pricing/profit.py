"""Monopolist profit and consumer welfare at a solved equilibrium."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict
from typing_extensions import Self

from mfpricing.game.abstract import GameParams, MeanFieldEquilibrium, PricingPolicy, SolverConfig
from mfpricing.game.equilibrium import early_fraction, solve_equilibrium
from mfpricing.game.payoffs import expected_referrals
from mfpricing.network.degree_dist import DegreeDistribution, edge_perspective

__all__ = [
    "ProfitBreakdown",
    "expected_referral_cost",
    "late_adopter_fraction",
    "profit_at_policy",
    "referral_lower_bound",
    "screening_referral",
    "two_price_value",
    "welfare",
]


class ProfitBreakdown(BaseModel):
    """Profit components when quality is high.

    With a low-quality product nobody adopts late and no referral is paid, so
    the low-quality components are identically zero.
    """

    beta: float
    """Fraction of early adopters."""
    gamma_H: float
    """Fraction of late adopters."""
    phi_H: float
    """Expected referral payments per capita, in units of η."""
    revenue_early: float
    revenue_late: float
    referral_cost: float
    total: float
    corner: bool = False
    """True if the informational access is 0 or 1, or the policy gives the product away late (P1 = 0)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @property
    def gamma_L(self) -> float:
        return 0.0

    @property
    def phi_L(self) -> float:
        return 0.0

    @classmethod
    def from_terms(
        cls, policy: PricingPolicy, params: GameParams, *, beta: float, gamma: float, phi: float, corner: bool = False
    ) -> Self:
        """Uninformed monopolists only collect the late terms when quality turns out high."""
        scale = 1.0 if policy.monopolist_informed else params.p
        revenue_early = beta * policy.P0
        revenue_late = scale * gamma * policy.P1
        referral_cost = scale * phi * policy.eta
        return cls(
            beta=beta,
            gamma_H=gamma,
            phi_H=phi,
            revenue_early=revenue_early,
            revenue_late=revenue_late,
            referral_cost=referral_cost,
            total=revenue_early + revenue_late - referral_cost,
            corner=corner,
        )


def late_adopter_fraction(eq: MeanFieldEquilibrium, f: DegreeDistribution) -> float:
    """Deferring agents with at least one early-adopting neighbor."""
    alpha = eq.alpha_star
    return math.fsum(prob * (1.0 - eq.mu.get(d, 0.0)) * (1.0 - (1.0 - alpha) ** d) for d, prob in f.pmf.items())


def expected_referral_cost(eq: MeanFieldEquilibrium, f: DegreeDistribution, cap: int | None = None) -> float:
    alpha = eq.alpha_star
    return math.fsum(prob * eq.mu.get(d, 0.0) * expected_referrals(d, alpha, cap) for d, prob in f.pmf.items())


def profit_at_policy(
    params: GameParams, policy: PricingPolicy, f: DegreeDistribution, config: SolverConfig | None = None
) -> ProfitBreakdown:
    eq = solve_equilibrium(params, policy, f, config)
    beta = early_fraction(eq.strategy, f)
    if policy.late_adoption_viable(params):
        gamma = late_adopter_fraction(eq, f)
        phi = expected_referral_cost(eq, f, policy.referral_cap)
    else:
        gamma = phi = 0.0
    return ProfitBreakdown.from_terms(
        policy, params, beta=beta, gamma=gamma, phi=phi, corner=eq.is_corner or policy.P1 == 0.0
    )


def welfare(
    params: GameParams,
    eq: MeanFieldEquilibrium,
    f: DegreeDistribution,
    theta: Literal["H", "L"],
    policy: PricingPolicy | None = None,
) -> float:
    """Total consumer value of use. Prices and referrals are transfers and cancel.

    Pass `policy` to drop late adoption when the second-period price exceeds its value.
    """
    beta = early_fraction(eq.strategy, f)
    if theta == "L":
        return beta * params.A0L
    late = policy is None or policy.late_adoption_viable(params)
    gamma = late_adopter_fraction(eq, f) if late else 0.0
    return beta * (params.A0H + params.A1H) + gamma * params.A1H


def two_price_value(params: GameParams, alpha: float, d: int, *, informed: bool = True) -> float:
    """Profit of the two-price policy (Ā, A1H, 0) on the d-regular network
    when a fraction `alpha` adopts early.
    """
    scale = 1.0 if informed else params.p
    return alpha * params.A_bar + scale * (1.0 - alpha) * (1.0 - (1.0 - alpha) ** d) * params.A1H


def referral_lower_bound(params: GameParams, policy: PricingPolicy) -> float:
    """Referral payment above which only a high-degree block adopts early."""
    return params.A1H - policy.P1


def screening_referral(params: GameParams, f: DegreeDistribution, d_u: int) -> float:
    """Referral that leaves degree `d_u` indifferent when exactly that degree adopts
    early at prices P0 = P1 = A1H.
    """
    f_tilde = edge_perspective(f)
    mass = f_tilde.pmf.get(d_u, 0.0)
    if mass >= 1.0:
        return math.inf
    return (params.A1H - params.A_bar) / (params.p * (1.0 - mass) * d_u)
