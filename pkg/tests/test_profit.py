import math

import pytest

from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.game.equilibrium import solve_equilibrium
from mfpricing.network.degree_dist import DegreeDistribution, make_regular, make_two_degree
from mfpricing.pricing.profit import (
    expected_referral_cost,
    late_adopter_fraction,
    profit_at_policy,
    referral_lower_bound,
    screening_referral,
    two_price_value,
    welfare,
)


def test_zero_prices(params: GameParams, zero_policy: PricingPolicy, regular1: DegreeDistribution):
    breakdown = profit_at_policy(params, zero_policy, regular1)
    assert breakdown.beta == pytest.approx(0.75)
    assert breakdown.gamma_H == pytest.approx(0.25 * 0.75)
    assert breakdown.total == 0.0
    assert breakdown.corner
    assert breakdown.gamma_L == 0.0
    assert breakdown.phi_L == 0.0


def test_interior_two_price(params: GameParams, regular1: DegreeDistribution):
    # 1 - 4 alpha = 0
    breakdown = profit_at_policy(params, PricingPolicy(P0=5.0, P1=10.0), regular1)
    assert breakdown.beta == pytest.approx(0.25)
    assert breakdown.gamma_H == pytest.approx(0.1875)
    assert breakdown.revenue_early == pytest.approx(1.25)
    assert breakdown.revenue_late == pytest.approx(1.875)
    assert breakdown.total == pytest.approx(3.125)
    assert not breakdown.corner


def test_uninformed_monopolist_discounts_late_terms(params: GameParams, regular1: DegreeDistribution):
    policy = PricingPolicy(P0=5.0, P1=10.0, monopolist_informed=False)
    breakdown = profit_at_policy(params, policy, regular1)
    assert breakdown.total == pytest.approx(1.25 + 0.4 * 1.875)


def test_full_adoption_corner(params: GameParams, regular1: DegreeDistribution, two_price_limit: PricingPolicy):
    breakdown = profit_at_policy(params, two_price_limit, regular1)
    assert breakdown.beta == 1.0
    assert breakdown.gamma_H == 0.0
    assert breakdown.total == pytest.approx(params.A_bar)
    assert breakdown.corner


def test_referral_breakdown_identity(params: GameParams, two_degree: DegreeDistribution):
    policy = PricingPolicy(P0=12.0, P1=12.0, eta=4.0)
    eq = solve_equilibrium(params, policy, two_degree)
    breakdown = profit_at_policy(params, policy, two_degree)
    assert breakdown.gamma_H == pytest.approx(late_adopter_fraction(eq, two_degree))
    assert breakdown.phi_H == pytest.approx(expected_referral_cost(eq, two_degree))
    assert breakdown.total == pytest.approx(
        policy.P0 * breakdown.beta + policy.P1 * breakdown.gamma_H - policy.eta * breakdown.phi_H
    )


def test_no_late_revenue_above_late_value(params: GameParams, two_degree: DegreeDistribution):
    breakdown = profit_at_policy(params, PricingPolicy(P0=5.0, P1=25.0, eta=3.0), two_degree)
    assert breakdown.gamma_H == 0.0
    assert breakdown.phi_H == 0.0
    assert breakdown.total == pytest.approx(5.0 * breakdown.beta)


def test_two_price_value(params: GameParams):
    assert two_price_value(params, 0.65, 1) == pytest.approx(8.45)
    assert two_price_value(params, 0.65, 1, informed=False) == pytest.approx(3.9 + 0.4 * 4.55)


def test_referral_lower_bound(params: GameParams):
    assert referral_lower_bound(params, PricingPolicy(P0=5.0, P1=12.5)) == pytest.approx(7.5)


def test_screening_referral(params: GameParams):
    assert math.isinf(screening_referral(params, make_regular(4), 4))
    f = make_two_degree(1, 10_000, 0.01)
    mass = 100 / 100.99
    expected = (params.A1H - params.A_bar) / (params.p * (1 - mass) * 10_000)
    assert screening_referral(params, f, 10_000) == pytest.approx(expected)


def test_welfare(params: GameParams, regular1: DegreeDistribution):
    policy = PricingPolicy(P0=5.0, P1=10.0)
    eq = solve_equilibrium(params, policy, regular1)
    assert welfare(params, eq, regular1, "L") == pytest.approx(0.25 * params.A0L)
    assert welfare(params, eq, regular1, "H") == pytest.approx(0.25 * 30 + 0.1875 * 20)
    expensive = PricingPolicy(P0=5.0, P1=25.0)
    assert welfare(params, eq, regular1, "H", expensive) == pytest.approx(0.25 * 30)
