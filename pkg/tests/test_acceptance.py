"""Long-running checks of the equilibrium solver and the optimal pricing results. Run with `pytest -m slow`."""

import numpy as np
import pytest

from mfpricing.experiments.config import FigureConfig
from mfpricing.experiments.figures import optimal_profits
from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.game.equilibrium import is_double_threshold, solve_equilibrium
from mfpricing.network.config import JacksonRogersDistributionConfig
from mfpricing.network.degree_dist import (
    DegreeDistribution,
    edge_perspective,
    make_custom,
    make_regular,
    make_two_degree,
)
from mfpricing.optimizer.full import FullOptimizer
from mfpricing.optimizer.referral import CappedReferralOptimizer, ReferralOptimizer
from mfpricing.optimizer.two_price import TwoPriceOptimizer
from mfpricing.pricing.limit import evaluate_limit_policy
from mfpricing.pricing.profit import profit_at_policy, screening_referral

pytestmark = pytest.mark.slow

INDIFFERENCE_TOL = 1e-9


def _random_distribution(rng: np.random.Generator, max_support: int = 6) -> DegreeDistribution:
    k = int(rng.integers(1, max_support + 1))
    degrees = sorted(int(d) for d in rng.choice(np.arange(1, 31), size=k, replace=False))
    return make_custom(dict(zip(degrees, rng.dirichlet(np.ones(k)).tolist())))


def _scan_bracket(params: GameParams, policy: PricingPolicy, f: DegreeDistribution, n: int) -> tuple[float, float]:
    """Bracket of the sign change of `Φ_max(α) - α` on a grid of `n + 1` points."""
    alphas = np.linspace(0.0, 1.0, n + 1)
    f_tilde = edge_perspective(f)
    surplus = max(params.A1H - policy.P1, 0.0)
    referral = policy.eta if policy.P1 <= params.A1H else 0.0
    phi_max = np.zeros_like(alphas)
    for d, mass in f_tilde.pmf.items():
        gain = (
            params.A_bar
            - policy.P0
            + params.p * referral * (1.0 - alphas) * d
            - params.p * surplus * (1.0 - (1.0 - alphas) ** d)
        )
        phi_max += mass * (gain >= -INDIFFERENCE_TOL)
    i = int(np.flatnonzero(phi_max - alphas >= 0.0)[-1])
    return float(alphas[i]), float(alphas[min(i + 1, n)])


def test_bisection_matches_dense_scan(params: GameParams):
    rng = np.random.default_rng(2024)
    for _ in range(200):
        f = _random_distribution(rng)
        policy = PricingPolicy(
            P0=float(rng.uniform(-5.0, 8.0)),
            P1=float(rng.uniform(0.0, 22.0)),
            eta=float(rng.choice([0.0, rng.uniform(0.0, 10.0)])),
        )
        eq = solve_equilibrium(params, policy, f)
        lo, hi = _scan_bracket(params, policy, f, 10**6)
        assert lo - 1e-8 <= eq.alpha_star <= hi + 1e-8
        assert is_double_threshold(eq.strategy)


@pytest.mark.parametrize("d", range(2, 51))
def test_regular_networks_favor_two_prices(params: GameParams, d: int):
    f = make_regular(d)
    grids = {"price_grid_size": 100, "alpha_grid_size": 100}
    two_price = TwoPriceOptimizer().optimize(params, f).best_profit
    referral = ReferralOptimizer(**grids).optimize(params, f).best_profit
    full = FullOptimizer(**grids).optimize(params, f).best_profit
    assert full == pytest.approx(two_price, abs=1e-6)
    assert two_price - referral > 0.0


def test_dense_regular_network_approaches_late_value(params: GameParams):
    f = make_regular(200)
    two_price = TwoPriceOptimizer().optimize(params, f).best_profit
    referral = ReferralOptimizer().optimize(params, f).best_profit
    assert two_price >= 19.0
    assert referral >= 19.0
    assert max(two_price, referral) <= params.A1H
    smaller = TwoPriceOptimizer().optimize(params, make_regular(100)).best_profit
    assert smaller <= two_price + 1e-9


def test_optimal_two_price_policy_dominates(params: GameParams):
    rng = np.random.default_rng(9)
    for _ in range(20):
        f = _random_distribution(rng)
        best = evaluate_limit_policy(params, PricingPolicy(P0=params.A_bar, P1=params.A1H), f, "two_price").profit
        for _ in range(100):
            policy = PricingPolicy(P0=float(rng.uniform(-5.0, params.A_bar)), P1=float(rng.uniform(0.0, params.A1H)))
            assert evaluate_limit_policy(params, policy, f, "two_price").profit <= best + 1e-7


def test_two_price_optimum_bounds_price_grid(params: GameParams):
    rng = np.random.default_rng(5)
    for _ in range(2):
        f = _random_distribution(rng, max_support=5)
        best = TwoPriceOptimizer().optimize(params, f).best_profit
        grid = max(
            profit_at_policy(params, PricingPolicy(P0=float(P0), P1=float(P1)), f).total
            for P0 in np.linspace(-5.0, params.A_bar, 400)
            for P1 in np.linspace(0.0, params.A1H, 400)
        )
        assert grid <= best + 1e-7


@pytest.mark.parametrize("d", [2, 5])
def test_two_price_optimum_is_reached_near_late_value(params: GameParams, d: int):
    # the optimum is a limit towards (Ā, A1H); a fine grid next to it gets within 1e-3
    f = make_regular(d)
    best = TwoPriceOptimizer().optimize(params, f).best_profit
    grid = max(
        profit_at_policy(params, PricingPolicy(P0=float(P0), P1=float(P1)), f).total
        for P0 in np.linspace(params.A_bar - 1e-3, params.A_bar, 400)
        for P1 in np.linspace(params.A1H - 1e-3, params.A1H, 400)
    )
    assert grid == pytest.approx(best, abs=1e-3)
    assert grid <= best + 1e-7


def test_screening_on_two_degree_proxy(params: GameParams):
    # a vanishing mass of very connected agents
    f = make_two_degree(1, 10_000, 0.01)
    referral = ReferralOptimizer().optimize(params, f)
    two_price = TwoPriceOptimizer().optimize(params, f)
    full = FullOptimizer().optimize(params, f)
    assert referral.best_profit >= 19.4
    assert two_price.best_profit <= 6.5
    assert referral.best_profit <= full.best_profit <= params.A1H

    eta_plus = screening_referral(params, f, 10_000)
    policy = referral.best_policy
    assert policy.P0 == pytest.approx(params.A1H, rel=0.05)
    assert policy.eta == pytest.approx(eta_plus, rel=0.05)


@pytest.mark.parametrize("d", range(2, 21))
def test_uninformed_monopolist_is_indifferent_to_referrals(params: GameParams, d: int):
    f = make_regular(d)
    grids = {"price_grid_size": 50, "alpha_grid_size": 50}
    two_price = TwoPriceOptimizer(monopolist_informed=False).optimize(params, f).best_profit
    referral = ReferralOptimizer(monopolist_informed=False, **grids).optimize(params, f).best_profit
    full = FullOptimizer(monopolist_informed=False, **grids).optimize(params, f).best_profit
    assert referral == pytest.approx(two_price, abs=1e-6)
    assert full == pytest.approx(two_price, abs=1e-6)
    assert two_price <= params.p * params.A1H


def test_uninformed_profit_grows_with_degree(params: GameParams):
    profits = [
        TwoPriceOptimizer(monopolist_informed=False).optimize(params, make_regular(d)).best_profit
        for d in (2, 5, 10, 20)
    ]
    assert profits == sorted(profits)


@pytest.mark.parametrize(("m", "referral_wins"), [(3, False), (5, False), (9, True), (12, True)])
def test_jackson_rogers_crossing(params: GameParams, m: int, referral_wins: bool):
    row = optimal_profits(f"m={m}", params, JacksonRogersDistributionConfig(m=m), FigureConfig())
    assert (row["referral"] > row["two_price"]) is referral_wins


def _referral_advantage(params: GameParams, label: str, distribution: JacksonRogersDistributionConfig) -> float:
    row = optimal_profits(label, params, distribution, FigureConfig(price_grid_size=200, alpha_grid_size=200))
    return row["referral"] - row["two_price"]


def _sign_changes(values: list[float]) -> list[int]:
    return [i for i in range(1, len(values)) if (values[i - 1] > 0.0) != (values[i] > 0.0)]


def test_mean_degree_sweep_crosses_once(params: GameParams):
    ms = list(range(2, 16))
    advantage = [_referral_advantage(params, f"m={m}", JacksonRogersDistributionConfig(m=m)) for m in ms]
    changes = _sign_changes(advantage)
    assert len(changes) == 1
    assert advantage[0] < 0.0
    assert 5 <= ms[changes[0] - 1] and ms[changes[0]] <= 9


def test_degree_spread_sweep_crosses_at_moderate_mean(params: GameParams):
    inverse_r = [0.25, 0.3, 0.35, 0.4, 0.45]
    advantage = [
        _referral_advantage(params, f"1/r={x}", JacksonRogersDistributionConfig(m=7, r=1.0 / x)) for x in inverse_r
    ]
    assert advantage[0] < 0.0
    assert advantage[-1] > 0.0
    assert len(_sign_changes(advantage)) == 1


def test_caps_help_on_sparse_networks(params: GameParams):
    f = JacksonRogersDistributionConfig(m=3).get_distribution()
    uncapped = ReferralOptimizer().optimize(params, f).best_profit
    capped = [CappedReferralOptimizer(cap=cap).optimize(params, f).best_profit for cap in range(1, 31)]
    assert max(capped) >= uncapped - 1e-9
    full_cap = CappedReferralOptimizer(cap=f.d_max).optimize(params, f).best_profit
    assert full_cap == pytest.approx(uncapped, abs=1e-9)
