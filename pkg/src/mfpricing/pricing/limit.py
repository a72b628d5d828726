"""Limit profit: profit at a policy when consumer indifference is resolved in the
direction of an approach with prices from below and referral payment from above.

Degrees that are tied at the equilibrium access can end up on either side. Each
assignment of the tied degrees is kept if some admissible approach direction
makes it the strict best response, which is a small linear program.
"""

from __future__ import annotations

import itertools

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import linprog

from mfpricing.game.abstract import GameParams, PolicyClass, PricingPolicy, SolverConfig
from mfpricing.game.equilibrium import label_thresholds, solve_equilibrium
from mfpricing.game.payoffs import delta_payoffs, delta_payoffs_slope, expected_referrals_array
from mfpricing.network.degree_dist import DegreeDistribution
from mfpricing.pricing.patterns import PatternSearchConfig, SupportArrays, search_patterns
from mfpricing.pricing.profit import ProfitBreakdown
from mfpricing.utils.log import get_logger

__all__ = ["LimitProfit", "evaluate_limit_policy", "limit_profit"]

_logger = get_logger("mfpricing.limit", emoji="🎯")

DEGENERATE_TOL = 1e-9
MASS_TOL = 1e-8
LP_TOL = 1e-12


class LimitProfit(BaseModel):
    """Limit profit at a policy together with the adoption pattern that attains it."""

    policy_class: PolicyClass
    profit: float
    alpha: float
    beta: float
    gamma: float
    phi: float
    mu: dict[int, float]
    d_L: int | float
    d_U: int | float
    mixing_degree: int | None = None
    mixing_weight: float | None = None
    corner: bool = False
    """No tied assignment is reachable from an admissible direction; the profit is
    the best over all weak best responses instead.
    """
    degenerate: bool = False
    """Every degree is indifferent at every access; the pattern is chosen freely."""

    model_config = ConfigDict(extra="forbid", frozen=True)


def _is_degenerate(params: GameParams, policy: PricingPolicy) -> bool:
    if abs(policy.P0 - params.A_bar) > DEGENERATE_TOL:
        return False
    if policy.P1 > params.A1H + DEGENERATE_TOL:
        return True
    return policy.eta <= DEGENERATE_TOL and policy.P1 >= params.A1H - DEGENERATE_TOL


def _from_mu(
    params: GameParams,
    policy: PricingPolicy,
    arrays: SupportArrays,
    mu: np.ndarray,
    alpha: float,
    policy_class: PolicyClass,
    **extra,
) -> LimitProfit:
    beta = float(arrays.f @ mu)
    if policy.late_adoption_viable(params):
        gamma = float(arrays.f @ ((1.0 - mu) * arrays.informed(alpha)[0]))
        phi = float(arrays.f @ (mu * expected_referrals_array(arrays.degrees, alpha, policy.referral_cap)))
    else:
        gamma = phi = 0.0
    breakdown = ProfitBreakdown.from_terms(policy, params, beta=beta, gamma=gamma, phi=phi)
    mu_map = {int(d): float(v) for d, v in zip(arrays.degrees, mu)}
    d_L, d_U = label_thresholds(params, policy, alpha, mu_map)
    mixing = [(int(d), float(v)) for d, v in zip(arrays.degrees, mu) if 0.0 < v < 1.0]
    return LimitProfit(
        policy_class=policy_class,
        profit=breakdown.total,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        phi=phi,
        mu=mu_map,
        d_L=d_L,
        d_U=d_U,
        mixing_degree=mixing[0][0] if mixing else None,
        mixing_weight=mixing[0][1] if mixing else None,
        **extra,
    )


def _degenerate_limit(
    params: GameParams,
    policy: PricingPolicy,
    arrays: SupportArrays,
    policy_class: PolicyClass,
    config: PatternSearchConfig,
) -> LimitProfit:
    full_adoption = np.ones(arrays.size)
    if policy.P1 > params.A1H + DEGENERATE_TOL or policy_class == "referral":
        # only the first-period price can move, so everybody adopts
        return _from_mu(params, policy, arrays, full_adoption, 1.0, policy_class, degenerate=True)
    scale = 1.0 if policy.monopolist_informed else params.p
    best, _ = search_patterns(
        arrays,
        policy.P0,
        scale * policy.P1,
        upper_block=policy_class == "full",
        config=config,
    )
    return _from_mu(params, policy, arrays, best.mu(arrays), best.alpha, policy_class, degenerate=True)


def _approach_feasible(
    params: GameParams,
    policy: PricingPolicy,
    policy_class: PolicyClass,
    informed: np.ndarray,
    referrals: np.ndarray,
    slopes: np.ndarray,
    assignment: np.ndarray,
) -> bool:
    """Is there an approach direction under which `assignment` is the strict best response?

    `assignment` holds 1 (adopt), 0 (defer) or a mixing weight for each tied degree.
    Variables are the rates (P0 down, P1 down, η up), the induced rate of change
    of the access and a strictness margin.
    """
    viable = policy.late_adoption_viable(params)
    late_rate = -params.p * informed if viable else np.zeros_like(informed)
    referral_rate = params.p * referrals if viable else np.zeros_like(referrals)
    rows = np.column_stack([np.ones_like(informed), late_rate, referral_rate, slopes])

    mixing = (assignment > 0.0) & (assignment < 1.0)
    a_ub, a_eq, b_eq = [], [], []
    for row, value, is_mixing in zip(rows, assignment, mixing):
        if is_mixing:
            a_eq.append([*row, 0.0])
            b_eq.append(0.0)
        elif value == 1.0:
            a_ub.append([*(-row), 1.0])
        else:
            a_ub.append([*row, 1.0])
    a_eq.append([1.0, 1.0, 1.0, 0.0, 0.0])
    b_eq.append(1.0)
    if policy_class == "referral":
        a_eq.append([1.0, -1.0, 0.0, 0.0, 0.0])
        b_eq.append(0.0)

    bounds = [
        (0.0, None),
        (0.0, 0.0) if policy.P1 <= 0.0 else (0.0, None),
        (0.0, 0.0) if policy_class == "two_price" else (0.0, None),
        (None, None) if mixing.any() else (0.0, 0.0),
        (None, 1.0),
    ]
    result = linprog(
        c=[0.0, 0.0, 0.0, 0.0, -1.0],
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.zeros(len(a_ub)) if a_ub else None,
        A_eq=np.array(a_eq),
        b_eq=np.array(b_eq),
        bounds=bounds,
        method="highs",
    )
    return result.status == 0 and -result.fun > LP_TOL


def _tied_assignments(tied_mass: np.ndarray, target: float):
    """Assignments of the tied degrees whose early mass equals `target`, each pure
    or with a single mixing degree.
    """
    t = len(tied_mass)
    for bits in itertools.product((0.0, 1.0), repeat=t):
        chosen = np.array(bits)
        remaining = target - float(tied_mass @ chosen)
        if abs(remaining) <= MASS_TOL:
            yield chosen
            continue
        for m in np.flatnonzero(chosen == 0.0):
            w = remaining / tied_mass[m]
            if remaining > MASS_TOL and (1.0 - w) * tied_mass[m] > MASS_TOL:
                assignment = chosen.copy()
                assignment[m] = w
                yield assignment


def evaluate_limit_policy(
    params: GameParams,
    policy: PricingPolicy,
    f: DegreeDistribution,
    policy_class: PolicyClass = "full",
    *,
    solver_config: SolverConfig | None = None,
    search_config: PatternSearchConfig | None = None,
) -> LimitProfit:
    """Limit profit of `policy`, approached within `policy_class`."""
    search_config = search_config or PatternSearchConfig()
    arrays = SupportArrays.from_distribution(f)
    if _is_degenerate(params, policy):
        return _degenerate_limit(params, policy, arrays, policy_class, search_config)

    eq = solve_equilibrium(params, policy, f, solver_config)
    alpha = eq.alpha_star
    solver_mu = np.array([eq.mu[int(d)] for d in arrays.degrees])
    delta = delta_payoffs(params, policy, alpha, arrays.degrees.astype(int))
    tied = (np.abs(delta) <= search_config.tie_tol) | np.isin(arrays.degrees, eq.mixing_degrees)
    if not tied.any():
        return _from_mu(params, policy, arrays, solver_mu, alpha, policy_class)
    if tied.sum() > search_config.max_tied_degrees:
        _logger.warning(
            "%d tied degrees exceed the enumeration bound %d, keeping the solver's strategy",
            tied.sum(),
            search_config.max_tied_degrees,
        )
        return _from_mu(params, policy, arrays, solver_mu, alpha, policy_class)

    strict = (delta > search_config.tie_tol) & ~tied
    target = alpha - float(arrays.f_tilde[strict].sum())
    tied_degrees = arrays.degrees[tied]
    informed = arrays.informed(alpha)[0][tied]
    referrals = expected_referrals_array(tied_degrees, alpha, policy.referral_cap)
    slopes = delta_payoffs_slope(params, policy, alpha, tied_degrees)

    reachable: list[LimitProfit] = []
    weak: list[LimitProfit] = []
    for assignment in _tied_assignments(arrays.f_tilde[tied], target):
        mu = np.where(strict, 1.0, 0.0)
        mu[tied] = assignment
        candidate = _from_mu(params, policy, arrays, mu, alpha, policy_class)
        weak.append(candidate)
        if _approach_feasible(params, policy, policy_class, informed, referrals, slopes, assignment):
            reachable.append(candidate)
    if reachable:
        return max(reachable, key=lambda c: c.profit)
    if not weak:
        return _from_mu(params, policy, arrays, solver_mu, alpha, policy_class, corner=True)
    _logger.info("No tied assignment is reachable at %s, using the best weak best response", policy)
    best = max(weak, key=lambda c: c.profit)
    return best.model_copy(update={"corner": True})


def limit_profit(
    params: GameParams,
    policy: PricingPolicy,
    f: DegreeDistribution,
    policy_class: PolicyClass = "full",
    *,
    solver_config: SolverConfig | None = None,
    search_config: PatternSearchConfig | None = None,
) -> float:
    return evaluate_limit_policy(
        params, policy, f, policy_class, solver_config=solver_config, search_config=search_config
    ).profit
