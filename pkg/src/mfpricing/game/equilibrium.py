"""Mean-field equilibrium by monotone bisection on the informational access."""

from __future__ import annotations

import math
from collections.abc import Mapping

import numpy as np
import pandas as pd

from mfpricing.exceptions import EquilibriumNotConvergedError, UndefinedEfficiencyError
from mfpricing.game.abstract import (
    INFINITE_DEGREE,
    AssumptionReport,
    GameParams,
    MeanFieldEquilibrium,
    MeanFieldStrategy,
    PricingPolicy,
    ReferralRegime,
    SolverConfig,
)
from mfpricing.game.payoffs import delta_payoff, delta_payoffs
from mfpricing.network.degree_dist import DegreeDistribution, EdgePerspectiveDistribution, edge_perspective
from mfpricing.utils.log import get_logger

__all__ = [
    "adoption_bounds",
    "check_assumptions",
    "early_fraction",
    "equilibrium_table",
    "informational_access",
    "informational_efficiency",
    "is_double_threshold",
    "label_thresholds",
    "referral_regime",
    "solve_equilibrium",
    "thresholds",
]

_logger = get_logger("mfpricing.equilibrium", emoji="⚖️")

_SNAP_FACTOR = 10.0


def _mu_values(mu: MeanFieldStrategy | Mapping[int, float]) -> Mapping[int, float]:
    return mu.mu if isinstance(mu, MeanFieldStrategy) else mu


def check_assumptions(params: GameParams) -> AssumptionReport:
    return params.assumptions()


def adoption_bounds(
    params: GameParams, policy: PricingPolicy, f: DegreeDistribution, alpha: float, *, tol: float = 1e-9
) -> tuple[float, float]:
    """Smallest and largest informational access a best response to `alpha` can induce.

    Both bounds are nonincreasing in `alpha`; the equilibrium access is the
    unique `alpha` lying between them.
    """
    f_tilde = edge_perspective(f)
    delta = delta_payoffs(params, policy, alpha, f_tilde.degrees)
    weights = f_tilde.probabilities
    return float(weights[delta > tol].sum()), float(weights[delta >= -tol].sum())


def _is_lower_mixing(params: GameParams, policy: PricingPolicy, alpha: float, d: int) -> bool:
    return delta_payoff(params, policy, alpha, d + 1) - delta_payoff(params, policy, alpha, d) < 0


def label_thresholds(
    params: GameParams, policy: PricingPolicy, alpha: float, mu: Mapping[int, float]
) -> tuple[int | float, int | float]:
    """Threshold pair `(d_L, d_U)` of a double-threshold strategy.

    `d_L = 0` means no low-degree block adopts, `d_U = inf` means no high-degree
    block adopts, `(inf, inf)` is full early adoption. A mixing degree at the
    edge of the support is a lower threshold where the payoff gain falls with
    the degree and an upper threshold otherwise.
    """
    degrees = sorted(mu)
    below = [i for i, d in enumerate(degrees) if mu[d] < 1.0]
    if not below:
        return INFINITE_DEGREE, INFINITE_DEGREE
    first, last = below[0], below[-1]

    d_first = degrees[first]
    if first == 0 and not (mu[d_first] > 0.0 and _is_lower_mixing(params, policy, alpha, d_first)):
        d_L: int | float = 0
    else:
        d_L = d_first

    d_last = degrees[last]
    if last == len(degrees) - 1 and not (mu[d_last] > 0.0 and not _is_lower_mixing(params, policy, alpha, d_last)):
        d_U: int | float = INFINITE_DEGREE
    else:
        d_U = d_last
    return d_L, d_U


def is_double_threshold(mu: MeanFieldStrategy | Mapping[int, float]) -> bool:
    """Adopt below some degree, defer in between, adopt above, with interior
    values allowed only at the two boundaries of the deferring block.
    """
    values = [v for _, v in sorted(_mu_values(mu).items())]
    start, end = 0, len(values)
    while start < end and values[start] == 1.0:
        start += 1
    while end > start and values[end - 1] == 1.0:
        end -= 1
    return all(v == 0.0 for v in values[start + 1 : end - 1])


def _full_adoption(
    params: GameParams, policy: PricingPolicy, f: DegreeDistribution, iterations: int = 0
) -> MeanFieldEquilibrium:
    degrees = f.degrees
    delta = delta_payoffs(params, policy, 1.0, degrees)
    return MeanFieldEquilibrium(
        strategy=MeanFieldStrategy.constant(degrees, 1.0),
        alpha_star=1.0,
        d_L=INFINITE_DEGREE,
        d_U=INFINITE_DEGREE,
        delta_payoffs={int(d): float(v) for d, v in zip(degrees, delta)},
        iterations=iterations,
    )


def solve_equilibrium(
    params: GameParams,
    policy: PricingPolicy,
    f: DegreeDistribution,
    config: SolverConfig | None = None,
) -> MeanFieldEquilibrium:
    """Unique equilibrium access `alpha_star` and a consistent double-threshold strategy.

    Bisects on `alpha` until the best-response bounds bracket it, then assigns
    strict best responses and fills indifferent degrees in ascending order.
    """
    config = config or SolverConfig()
    tol = config.indifference_tol
    surplus = max(params.A1H - policy.P1, 0.0)
    if params.A_bar - policy.P0 >= params.p * surplus:
        _logger.debug("Early payoff exceeds any late surplus, full early adoption")
        return _full_adoption(params, policy, f)

    f_tilde = edge_perspective(f)
    degrees = f_tilde.degrees
    weights = f_tilde.probabilities

    def bounds(alpha: float) -> tuple[float, float]:
        delta = delta_payoffs(params, policy, alpha, degrees)
        return float(weights[delta > tol].sum()), float(weights[delta >= -tol].sum())

    lo, hi = 0.0, 1.0
    iterations = 0
    while hi - lo > config.alpha_tol:
        if iterations >= config.max_iter:
            msg = f"Bisection did not converge within {config.max_iter} iterations"
            raise EquilibriumNotConvergedError(msg, extra_info={"lo": lo, "hi": hi, "iterations": iterations})
        iterations += 1
        mid = 0.5 * (lo + hi)
        phi_min, phi_max = bounds(mid)
        if phi_max < mid:
            hi = mid
        elif phi_min > mid:
            lo = mid
        else:
            lo = hi = mid
    _logger.debug("Bracket [%.12g, %.12g] after %d iterations", lo, hi, iterations)

    delta_hi = delta_payoffs(params, policy, hi, degrees)
    delta_lo = delta_payoffs(params, policy, lo, degrees)
    adopt = delta_hi > tol
    defer = (delta_lo < -tol) & ~adopt
    mu = np.where(adopt, 1.0, 0.0)

    remaining = 0.5 * (lo + hi) - float(weights[adopt].sum())
    snap = _SNAP_FACTOR * config.alpha_tol
    for i in np.flatnonzero(~adopt & ~defer):
        w = min(max(remaining / weights[i], 0.0), 1.0)
        if w * weights[i] < snap:
            w = 0.0
        elif (1.0 - w) * weights[i] < snap:
            w = 1.0
        mu[i] = w
        remaining -= w * weights[i]

    alpha_star = math.fsum(weights * mu)
    if alpha_star >= 1.0 - snap and np.all(mu == 1.0):
        return _full_adoption(params, policy, f, iterations)
    mu_map = {int(d): float(v) for d, v in zip(degrees, mu)}
    d_L, d_U = label_thresholds(params, policy, alpha_star, mu_map)
    delta = delta_payoffs(params, policy, alpha_star, degrees)
    mixing = tuple(d for d, v in mu_map.items() if 0.0 < v < 1.0)
    if len(mixing) > 1:
        _logger.warning("%d degrees mix simultaneously: %s", len(mixing), mixing)
    return MeanFieldEquilibrium(
        strategy=MeanFieldStrategy(mu=mu_map),
        alpha_star=alpha_star,
        d_L=d_L,
        d_U=d_U,
        mixing_degrees=mixing,
        delta_payoffs={int(d): float(v) for d, v in zip(degrees, delta)},
        iterations=iterations,
    )


def thresholds(eq: MeanFieldEquilibrium) -> tuple[int | float, int | float]:
    return eq.d_L, eq.d_U


def informational_access(
    mu: MeanFieldStrategy | Mapping[int, float], f_tilde: EdgePerspectiveDistribution
) -> float:
    values = _mu_values(mu)
    return math.fsum(prob * values.get(d, 0.0) for d, prob in f_tilde.pmf.items())


def early_fraction(mu: MeanFieldStrategy | Mapping[int, float], f: DegreeDistribution) -> float:
    values = _mu_values(mu)
    return math.fsum(prob * values.get(d, 0.0) for d, prob in f.pmf.items())


def informational_efficiency(mu: MeanFieldStrategy | Mapping[int, float], f: DegreeDistribution) -> float:
    """Information generated per unit mass of early adopters, `alpha / beta`."""
    beta = early_fraction(mu, f)
    if beta <= 0.0:
        msg = "Informational efficiency is undefined when nobody adopts early"
        raise UndefinedEfficiencyError(msg)
    return informational_access(mu, edge_perspective(f)) / beta


def referral_regime(
    params: GameParams, policy: PricingPolicy, f: DegreeDistribution, config: SolverConfig | None = None
) -> ReferralRegime:
    if policy.eta == 0.0:
        return "lower_threshold"
    if policy.eta > params.A1H - policy.P1:
        return "upper_threshold"
    eq = solve_equilibrium(params, policy, f, config)
    if eq.d_L == 0:
        return "upper_threshold"
    if eq.d_U == INFINITE_DEGREE:
        return "lower_threshold"
    return "double_threshold"


def equilibrium_table(eq: MeanFieldEquilibrium) -> pd.DataFrame:
    degrees = sorted(eq.mu)
    return pd.DataFrame(
        {
            "degree": degrees,
            "mu": [eq.mu[d] for d in degrees],
            "delta_payoff": [eq.delta_payoffs.get(d, math.nan) for d in degrees],
        }
    )
