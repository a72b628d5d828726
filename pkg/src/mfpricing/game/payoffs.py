"""Adopt-early and defer payoffs of a single agent facing informational access `alpha`."""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import binom

from mfpricing.game.abstract import BestResponse, GameParams, PricingPolicy

__all__ = [
    "best_response",
    "delta_payoff",
    "delta_payoffs",
    "delta_payoffs_slope",
    "expected_referrals",
    "expected_referrals_array",
    "expected_referrals_grid",
    "expected_referrals_slope",
    "payoff_adopt",
    "payoff_defer",
]

EXACT_BINOMIAL_MAX_DEGREE = 64


def _capped_binomial_mean(d: int, q: float, cap: int) -> float:
    """E[min(Bin(d, q), cap)]."""
    if cap >= d:
        return d * q
    if q <= 0.0:
        return 0.0
    if q >= 1.0:
        return float(cap)
    if d <= EXACT_BINOMIAL_MAX_DEGREE:
        return math.fsum(min(k, cap) * math.comb(d, k) * q**k * (1.0 - q) ** (d - k) for k in range(1, d + 1))
    # E[min(X, c)] = sum_{j < c} P(X > j)
    return float(np.sum(binom.sf(np.arange(cap), d, q)))


def expected_referrals(d: int, alpha: float, cap: int | None = None) -> float:
    """Expected number of neighbors of an early adopter that adopt late when quality is high.

    Each neighbor defers with probability `1 - alpha`. With a cap, at most `cap`
    of them are paid for.
    """
    q = 1.0 - alpha
    if cap is None:
        return q * d
    return _capped_binomial_mean(int(d), q, cap)


def expected_referrals_array(degrees: np.ndarray, alpha: float, cap: int | None = None) -> np.ndarray:
    degrees = np.asarray(degrees)
    if cap is None:
        return (1.0 - alpha) * degrees.astype(float)
    return np.array([_capped_binomial_mean(int(d), 1.0 - alpha, cap) for d in degrees], dtype=float)


def expected_referrals_grid(degrees: np.ndarray, alphas: np.ndarray, cap: int | None = None) -> np.ndarray:
    """`expected_referrals` with one row per access in `alphas` and one column per degree."""
    degrees = np.asarray(degrees, dtype=float)
    q = 1.0 - np.asarray(alphas, dtype=float)[:, None]
    linear = q * degrees[None, :]
    if cap is None or cap >= degrees.max():
        return linear
    tails = binom.sf(np.arange(cap)[:, None, None], degrees[None, None, :], q[None, :, :])
    return np.where(degrees[None, :] <= cap, linear, tails.sum(axis=0))


def expected_referrals_slope(degrees: np.ndarray, alpha: float, cap: int | None = None) -> np.ndarray:
    """Derivative of `expected_referrals` in `alpha`."""
    degrees = np.asarray(degrees, dtype=float)
    if cap is None:
        return -degrees
    return -degrees * binom.cdf(cap - 1, degrees - 1, 1.0 - alpha)


def _late_surplus(params: GameParams, policy: PricingPolicy) -> float:
    """Surplus of an informed late adopter. Zero when late adoption is not viable."""
    return max(params.A1H - policy.P1, 0.0)


def payoff_adopt(params: GameParams, policy: PricingPolicy, alpha: float, d: int) -> float:
    value = params.A_bar - policy.P0
    if policy.eta > 0 and policy.late_adoption_viable(params):
        value += policy.eta * params.p * expected_referrals(d, alpha, policy.referral_cap)
    return value


def payoff_defer(params: GameParams, policy: PricingPolicy, alpha: float, d: int) -> float:
    informed = 1.0 - (1.0 - alpha) ** d
    return params.p * _late_surplus(params, policy) * informed


def delta_payoff(params: GameParams, policy: PricingPolicy, alpha: float, d: int) -> float:
    """Gain of adopting early over deferring."""
    return payoff_adopt(params, policy, alpha, d) - payoff_defer(params, policy, alpha, d)


def delta_payoffs(params: GameParams, policy: PricingPolicy, alpha: float, degrees: np.ndarray) -> np.ndarray:
    """`delta_payoff` for every degree in `degrees` at once."""
    degrees = np.asarray(degrees)
    informed = 1.0 - (1.0 - alpha) ** degrees.astype(float)
    value = params.A_bar - policy.P0 - params.p * _late_surplus(params, policy) * informed
    if policy.eta > 0 and policy.late_adoption_viable(params):
        value = value + policy.eta * params.p * expected_referrals_array(degrees, alpha, policy.referral_cap)
    return value


def delta_payoffs_slope(params: GameParams, policy: PricingPolicy, alpha: float, degrees: np.ndarray) -> np.ndarray:
    """Derivative of `delta_payoffs` in `alpha`."""
    degrees = np.asarray(degrees, dtype=float)
    slope = -params.p * _late_surplus(params, policy) * degrees * (1.0 - alpha) ** (degrees - 1.0)
    if policy.eta > 0 and policy.late_adoption_viable(params):
        slope = slope + policy.eta * params.p * expected_referrals_slope(degrees, alpha, policy.referral_cap)
    return slope


def best_response(
    params: GameParams, policy: PricingPolicy, alpha: float, d: int, *, tol: float = 1e-9
) -> BestResponse:
    delta = delta_payoff(params, policy, alpha, d)
    if delta > tol:
        return "adopt"
    if delta < -tol:
        return "defer"
    return "indifferent"
