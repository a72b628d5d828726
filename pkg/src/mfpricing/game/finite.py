"""Exact Nash analysis of the two-period game on small complete and star networks.

Used as an independent check of the mean-field solver: the symmetric mixed
equilibrium of the complete network on `n` agents obeys the same indifference
condition as the mean-field game on the `(n - 1)`-regular distribution.
"""

from __future__ import annotations

import itertools
import math
from typing import Literal

import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.optimize import brentq

from mfpricing.exceptions import EnumerationBoundError
from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.game.payoffs import delta_payoff
from mfpricing.utils.log import get_logger

__all__ = [
    "ENUMERATION_BOUNDS",
    "FiniteProfile",
    "StarMixing",
    "SymmetricMixing",
    "Topology",
    "enumerate_pure_nash",
    "finite_payoffs",
    "finite_table",
    "is_pure_nash",
    "star_mixed_equilibrium",
    "symmetric_mixed_complete",
]

_logger = get_logger("mfpricing.finite", emoji="🎲")

Topology = Literal["complete", "star"]

ENUMERATION_BOUNDS: dict[str, int] = {"complete": 20, "star": 12}
NASH_TOL = 1e-9
ROOT_XTOL = 1e-14


class FiniteProfile(BaseModel):
    """Pure action profile. On the star, the last agent is the center."""

    topology: Topology
    n: int
    adopt_early: tuple[bool, ...]
    multiplicity: int = 1
    """Number of profiles this one stands for. On the complete network all
    profiles with the same number of early adopters are equivalent.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _check_shape(self) -> FiniteProfile:
        if self.n < 2:
            msg = f"Finite game needs at least two agents, got {self.n}"
            raise ValueError(msg)
        if len(self.adopt_early) != self.n:
            msg = f"Profile has {len(self.adopt_early)} actions for {self.n} agents"
            raise ValueError(msg)
        return self

    @property
    def adopters(self) -> int:
        return sum(self.adopt_early)

    @property
    def label(self) -> str:
        return "".join("1" if a else "0" for a in self.adopt_early)

    def expand(self) -> list[tuple[bool, ...]]:
        """All concrete profiles represented by this one."""
        if self.topology == "star":
            return [self.adopt_early]
        profiles = []
        for chosen in itertools.combinations(range(self.n), self.adopters):
            profiles.append(tuple(i in chosen for i in range(self.n)))
        return profiles


class SymmetricMixing(BaseModel):
    omega: float
    """Probability with which every agent adopts early."""
    corner: bool
    """True if no interior indifference exists and `omega` is 0 or 1."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class StarMixing(BaseModel):
    omega_center: float
    omega_periphery: float

    model_config = ConfigDict(extra="forbid", frozen=True)


def _check_bound(topology: Topology, n: int) -> None:
    if n < 2:
        msg = f"Finite game needs at least two agents, got {n}"
        raise EnumerationBoundError(msg)
    bound = ENUMERATION_BOUNDS[topology]
    if n > bound:
        msg = f"{topology} network with {n} agents exceeds the enumeration bound {bound}"
        raise EnumerationBoundError(msg)


def _neighbors(topology: Topology, n: int, i: int) -> list[int]:
    if topology == "complete":
        return [j for j in range(n) if j != i]
    center = n - 1
    return list(range(n - 1)) if i == center else [center]


def _agent_payoff(
    params: GameParams, policy: PricingPolicy, topology: Topology, profile: tuple[bool, ...], i: int
) -> float:
    neighbors = _neighbors(topology, len(profile), i)
    viable = policy.late_adoption_viable(params)
    if profile[i]:
        payoff = params.A_bar - policy.P0
        if viable and policy.eta > 0:
            # every deferring neighbor of an adopter is informed and adopts late under high quality
            referrals = sum(1 for j in neighbors if not profile[j])
            if policy.referral_cap is not None:
                referrals = min(referrals, policy.referral_cap)
            payoff += params.p * policy.eta * referrals
        return payoff
    informed = any(profile[j] for j in neighbors)
    return params.p * max(params.A1H - policy.P1, 0.0) if informed else 0.0


def finite_payoffs(
    topology: Topology, n: int, params: GameParams, policy: PricingPolicy, profile: tuple[bool, ...]
) -> tuple[float, ...]:
    """Expected payoff of every agent, in expectation over the quality only."""
    if len(profile) != n:
        msg = f"Profile has {len(profile)} actions for {n} agents"
        raise ValueError(msg)
    return tuple(_agent_payoff(params, policy, topology, profile, i) for i in range(n))


def is_pure_nash(
    topology: Topology, n: int, params: GameParams, policy: PricingPolicy, profile: tuple[bool, ...]
) -> bool:
    payoffs = finite_payoffs(topology, n, params, policy, profile)
    for i in range(n):
        deviation = profile[:i] + (not profile[i],) + profile[i + 1 :]
        if _agent_payoff(params, policy, topology, deviation, i) > payoffs[i] + NASH_TOL:
            return False
    return True


def _candidate_profiles(topology: Topology, n: int) -> list[FiniteProfile]:
    if topology == "complete":
        return [
            FiniteProfile(
                topology=topology,
                n=n,
                adopt_early=tuple(i < k for i in range(n)),
                multiplicity=math.comb(n, k),
            )
            for k in range(n + 1)
        ]
    return [
        FiniteProfile(topology=topology, n=n, adopt_early=actions)
        for actions in itertools.product((False, True), repeat=n)
    ]


def enumerate_pure_nash(
    topology: Topology, n: int, params: GameParams, policy: PricingPolicy
) -> list[FiniteProfile]:
    """All pure Nash profiles. On the complete network one representative per
    number of early adopters, with the adopters listed first.
    """
    _check_bound(topology, n)
    found = [
        profile
        for profile in _candidate_profiles(topology, n)
        if is_pure_nash(topology, n, params, policy, profile.adopt_early)
    ]
    _logger.debug("%s network, n=%d: %d pure Nash profiles", topology, n, len(found))
    return found


def finite_table(topology: Topology, n: int, params: GameParams, policy: PricingPolicy) -> pd.DataFrame:
    """Every candidate profile with its Nash flag and payoff vector.

    On the complete network each row stands for all profiles with the same number
    of early adopters; their counts are in `frame.attrs["multiplicity"]`.
    """
    _check_bound(topology, n)
    rows = []
    profiles = _candidate_profiles(topology, n)
    for profile in profiles:
        payoffs = finite_payoffs(topology, n, params, policy, profile.adopt_early)
        rows.append(
            {
                "topology": topology,
                "n": n,
                "profile": profile.label,
                "is_nash": is_pure_nash(topology, n, params, policy, profile.adopt_early),
                "payoff_vector": ";".join(f"{v:.17g}" for v in payoffs),
            }
        )
    frame = pd.DataFrame(rows)
    frame.attrs["multiplicity"] = [profile.multiplicity for profile in profiles]
    return frame


def _decreasing_root(h, lo: float = 0.0, hi: float = 1.0) -> float:
    return float(brentq(h, lo, hi, xtol=ROOT_XTOL))


def symmetric_mixed_complete(n: int, params: GameParams, policy: PricingPolicy) -> SymmetricMixing:
    """Symmetric mixed equilibrium of the complete network on `n` agents.

    Every agent is indifferent when the adoption gain against `n - 1` neighbors
    who each adopt with probability `omega` vanishes.
    """
    _check_bound("complete", n)

    def h(omega: float) -> float:
        return delta_payoff(params, policy, omega, n - 1)

    if h(0.0) <= 0.0:
        return SymmetricMixing(omega=0.0, corner=True)
    if h(1.0) >= 0.0:
        return SymmetricMixing(omega=1.0, corner=True)
    return SymmetricMixing(omega=_decreasing_root(h), corner=False)


def star_mixed_equilibrium(n: int, params: GameParams, policy: PricingPolicy) -> StarMixing | None:
    """Interior mixed equilibrium of the star in which the center adopts with
    `omega_center` and every peripheral agent with `omega_periphery`, or None.
    """
    _check_bound("star", n)
    surplus = max(params.A1H - policy.P1, 0.0)
    referral = params.p * policy.eta if policy.late_adoption_viable(params) else 0.0
    denominator = params.p * surplus + referral
    if denominator <= 0.0:
        return None
    # a peripheral agent is indifferent: Ā - P0 + pη(1 - ω) = p·u·ω
    omega_center = (params.A_bar - policy.P0 + referral) / denominator
    if not 0.0 < omega_center < 1.0:
        return None

    def h(omega: float) -> float:
        return delta_payoff(params, policy, omega, n - 1)

    if not h(0.0) > 0.0 > h(1.0):
        return None
    omega_periphery = _decreasing_root(h)
    if not 0.0 < omega_periphery < 1.0:
        return None
    return StarMixing(omega_center=omega_center, omega_periphery=omega_periphery)
