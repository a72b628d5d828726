import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, model_validator

__all__ = [
    "INFINITE_DEGREE",
    "AssumptionReport",
    "BestResponse",
    "GameParams",
    "MeanFieldEquilibrium",
    "MeanFieldStrategy",
    "PolicyClass",
    "PricingPolicy",
    "ReferralRegime",
    "SolverConfig",
]

INFINITE_DEGREE = math.inf
"""Sentinel for a threshold beyond every degree."""

BestResponse = Literal["adopt", "defer", "indifferent"]

PolicyClass = Literal["two_price", "referral", "full"]
"""`two_price` fixes η = 0, `referral` ties P0 = P1, `full` is unrestricted."""

ReferralRegime = Literal["lower_threshold", "double_threshold", "upper_threshold"]


class AssumptionReport(BaseModel):
    """The quantities behind the three payoff assumptions. All must be negative."""

    late_low_quality_value: float
    """p·A1H + (1-p)·A1L: adopting late without information is unprofitable."""
    early_minus_late_value: float
    """Ā - p·A1H: waiting for information beats experimenting."""
    early_low_quality_value: float
    """p·A0H + (1-p)·A0L: first-period use alone is unprofitable."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @property
    def violations(self) -> list[str]:
        return [name for name, value in self.model_dump().items() if not value < 0]

    def __bool__(self) -> bool:
        return not self.violations


class GameParams(BaseModel):
    """Payoff constants of the adoption game."""

    A0H: float = 10.0
    """Value of first-period use if quality is high."""
    A1H: float = 20.0
    """Value of second-period use if quality is high."""
    A0L: float = -10.0
    """Value of first-period use if quality is low."""
    A1L: float = -20.0
    """Value of second-period use if quality is low."""
    p: float = 0.4
    """Prior probability that quality is high."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _check_assumptions(self) -> "GameParams":
        if not (self.A0H > 0 and self.A1H > 0 and self.A0L < 0 and self.A1L < 0):
            msg = "Payoffs must satisfy A0H > 0, A1H > 0, A0L < 0, A1L < 0"
            raise ValueError(msg)
        if not 0.0 < self.p < 1.0:
            msg = f"Prior p must lie strictly between 0 and 1, got {self.p}"
            raise ValueError(msg)
        report = self.assumptions()
        if not report:
            violated = ", ".join(report.violations)
            msg = f"Payoff assumptions violated: {violated} must be negative ({report.model_dump()})"
            raise ValueError(msg)
        return self

    @property
    def A_bar(self) -> float:
        """Expected value of adopting early: p(A0H + A1H) + (1-p)A0L."""
        return self.p * (self.A0H + self.A1H) + (1.0 - self.p) * self.A0L

    def assumptions(self) -> AssumptionReport:
        return AssumptionReport(
            late_low_quality_value=self.p * self.A1H + (1.0 - self.p) * self.A1L,
            early_minus_late_value=self.A_bar - self.p * self.A1H,
            early_low_quality_value=self.p * self.A0H + (1.0 - self.p) * self.A0L,
        )

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.A0H, self.A1H, self.A0L, self.A1L, self.p)


class PricingPolicy(BaseModel):
    """Dynamic pricing policy (P0, P1, η)."""

    P0: float
    """First-period price. May be negative (a subsidy)."""
    P1: float
    """Second-period price."""
    eta: float = 0.0
    """Referral payment per neighbor who adopts in the second period."""
    referral_cap: int | None = None
    """Maximum number of paid referrals per early adopter. None means linear referrals."""
    monopolist_informed: bool = True
    """If False, the monopolist does not know the quality and maximizes expected profit."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _check_policy(self) -> "PricingPolicy":
        if not self.P1 >= 0:
            msg = f"Second-period price P1 must be nonnegative, got {self.P1}"
            raise ValueError(msg)
        if not self.eta >= 0:
            msg = f"Referral payment eta must be nonnegative, got {self.eta}"
            raise ValueError(msg)
        if self.referral_cap is not None and self.referral_cap < 1:
            msg = f"Referral cap must be at least 1, got {self.referral_cap}"
            raise ValueError(msg)
        return self

    def belongs_to(self, policy_class: PolicyClass) -> bool:
        if policy_class == "two_price":
            return self.eta == 0.0
        if policy_class == "referral":
            return self.P0 == self.P1
        return True

    def late_adoption_viable(self, params: GameParams) -> bool:
        """Informed deferrers adopt in the second period only if P1 ≤ A1H."""
        return self.P1 <= params.A1H


class SolverConfig(BaseModel):
    """Numerical settings of the mean-field equilibrium solver."""

    alpha_tol: float = 1e-10
    """Width of the final bisection bracket on the informational access."""
    max_iter: int = 200
    """Maximum number of bisection steps."""
    indifference_tol: float = 1e-9
    """Payoff differences within this tolerance count as indifference."""

    model_config = ConfigDict(extra="forbid")


class MeanFieldStrategy(BaseModel):
    """Adoption probability by degree."""

    mu: dict[int, float]

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _check_probabilities(self) -> "MeanFieldStrategy":
        for d, value in self.mu.items():
            if not 0.0 <= value <= 1.0:
                msg = f"Adoption probability at degree {d} must lie in [0, 1], got {value}"
                raise ValueError(msg)
        return self

    @classmethod
    def constant(cls, degrees, value: float) -> "MeanFieldStrategy":
        return cls(mu={int(d): float(value) for d in degrees})


class MeanFieldEquilibrium(BaseModel):
    """Solved mean-field equilibrium at a given policy."""

    strategy: MeanFieldStrategy
    alpha_star: float
    """Informational access: probability that a random neighbor adopts early."""
    d_L: int | float
    """Lower threshold. 0 if no low-degree block adopts; `inf` for full adoption."""
    d_U: int | float
    """Upper threshold. `inf` if no high-degree block adopts."""
    mixing_degrees: tuple[int, ...] = ()
    """Degrees with an interior adoption probability."""
    delta_payoffs: dict[int, float] = {}
    """Payoff gain of adopting early over deferring, by degree, at `alpha_star`."""
    iterations: int = 0
    """Number of bisection steps used."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @property
    def mu(self) -> dict[int, float]:
        return self.strategy.mu

    @property
    def is_corner(self) -> bool:
        return self.alpha_star in (0.0, 1.0)
