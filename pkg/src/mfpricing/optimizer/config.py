from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mfpricing.game.abstract import SolverConfig
from mfpricing.optimizer.abstract import AbstractOptimizer
from mfpricing.pricing.patterns import PatternSearchConfig


class TwoPriceOptimizerConfig(BaseModel):
    """Configuration for optimizing over policies without referral payments."""

    monopolist_informed: bool = True
    """If False, the late revenue only counts when quality turns out high."""
    search: PatternSearchConfig = PatternSearchConfig()
    solver: SolverConfig = SolverConfig()

    type: Literal["two_price"] = "two_price"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    def get_optimizer(self) -> AbstractOptimizer:
        from mfpricing.optimizer.two_price import TwoPriceOptimizer

        return TwoPriceOptimizer.from_config(self)


class ReferralOptimizerConfig(BaseModel):
    """Configuration for optimizing over a single price and a referral payment."""

    monopolist_informed: bool = True
    price_grid_size: int = 400
    """Number of prices on the grid over [0, A1H]."""
    alpha_grid_size: int = 400
    """Number of interior informational access values scanned per price."""
    price_tol: float = 1e-6
    """Tolerance of the refinement around the best grid price."""
    alpha_tol: float = 1e-10
    """Tolerance of the refinement of the informational access."""
    search: PatternSearchConfig = PatternSearchConfig()
    solver: SolverConfig = SolverConfig()

    type: Literal["referral"] = "referral"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _check_grid(self):
        if self.price_grid_size < 2 or self.alpha_grid_size < 2:
            msg = "Grids need at least two points"
            raise ValueError(msg)
        return self

    def get_optimizer(self) -> AbstractOptimizer:
        from mfpricing.optimizer.referral import ReferralOptimizer

        return ReferralOptimizer.from_config(self)


class CappedReferralOptimizerConfig(ReferralOptimizerConfig):
    """Referral optimization where each early adopter is paid for at most `cap` referrals."""

    cap: int
    """Maximum number of paid referrals per early adopter."""

    type: Literal["capped_referral"] = "capped_referral"  # type: ignore[assignment]
    """Discriminator for (de)serialization/CLI. Do not change."""

    @model_validator(mode="after")
    def _check_cap(self):
        if self.cap < 1:
            msg = f"Referral cap must be at least 1, got {self.cap}"
            raise ValueError(msg)
        return self

    def get_optimizer(self) -> AbstractOptimizer:
        from mfpricing.optimizer.referral import CappedReferralOptimizer

        return CappedReferralOptimizer.from_config(self)


class FullOptimizerConfig(BaseModel):
    """Configuration for optimizing over unrestricted policies (P0, P1, η)."""

    monopolist_informed: bool = True
    price_grid_size: int = 400
    """Grid size of the referral search that seeds the candidates."""
    alpha_grid_size: int = 400
    search: PatternSearchConfig = PatternSearchConfig()
    solver: SolverConfig = SolverConfig()

    type: Literal["full"] = "full"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    def get_optimizer(self) -> AbstractOptimizer:
        from mfpricing.optimizer.full import FullOptimizer

        return FullOptimizer.from_config(self)


OptimizerConfig = Annotated[
    TwoPriceOptimizerConfig | ReferralOptimizerConfig | CappedReferralOptimizerConfig | FullOptimizerConfig,
    Field(discriminator="type"),
]
"""Union of all optimizer configurations. Useful for type hints."""


def get_optimizer(config: OptimizerConfig) -> AbstractOptimizer:
    return config.get_optimizer()
