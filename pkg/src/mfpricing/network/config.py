import math
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field

from mfpricing.network.degree_dist import (
    DegreeDistribution,
    make_custom,
    make_jackson_rogers,
    make_regular,
    make_two_degree,
)


class RegularDistributionConfig(BaseModel):
    """Every agent has exactly `degree` neighbors."""

    degree: int
    """Common degree of all agents."""

    type: Literal["regular"] = "regular"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    def get_distribution(self) -> DegreeDistribution:
        return make_regular(self.degree)

    def label(self) -> str:
        return f"regular(d={self.degree})"


class TwoDegreeDistributionConfig(BaseModel):
    """Mass `q` at the upper degree, `1 - q` at the lower degree."""

    d_l: int
    """Lower degree."""
    d_u: int
    """Upper degree, at least `d_l`."""
    q: float
    """Probability mass at `d_u`."""

    type: Literal["two_degree"] = "two_degree"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    def get_distribution(self) -> DegreeDistribution:
        return make_two_degree(self.d_l, self.d_u, self.q)

    def label(self) -> str:
        return f"two_degree(d_l={self.d_l}, d_u={self.d_u}, q={self.q!r})"


class JacksonRogersDistributionConfig(BaseModel):
    """Jackson–Rogers distribution truncated to `1..d_max`."""

    m: float
    """Mean degree of the untruncated distribution."""
    r: float = 2.0
    """Ratio of random to network-based meetings. `inf` gives the exponential limit."""
    d_max: int = 200
    """Largest degree kept after truncation."""

    type: Literal["jackson_rogers"] = "jackson_rogers"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    def get_distribution(self) -> DegreeDistribution:
        return make_jackson_rogers(self.m, self.r, self.d_max)

    @property
    def analytic_mean(self) -> float:
        """Mean of the untruncated law, reported next to the truncated mean."""
        return self.m

    def label(self) -> str:
        r = "inf" if math.isinf(self.r) else repr(self.r)
        return f"jackson_rogers(m={self.m!r}, r={r}, d_max={self.d_max})"


class CustomDistributionConfig(BaseModel):
    """Explicit probability mass function."""

    pmf: dict[int, float]
    """Probability by degree."""
    d_max: int | None = None
    """Support bound. Defaults to the largest listed degree."""

    type: Literal["custom"] = "custom"
    """Discriminator for (de)serialization/CLI. Do not change."""

    model_config = ConfigDict(extra="forbid")

    def get_distribution(self) -> DegreeDistribution:
        return make_custom(self.pmf, self.d_max)

    def label(self) -> str:
        return "custom(" + ", ".join(f"{d}: {prob!r}" for d, prob in sorted(self.pmf.items())) + ")"


DistributionConfig = Annotated[
    RegularDistributionConfig
    | TwoDegreeDistributionConfig
    | JacksonRogersDistributionConfig
    | CustomDistributionConfig,
    Field(discriminator="type"),
]
"""Union of all distribution configurations. Useful for type hints."""


def get_distribution(config: DistributionConfig) -> DegreeDistribution:
    return config.get_distribution()
