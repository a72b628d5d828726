"""Degree distributions over degrees 1..d_max and their edge-perspective counterparts."""

from __future__ import annotations

import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from mfpricing.exceptions import InvalidDistributionError

__all__ = [
    "DegreeDistribution",
    "EdgePerspectiveDistribution",
    "edge_perspective",
    "fosd_dominates",
    "jackson_rogers_cdf",
    "make_custom",
    "make_jackson_rogers",
    "make_regular",
    "make_two_degree",
    "moments",
]

SUM_TOL = 1e-12
FOSD_TOL = 1e-12


class _Pmf(BaseModel):
    pmf: dict[int, float]
    """Probability by degree. Stored in ascending degree order."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    @field_validator("pmf", mode="after")
    @classmethod
    def _sorted(cls, pmf: dict[int, float]) -> dict[int, float]:
        return {d: float(pmf[d]) for d in sorted(pmf)}

    @property
    def degrees(self) -> np.ndarray:
        return np.fromiter(self.pmf.keys(), dtype=np.int64, count=len(self.pmf))

    @property
    def probabilities(self) -> np.ndarray:
        return np.fromiter(self.pmf.values(), dtype=float, count=len(self.pmf))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.pmf)

    def cdf(self, x: float) -> float:
        return math.fsum(prob for d, prob in self.pmf.items() if d <= x)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"degree": self.degrees, "probability": self.probabilities})


class DegreeDistribution(_Pmf):
    """Probability mass `f(d)` over degrees `1..d_max`.

    Degrees with exactly zero mass are dropped, so `support` only lists
    reachable degrees.
    """

    d_max: int
    """Largest degree the distribution may put mass on."""

    @field_validator("pmf", mode="after")
    @classmethod
    def _drop_zero_mass(cls, pmf: dict[int, float]) -> dict[int, float]:
        return {d: prob for d, prob in pmf.items() if prob != 0.0}

    @model_validator(mode="after")
    def _check_pmf(self) -> DegreeDistribution:
        if self.d_max < 1:
            msg = f"d_max must be at least 1, got {self.d_max}"
            raise ValueError(msg)
        if not self.pmf:
            msg = "Degree distribution has empty support"
            raise ValueError(msg)
        for d, prob in self.pmf.items():
            if d < 1:
                msg = f"No mass allowed at degree {d}: agents without neighbors are excluded"
                raise ValueError(msg)
            if d > self.d_max:
                msg = f"Degree {d} lies outside the support bound d_max={self.d_max}"
                raise ValueError(msg)
            if prob < 0 or not math.isfinite(prob):
                msg = f"Probability at degree {d} must be nonnegative and finite, got {prob}"
                raise ValueError(msg)
        total = math.fsum(self.pmf.values())
        if abs(total - 1.0) > SUM_TOL:
            msg = f"Probabilities must sum to 1 within {SUM_TOL}, got {total!r}"
            raise ValueError(msg)
        return self

    @property
    def mean_degree(self) -> float:
        return math.fsum(d * prob for d, prob in self.pmf.items())


class EdgePerspectiveDistribution(_Pmf):
    """Degree distribution of a random neighbor, `f̃(d) ∝ d·f(d)`."""

    @model_validator(mode="after")
    def _check_sum(self) -> EdgePerspectiveDistribution:
        total = math.fsum(self.pmf.values())
        if abs(total - 1.0) > SUM_TOL:
            msg = f"Edge-perspective probabilities must sum to 1 within {SUM_TOL}, got {total!r}"
            raise ValueError(msg)
        return self


def make_regular(d: int) -> DegreeDistribution:
    if d < 1:
        msg = f"Regular degree must be at least 1, got {d}"
        raise InvalidDistributionError(msg)
    return DegreeDistribution(pmf={d: 1.0}, d_max=d)


def make_two_degree(d_l: int, d_u: int, q: float) -> DegreeDistribution:
    """Mass `q` at `d_u` and `1 - q` at `d_l`."""
    if d_l < 1:
        msg = f"Lower degree must be at least 1, got {d_l}"
        raise InvalidDistributionError(msg)
    if d_l > d_u:
        msg = f"Lower degree {d_l} exceeds upper degree {d_u}"
        raise InvalidDistributionError(msg)
    if not 0.0 <= q <= 1.0:
        msg = f"Upper-degree mass q must lie in [0, 1], got {q}"
        raise InvalidDistributionError(msg)
    if d_l == d_u:
        return DegreeDistribution(pmf={d_l: 1.0}, d_max=d_u)
    return DegreeDistribution(pmf={d_l: 1.0 - q, d_u: q}, d_max=d_u)


def make_custom(pmf: dict[int, float], d_max: int | None = None) -> DegreeDistribution:
    if not pmf:
        msg = "Custom distribution needs at least one degree"
        raise InvalidDistributionError(msg)
    return DegreeDistribution(pmf=pmf, d_max=d_max if d_max is not None else max(pmf))


def jackson_rogers_cdf(d: np.ndarray | float, m: float, r: float) -> np.ndarray:
    """Untruncated CDF `F(d) = 1 - (rm / (d + rm))^(1 + r)`.

    `r = inf` is the exponential limit `F(d) = 1 - exp(-d / m)`.
    """
    d = np.asarray(d, dtype=float)
    if math.isinf(r):
        return -np.expm1(-d / m)
    return -np.expm1(-(1.0 + r) * np.log1p(d / (r * m)))


def make_jackson_rogers(m: float, r: float, d_max: int = 200) -> DegreeDistribution:
    """Jackson–Rogers degree distribution with mean degree `m` and mixing parameter `r`,
    truncated to `1..d_max` and renormalized over that support.
    """
    if not m > 0:
        msg = f"Mean degree m must be positive, got {m}"
        raise InvalidDistributionError(msg)
    if not r > 0:
        msg = f"Mixing parameter r must be positive, got {r}"
        raise InvalidDistributionError(msg)
    if d_max < 1:
        msg = f"d_max must be at least 1, got {d_max}"
        raise InvalidDistributionError(msg)
    cdf = jackson_rogers_cdf(np.arange(0, d_max + 1), m, r)
    mass = np.diff(cdf)
    total = math.fsum(mass)
    if not total > 0:
        msg = f"Jackson-Rogers distribution (m={m}, r={r}) has no mass on 1..{d_max}"
        raise InvalidDistributionError(msg)
    pmf = {d: float(prob) for d, prob in zip(range(1, d_max + 1), mass / total)}
    return DegreeDistribution(pmf=pmf, d_max=d_max)


def edge_perspective(f: DegreeDistribution) -> EdgePerspectiveDistribution:
    mean = math.fsum(d * prob for d, prob in f.pmf.items())
    return EdgePerspectiveDistribution(pmf={d: d * prob / mean for d, prob in f.pmf.items()})


def moments(f: DegreeDistribution) -> tuple[float, float]:
    """Mean and standard deviation of the degree."""
    mean = f.mean_degree
    variance = math.fsum(prob * (d - mean) ** 2 for d, prob in f.pmf.items())
    return mean, math.sqrt(variance)


def fosd_dominates(
    g: EdgePerspectiveDistribution | DegreeDistribution, h: EdgePerspectiveDistribution | DegreeDistribution
) -> bool:
    """True iff `g` first-order stochastically dominates `h` (weakly), i.e. the CDF of `g`
    lies below the CDF of `h` on the union of both supports.
    """
    points = sorted(set(g.pmf) | set(h.pmf))
    g_cdf = np.cumsum([g.pmf.get(d, 0.0) for d in points])
    h_cdf = np.cumsum([h.pmf.get(d, 0.0) for d in points])
    return bool(np.all(g_cdf <= h_cdf + FOSD_TOL))
