"""Search over double-threshold adoption patterns.

A pattern on a support of `k` degrees (ascending) is described by two cut indices
`lower <= upper`: degrees below `lower` adopt early, degrees in `[lower, upper)`
defer and degrees from `upper` on adopt early. At most one degree at the boundary
of the deferring block mixes. The value of a pattern is
`early_value * beta + late_value * gamma`.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.optimize import minimize_scalar
from typing_extensions import Self

from mfpricing.network.degree_dist import DegreeDistribution, edge_perspective
from mfpricing.utils.log import get_logger

__all__ = ["AdoptionPattern", "PatternSearchConfig", "SupportArrays", "search_patterns"]

_logger = get_logger("mfpricing.patterns", emoji="🧩")

MixingSide = Literal["lower", "upper"]


class PatternSearchConfig(BaseModel):
    mixing_grid_size: int = 10001
    """Number of mixing weights tried per segment (step 1e-4)."""
    refine_tol: float = 1e-10
    """Tolerance of the bounded scalar refinement of the best mixing weight."""
    exhaustive_support_size: int = 24
    """Up to this many support degrees, every mixing segment is scanned."""
    refine_top: int = 8
    """On larger supports, only segments next to this many best pure patterns are scanned."""
    tie_tol: float = 1e-7
    """Payoff gains within this tolerance count as ties when resolving the limit."""
    max_tied_degrees: int = 8
    """Above this many tied degrees the solver's strategy is used as is."""

    model_config = ConfigDict(extra="forbid")


class SupportArrays(BaseModel):
    """Degree support of a distribution as aligned numpy arrays."""

    degrees: np.ndarray
    f: np.ndarray
    f_tilde: np.ndarray

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @classmethod
    def from_distribution(cls, f: DegreeDistribution) -> Self:
        f_tilde = edge_perspective(f)
        return cls(
            degrees=f.degrees.astype(float),
            f=f.probabilities,
            f_tilde=np.array([f_tilde.pmf[d] for d in f.pmf]),
        )

    @property
    def size(self) -> int:
        return len(self.degrees)

    def informed(self, alpha: np.ndarray | float) -> np.ndarray:
        """Probability of at least one early-adopting neighbor, one row per `alpha`."""
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        return 1.0 - np.power(1.0 - alpha[:, None], self.degrees[None, :])

    def head(self, weights: np.ndarray) -> np.ndarray:
        """`head[i]` is the mass of the first `i` degrees."""
        return np.concatenate([[0.0], np.cumsum(weights)])

    def tail(self, weights: np.ndarray) -> np.ndarray:
        """`tail[i]` is the mass of degrees `i..k-1`."""
        return np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])


class AdoptionPattern(BaseModel):
    lower: int
    upper: int
    mixing_index: int | None = None
    mixing_weight: float | None = None
    alpha: float
    beta: float
    gamma: float
    value: float

    model_config = ConfigDict(extra="forbid", frozen=True)

    def mu(self, arrays: SupportArrays) -> np.ndarray:
        mu = np.ones(arrays.size)
        mu[self.lower : self.upper] = 0.0
        if self.mixing_index is not None:
            mu[self.mixing_index] = self.mixing_weight
        return mu

    def strategy(self, arrays: SupportArrays) -> dict[int, float]:
        return {int(d): float(v) for d, v in zip(arrays.degrees, self.mu(arrays))}


def _pure_values(
    arrays: SupportArrays, early_value: float, late_value: float, upper_block: bool
) -> list[AdoptionPattern]:
    k = arrays.size
    ft_head, ft_tail = arrays.head(arrays.f_tilde), arrays.tail(arrays.f_tilde)
    f_head, f_tail = arrays.head(arrays.f), arrays.tail(arrays.f)
    patterns = []
    for lower in range(k + 1):
        uppers = np.arange(lower, k + 1) if upper_block else np.array([k])
        alpha = ft_head[lower] + ft_tail[uppers]
        beta = f_head[lower] + f_tail[uppers]
        late = arrays.f[None, :] * arrays.informed(alpha)
        cumulative = np.concatenate([np.zeros((len(uppers), 1)), np.cumsum(late, axis=1)], axis=1)
        gamma = cumulative[np.arange(len(uppers)), uppers] - cumulative[:, lower]
        value = early_value * beta + late_value * gamma
        for i, upper in enumerate(uppers):
            patterns.append(
                AdoptionPattern(
                    lower=lower,
                    upper=int(upper),
                    alpha=float(alpha[i]),
                    beta=float(beta[i]),
                    gamma=float(gamma[i]),
                    value=float(value[i]),
                )
            )
    return patterns


def _segment(
    arrays: SupportArrays,
    lower: int,
    upper: int,
    side: MixingSide,
    weights: np.ndarray,
    early_value: float,
    late_value: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, int]:
    """Pattern `(lower, upper)` with one boundary degree of the deferring block mixing."""
    ft_head, ft_tail = arrays.head(arrays.f_tilde), arrays.tail(arrays.f_tilde)
    f_head, f_tail = arrays.head(arrays.f), arrays.tail(arrays.f)
    if side == "lower":
        m = lower
        deferring = np.arange(lower + 1, upper)
    else:
        m = upper - 1
        deferring = np.arange(lower, upper - 1)
    alpha = ft_head[lower] + ft_tail[upper] + weights * arrays.f_tilde[m]
    beta = f_head[lower] + f_tail[upper] + weights * arrays.f[m]
    informed = arrays.informed(alpha)
    gamma = informed[:, deferring] @ arrays.f[deferring] + (1.0 - weights) * arrays.f[m] * informed[:, m]
    return alpha, beta, gamma, early_value * beta + late_value * gamma, m


def _segments(k: int, upper_block: bool) -> list[tuple[int, int, MixingSide]]:
    if not upper_block:
        return [(lower, k, "lower") for lower in range(k)]
    segments: list[tuple[int, int, MixingSide]] = []
    for lower in range(k):
        for upper in range(lower + 1, k + 1):
            segments.append((lower, upper, "lower"))
            if upper - 1 > lower:
                segments.append((lower, upper, "upper"))
    return segments


def _adjacent_segments(pattern: AdoptionPattern, k: int, upper_block: bool) -> list[tuple[int, int, MixingSide]]:
    lower, upper = pattern.lower, pattern.upper
    segments: list[tuple[int, int, MixingSide]] = []
    for a in (lower - 1, lower):
        if 0 <= a < upper:
            segments.append((a, upper, "lower"))
    if upper_block:
        for b in (upper, upper + 1):
            if lower < b - 1 and b <= k:
                segments.append((lower, b, "upper"))
    return segments


def search_patterns(
    arrays: SupportArrays,
    early_value: float,
    late_value: float,
    *,
    upper_block: bool = True,
    config: PatternSearchConfig | None = None,
) -> tuple[AdoptionPattern, list[AdoptionPattern]]:
    """Best pattern and the best pattern found per scanned segment.

    With `upper_block=False` only lower-threshold patterns are searched.
    """
    config = config or PatternSearchConfig()
    k = arrays.size
    weights = np.linspace(0.0, 1.0, config.mixing_grid_size)
    if k <= config.exhaustive_support_size:
        segments = _segments(k, upper_block)
    else:
        pure = sorted(_pure_values(arrays, early_value, late_value, upper_block), key=lambda p: -p.value)
        segments = []
        for pattern in pure[: config.refine_top]:
            for segment in _adjacent_segments(pattern, k, upper_block):
                if segment not in segments:
                    segments.append(segment)
        _logger.debug("Scanning %d of %d segments", len(segments), len(_segments(k, upper_block)))

    trace = []
    for lower, upper, side in segments:
        alpha, beta, gamma, value, m = _segment(arrays, lower, upper, side, weights, early_value, late_value)
        i = int(np.argmax(value))
        trace.append(
            AdoptionPattern(
                lower=lower,
                upper=upper,
                mixing_index=m,
                mixing_weight=float(weights[i]),
                alpha=float(alpha[i]),
                beta=float(beta[i]),
                gamma=float(gamma[i]),
                value=float(value[i]),
            )
        )
    best = max(trace, key=lambda p: p.value)
    return _refine(arrays, best, early_value, late_value, weights[1] - weights[0], config), trace


def _refine(
    arrays: SupportArrays,
    pattern: AdoptionPattern,
    early_value: float,
    late_value: float,
    step: float,
    config: PatternSearchConfig,
) -> AdoptionPattern:
    side: MixingSide = "lower" if pattern.mixing_index == pattern.lower else "upper"

    def evaluate(w: float):
        return _segment(arrays, pattern.lower, pattern.upper, side, np.array([w]), early_value, late_value)

    lo = max(pattern.mixing_weight - step, 0.0)
    hi = min(pattern.mixing_weight + step, 1.0)
    result = minimize_scalar(
        lambda w: -evaluate(w)[3][0], bounds=(lo, hi), method="bounded", options={"xatol": config.refine_tol}
    )
    if -result.fun <= pattern.value:
        return pattern
    alpha, beta, gamma, value, m = evaluate(float(result.x))
    return AdoptionPattern(
        lower=pattern.lower,
        upper=pattern.upper,
        mixing_index=m,
        mixing_weight=float(result.x),
        alpha=float(alpha[0]),
        beta=float(beta[0]),
        gamma=float(gamma[0]),
        value=float(value[0]),
    )
