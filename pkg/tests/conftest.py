import pytest

from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.network.degree_dist import (
    DegreeDistribution,
    make_custom,
    make_jackson_rogers,
    make_regular,
    make_two_degree,
)


@pytest.fixture
def params() -> GameParams:
    """A0H=10, A1H=20, A0L=-10, A1L=-20, p=0.4, hence Ā = 6."""
    return GameParams()


@pytest.fixture
def zero_policy() -> PricingPolicy:
    return PricingPolicy(P0=0.0, P1=0.0)


@pytest.fixture
def two_price_limit(params: GameParams) -> PricingPolicy:
    return PricingPolicy(P0=params.A_bar, P1=params.A1H)


@pytest.fixture
def regular1() -> DegreeDistribution:
    return make_regular(1)


@pytest.fixture
def regular5() -> DegreeDistribution:
    return make_regular(5)


@pytest.fixture
def two_degree() -> DegreeDistribution:
    return make_two_degree(6, 13, 0.1)


@pytest.fixture
def small_custom() -> DegreeDistribution:
    return make_custom({1: 0.5, 3: 0.3, 8: 0.2})


@pytest.fixture
def jackson_rogers7() -> DegreeDistribution:
    return make_jackson_rogers(7, 2, 200)
