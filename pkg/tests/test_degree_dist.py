import math

import numpy as np
import pytest
from pydantic import ValidationError

from mfpricing.exceptions import InvalidDistributionError
from mfpricing.network import get_distribution
from mfpricing.network.config import (
    CustomDistributionConfig,
    JacksonRogersDistributionConfig,
    RegularDistributionConfig,
    TwoDegreeDistributionConfig,
)
from mfpricing.network.degree_dist import (
    DegreeDistribution,
    edge_perspective,
    fosd_dominates,
    jackson_rogers_cdf,
    make_custom,
    make_jackson_rogers,
    make_regular,
    make_two_degree,
    moments,
)


def test_regular():
    f = make_regular(5)
    assert f.pmf == {5: 1.0}
    assert f.d_max == 5
    assert f.mean_degree == 5
    assert moments(f) == (5.0, 0.0)


@pytest.mark.parametrize("d", [0, -3])
def test_regular_rejects_nonpositive_degree(d: int):
    with pytest.raises(InvalidDistributionError):
        make_regular(d)


def test_two_degree_edge_perspective():
    f = make_two_degree(6, 13, 0.1)
    assert f.mean_degree == pytest.approx(6.7)
    f_tilde = edge_perspective(f)
    assert f_tilde.pmf[13] == pytest.approx(1.3 / 6.7)
    assert f_tilde.pmf[6] == pytest.approx(5.4 / 6.7)
    assert math.fsum(f_tilde.pmf.values()) == pytest.approx(1.0, abs=1e-12)


def test_two_degree_collapses_equal_degrees():
    assert make_two_degree(4, 4, 0.3).pmf == {4: 1.0}


def test_two_degree_drops_zero_mass():
    assert make_two_degree(2, 9, 0.0).support == (2,)


@pytest.mark.parametrize(
    ("d_l", "d_u", "q"),
    [(0, 5, 0.1), (7, 5, 0.1), (2, 5, 1.5), (2, 5, -0.1)],
)
def test_two_degree_invalid(d_l: int, d_u: int, q: float):
    with pytest.raises(InvalidDistributionError):
        make_two_degree(d_l, d_u, q)


def test_custom_sorted_and_validated():
    f = make_custom({8: 0.2, 1: 0.5, 3: 0.3})
    assert f.support == (1, 3, 8)
    assert f.d_max == 8
    np.testing.assert_array_equal(f.degrees, [1, 3, 8])
    assert f.cdf(3) == pytest.approx(0.8)


@pytest.mark.parametrize(
    "pmf",
    [{1: 0.5, 2: 0.4}, {0: 1.0}, {1: 1.2, 2: -0.2}],
)
def test_custom_invalid_pmf(pmf: dict[int, float]):
    with pytest.raises(ValidationError):
        make_custom(pmf)


def test_custom_empty():
    with pytest.raises(InvalidDistributionError):
        make_custom({})


def test_degree_outside_bound():
    with pytest.raises(ValidationError):
        DegreeDistribution(pmf={5: 1.0}, d_max=4)


def test_jackson_rogers_normalized_and_truncated():
    f = make_jackson_rogers(7, 2, 200)
    assert f.support[0] == 1
    assert f.support[-1] == 200
    assert math.fsum(f.pmf.values()) == pytest.approx(1.0, abs=1e-12)
    assert JacksonRogersDistributionConfig(m=7).analytic_mean == 7
    assert 6.0 < f.mean_degree < 8.0


def test_jackson_rogers_cdf_limits():
    assert float(jackson_rogers_cdf(0.0, 5, 2)) == 0.0
    assert float(jackson_rogers_cdf(1e12, 5, 2)) == pytest.approx(1.0)
    assert float(jackson_rogers_cdf(5.0, 5, math.inf)) == pytest.approx(1 - math.exp(-1))
    assert float(jackson_rogers_cdf(7.0, 7, 2)) == pytest.approx(19 / 27, abs=1e-12)


def test_jackson_rogers_spread_grows_with_mean():
    stds = [moments(make_jackson_rogers(m, 2, 200))[1] for m in (2, 7, 15)]
    assert stds == sorted(stds)


def test_jackson_rogers_spread_grows_with_inverse_r():
    # 1/r = 0, 0.1, 1/3, 0.5, 1
    stds = [moments(make_jackson_rogers(7, r, 200))[1] for r in (math.inf, 10, 3, 2, 1)]
    assert all(a < b for a, b in zip(stds, stds[1:]))
    assert stds[0] == pytest.approx(6.99, abs=0.01)
    assert stds[-1] == pytest.approx(12.19, abs=0.01)


def test_jackson_rogers_higher_mean_dominates():
    dense = edge_perspective(make_jackson_rogers(9, 2, 200))
    sparse = edge_perspective(make_jackson_rogers(7, 2, 200))
    assert fosd_dominates(dense, sparse)
    assert not fosd_dominates(sparse, dense)


@pytest.mark.parametrize(("m", "r"), [(0, 2), (-1, 2), (5, 0)])
def test_jackson_rogers_invalid(m: float, r: float):
    with pytest.raises(InvalidDistributionError):
        make_jackson_rogers(m, r)


def test_fosd():
    low = make_two_degree(2, 9, 0.1)
    high = make_two_degree(2, 9, 0.5)
    assert fosd_dominates(high, low)
    assert not fosd_dominates(low, high)
    assert fosd_dominates(edge_perspective(high), edge_perspective(low))


@pytest.mark.parametrize(
    "f",
    [make_jackson_rogers(7, 2, 200), make_custom({1: 0.5, 3: 0.3, 8: 0.2}), make_two_degree(1, 10_000, 0.01)],
)
def test_edge_perspective_weights_by_degree(f: DegreeDistribution):
    f_tilde = edge_perspective(f)
    for d, prob in f.pmf.items():
        assert f_tilde.pmf[d] * f.mean_degree == pytest.approx(d * prob, rel=1e-12)
    assert math.fsum(f_tilde.pmf.values()) == pytest.approx(1.0, abs=1e-12)


def test_to_frame():
    frame = make_custom({1: 0.25, 4: 0.75}).to_frame()
    assert list(frame.columns) == ["degree", "probability"]
    assert frame["degree"].tolist() == [1, 4]


@pytest.mark.parametrize(
    ("config", "support"),
    [
        (RegularDistributionConfig(degree=3), (3,)),
        (TwoDegreeDistributionConfig(d_l=2, d_u=5, q=0.5), (2, 5)),
        (CustomDistributionConfig(pmf={1: 0.5, 3: 0.5}), (1, 3)),
        (JacksonRogersDistributionConfig(m=4, d_max=10), tuple(range(1, 11))),
    ],
)
def test_get_distribution(config, support):
    assert get_distribution(config).support == support
