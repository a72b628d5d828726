from mfpricing.network.config import get_distribution
from mfpricing.network.degree_dist import (
    DegreeDistribution,
    EdgePerspectiveDistribution,
    edge_perspective,
    fosd_dominates,
    make_jackson_rogers,
    make_regular,
    make_two_degree,
    moments,
)

__all__ = [
    "DegreeDistribution",
    "EdgePerspectiveDistribution",
    "edge_perspective",
    "fosd_dominates",
    "get_distribution",
    "make_jackson_rogers",
    "make_regular",
    "make_two_degree",
    "moments",
]
