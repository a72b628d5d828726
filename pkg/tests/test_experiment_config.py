import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from mfpricing.exceptions import ExperimentConfigError, InvalidParamsError
from mfpricing.experiments.config import (
    ExperimentConfig,
    FigureConfig,
    SweepConfig,
    format_pmf,
    parse_distribution,
    parse_params,
    parse_pmf,
)
from mfpricing.game.abstract import GameParams, PricingPolicy
from mfpricing.network.config import (
    CustomDistributionConfig,
    JacksonRogersDistributionConfig,
    RegularDistributionConfig,
    TwoDegreeDistributionConfig,
)
from mfpricing.optimizer.config import CappedReferralOptimizerConfig, ReferralOptimizerConfig
from mfpricing.utils.csv import write_csv

EXAMPLE = """
[params]
A0H = 10
A1H = 20
A0L = -10
A1L = -20
p = 0.4

[distribution]
type = jackson_rogers
m = 7
r = 2

[optimizer]
type = referral
price_grid_size = 50

[output]
directory = results
svg = true
"""


def _key(exc_info: pytest.ExceptionInfo) -> str:
    return exc_info.value.extra_info["key"]


def test_parse_example():
    config = ExperimentConfig.parse(EXAMPLE)
    assert config.params == GameParams()
    assert config.distribution == JacksonRogersDistributionConfig(m=7, r=2)
    assert isinstance(config.optimizer, ReferralOptimizerConfig)
    assert config.optimizer.price_grid_size == 50
    assert config.output.directory == Path("results")
    assert config.output.svg
    assert config.policy is None


def test_serialize_round_trip():
    config = ExperimentConfig(
        distribution=CustomDistributionConfig(pmf={1: 0.5, 3: 0.5}),
        policy=PricingPolicy(P0=1.0, P1=2.0, eta=0.5),
        optimizer=CappedReferralOptimizerConfig(cap=3, price_grid_size=50),
        sweep=SweepConfig(variable="P0", start=0.0, stop=6.0, num=7),
    )
    text = config.serialize()
    assert "pmf = 1=0.5,3=0.5" in text
    assert "caps = 1,2,5,10,20,inf" in text
    assert ExperimentConfig.parse(text) == config


def test_unknown_section():
    with pytest.raises(ExperimentConfigError) as exc_info:
        ExperimentConfig.parse("[bogus]\nx = 1\n")
    assert _key(exc_info) == "bogus"


def test_unknown_key_rejected():
    with pytest.raises(ValidationError):
        ExperimentConfig.parse("[params]\nbogus = 1\n")


def test_malformed_file():
    with pytest.raises(ExperimentConfigError):
        ExperimentConfig.parse("no section header\n")


@pytest.mark.parametrize(
    ("text", "key"),
    [
        ("[optimizer]\nprice_grid_size = 50\n", "optimizer.type"),
        ("[distribution]\nm = 7\n", "distribution.type"),
        ("[distribution]\ntype = custom\n", "distribution.pmf"),
        ("[distribution]\ntype = custom\nfile = missing.csv\n", "distribution.file"),
    ],
)
def test_missing_keys(text: str, key: str):
    with pytest.raises(ExperimentConfigError) as exc_info:
        ExperimentConfig.parse(text)
    assert _key(exc_info) == key


def test_distribution_file_reference(tmp_path: Path):
    write_csv(tmp_path / "degrees.csv", pd.DataFrame({"degree": [1, 4], "probability": [0.25, 0.75]}))
    path = tmp_path / "experiment.ini"
    path.write_text("[distribution]\ntype = custom\nfile = degrees.csv\n", encoding="utf-8")
    config = ExperimentConfig.from_file(path)
    assert config.distribution == CustomDistributionConfig(pmf={1: 0.25, 4: 0.75})


def test_missing_config_file(tmp_path: Path):
    with pytest.raises(ExperimentConfigError) as exc_info:
        ExperimentConfig.from_file(tmp_path / "missing.ini")
    assert _key(exc_info) == "config"


def test_require_distribution():
    with pytest.raises(ExperimentConfigError) as exc_info:
        ExperimentConfig().require_distribution()
    assert _key(exc_info) == "distribution"


@pytest.mark.parametrize(
    ("text", "expected"),
    [
        ("regular:5", RegularDistributionConfig(degree=5)),
        ("two_degree:6,13,0.1", TwoDegreeDistributionConfig(d_l=6, d_u=13, q=0.1)),
        ("jackson_rogers:7", JacksonRogersDistributionConfig(m=7)),
        ("custom:1=0.5,3=0.5", CustomDistributionConfig(pmf={1: 0.5, 3: 0.5})),
    ],
)
def test_parse_distribution(text: str, expected):
    assert parse_distribution(text) == expected


@pytest.mark.parametrize("text", ["regular", "regular:", "lognormal:3", "regular:1,2"])
def test_parse_distribution_invalid(text: str):
    with pytest.raises(ExperimentConfigError) as exc_info:
        parse_distribution(text)
    assert _key(exc_info) == "dist"


def test_pmf_text():
    assert parse_pmf("1=0.25,4=0.75") == {1: 0.25, 4: 0.75}
    assert format_pmf({4: 0.75, 1: 0.25}) == "1=0.25,4=0.75"
    with pytest.raises(ExperimentConfigError):
        parse_pmf("1:0.5")


def test_parse_params():
    assert parse_params("10, 20, -10, -20, 0.4") == GameParams()
    with pytest.raises(InvalidParamsError):
        parse_params("10,20,-10,-20")
    with pytest.raises(InvalidParamsError):
        parse_params("10,20,-10,-20,high")
    with pytest.raises(ValidationError):
        parse_params("10,20,-10,-20,0.9")


def test_figure_config_lists():
    config = FigureConfig(curves="3, 7", caps="1,2,inf")
    assert config.curves == (3.0, 7.0)
    assert config.caps == (1.0, 2.0, math.inf)


@pytest.mark.parametrize("values", [{"id": 9}, {"jobs": 0}, {"caps": "0.5"}, {"caps": "2.5"}])
def test_figure_config_invalid(values):
    with pytest.raises(ValidationError):
        FigureConfig(**values)


def test_sweep_config():
    np.testing.assert_allclose(SweepConfig(variable="eta", start=0, stop=1, num=5).values(), [0, 0.25, 0.5, 0.75, 1])
    assert SweepConfig(variable="P0", start=2, stop=2, num=1).values().tolist() == [2.0]
    with pytest.raises(ValidationError):
        SweepConfig(variable="P0", start=1, stop=1, num=3)
    with pytest.raises(ValidationError):
        SweepConfig(variable="q", start=0, stop=1)
