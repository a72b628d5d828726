import logging
from pathlib import Path

import pytest

from mfpricing import __version__
from mfpricing.cli import EXIT_INVALID_INPUT, EXIT_SUCCESS, run
from mfpricing.utils.csv import read_csv
from mfpricing.utils.log import set_stream_level


@pytest.fixture(autouse=True)
def _reset_log_level():
    yield
    set_stream_level("INFO")


def _values(out: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line)


def test_version(capsys: pytest.CaptureFixture[str]):
    assert run(["--version"]) == EXIT_SUCCESS
    assert capsys.readouterr().out.strip() == __version__
    assert run(["--version", "dist"]) == EXIT_INVALID_INPUT


def test_solve(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["solve", "--dist", "regular:1", "--P0", "0", "--P1", "0", "--out", str(tmp_path)])
    assert code == EXIT_SUCCESS
    values = _values(capsys.readouterr().out)
    assert values["alpha_star"] == "0.75"
    assert values["d_L"] == "1"
    assert values["d_U"] == "inf"
    frame, metadata = read_csv(tmp_path / "equilibrium.csv")
    assert metadata["alpha_star"] == "0.75"
    assert metadata["distribution"] == "regular(d=1)"
    assert frame["degree"].tolist() == [1]


def test_global_flags_after_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["--dist", "regular:1", "solve", "--P0", "0", "--P1", "0", "--out", str(tmp_path), "-q"])
    assert code == EXIT_SUCCESS
    assert _values(capsys.readouterr().out)["alpha_star"] == "0.75"


def test_missing_distribution(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["solve", "--P0", "0", "--P1", "0", "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT
    assert "distribution" in capsys.readouterr().err


def test_missing_price(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    assert run(["solve", "--dist", "regular:1", "--P0", "0", "--out", str(tmp_path)]) == EXIT_INVALID_INPUT
    assert "policy.P1" in capsys.readouterr().err


def test_negative_second_price(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["solve", "--dist", "regular:1", "--P0", "0", "--P1", "-1", "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT
    assert "nonnegative" in capsys.readouterr().err


def test_invalid_params(tmp_path: Path):
    code = run(["solve", "--dist", "regular:1", "--P0", "0", "--P1", "0", "--params", "1,2,3", "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT


def test_unknown_flag():
    assert run(["solve", "--bogus"]) == EXIT_INVALID_INPUT


def test_config_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    path = tmp_path / "experiment.ini"
    path.write_text(
        "[distribution]\ntype = regular\ndegree = 1\n\n[policy]\nP0 = 0\nP1 = 0\n\n"
        f"[output]\ndirectory = {tmp_path / 'results'}\n",
        encoding="utf-8",
    )
    assert run(["--config", str(path), "solve"]) == EXIT_SUCCESS
    assert _values(capsys.readouterr().out)["alpha_star"] == "0.75"
    assert (tmp_path / "results" / "equilibrium.csv").is_file()

    # flags override the file
    assert run(["--config", str(path), "solve", "--P0", "50"]) == EXIT_SUCCESS
    assert _values(capsys.readouterr().out)["alpha_star"] == "0"


def test_profit(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["profit", "--dist", "regular:1", "--P0", "5", "--P1", "10", "--out", str(tmp_path)])
    assert code == EXIT_SUCCESS
    values = _values(capsys.readouterr().out)
    assert float(values["profit"]) == pytest.approx(3.125)
    assert float(values["limit_profit"]) == pytest.approx(3.125)
    assert values["corner"] == "False"


def test_profit_sweep(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["profit", "--dist", "regular:1", "--P1", "10", "--sweep", "P0", "2", "6", "5", "--out", str(tmp_path)])
    assert code == EXIT_SUCCESS
    values = _values(capsys.readouterr().out)
    assert values["best_param"] == "4"
    assert float(values["best_profit"]) == pytest.approx(4.5)
    frame, metadata = read_csv(tmp_path / "profit.csv")
    assert list(frame.columns) == ["param", "beta", "gamma_H", "phi_H", "profit"]
    assert frame["param"].tolist() == [2.0, 3.0, 4.0, 5.0, 6.0]
    # full adoption at P0 = 2, then alpha = (6 - P0) / 4
    assert frame["profit"][0] == pytest.approx(2.0)
    assert frame["profit"][1] == pytest.approx(4.125)
    assert metadata["sweep"] == "P0"


def test_profit_sweep_invalid_field(tmp_path: Path):
    code = run(["profit", "--dist", "regular:1", "--P1", "20", "--sweep", "q", "0", "1", "3", "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT


def test_optimize_two_price(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["optimize", "--dist", "regular:1", "--class", "two_price", "--out", str(tmp_path)])
    assert code == EXIT_SUCCESS
    values = _values(capsys.readouterr().out)
    assert values["policy_class"] == "two_price"
    assert float(values["profit"]) == pytest.approx(8.45, abs=1e-8)
    _, metadata = read_csv(tmp_path / "trace.csv")
    assert float(metadata["best_profit"]) == pytest.approx(8.45, abs=1e-8)


def test_optimize_capped(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(
        ["optimize", "--dist", "two_degree:2,9,0.3", "--class", "referral", "--cap", "2", "--grid", "30"]
        + ["--alpha-grid", "30", "--out", str(tmp_path)]
    )
    assert code == EXIT_SUCCESS
    assert _values(capsys.readouterr().out)["policy_class"] == "referral"
    _, metadata = read_csv(tmp_path / "trace.csv")
    assert metadata["referral_cap"] == "2"


@pytest.mark.parametrize(
    ("args", "key"),
    [
        (["--class", "two_price", "--cap", "2"], "cap"),
        ([], "optimizer.type"),
    ],
)
def test_optimize_invalid(tmp_path: Path, capsys: pytest.CaptureFixture[str], args: list[str], key: str):
    code = run(["optimize", "--dist", "regular:1", *args, "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT
    assert f"[key: {key}]" in capsys.readouterr().err


def test_optimize_invalid_cap(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["optimize", "--dist", "regular:1", "--class", "referral", "--cap", "0", "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT
    assert "at least 1" in capsys.readouterr().err


def test_finite(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["finite", "--n", "3", "--P0", "0", "--P1", "0", "--out", str(tmp_path)])
    assert code == EXIT_SUCCESS
    values = _values(capsys.readouterr().out)
    assert values["nash_profiles"] == "100"
    assert float(values["omega"]) == pytest.approx(0.5, abs=1e-9)
    frame, metadata = read_csv(tmp_path / "finite.csv")
    assert len(frame) == 4
    assert "multiplicity" not in frame.columns
    assert metadata["multiplicity"] == "1;3;3;1"

    code = run(["finite", "--topology", "star", "--n", "3", "--P0", "0", "--P1", "0", "--out", str(tmp_path)])
    assert code == EXIT_SUCCESS
    assert float(_values(capsys.readouterr().out)["omega_center"]) == pytest.approx(0.75)


def test_finite_enumeration_bound(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    code = run(["finite", "--topology", "star", "--n", "40", "--P0", "0", "--P1", "0", "--out", str(tmp_path)])
    assert code == EXIT_INVALID_INPUT
    assert "enumeration bound" in capsys.readouterr().err


def test_dist(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    assert run(["dist", "--dist", "jackson_rogers:7,2", "--out", str(tmp_path)]) == EXIT_SUCCESS
    values = _values(capsys.readouterr().out)
    assert values["analytic_mean"] == "7"
    frame, metadata = read_csv(tmp_path / "distribution.csv")
    assert len(frame) == 200
    assert float(metadata["mean"]) == pytest.approx(float(values["mean"]))


def test_figure4(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    assert run(["figure", "4", "--out", str(tmp_path)]) == EXIT_SUCCESS
    assert _values(capsys.readouterr().out)["wrote"] == str(tmp_path / "figure4.csv")


def test_unknown_figure(tmp_path: Path):
    assert run(["figure", "9", "--out", str(tmp_path)]) == EXIT_INVALID_INPUT
    assert run(["figure", "--out", str(tmp_path)]) == EXIT_INVALID_INPUT


def test_log_file(tmp_path: Path):
    log_file = tmp_path / "run.log"
    code = run(["dist", "--dist", "regular:3", "--out", str(tmp_path), "--log-file", str(log_file)])
    assert code == EXIT_SUCCESS
    assert "Wrote" in log_file.read_text(encoding="utf-8")


def test_log_file_with_root_handler(tmp_path: Path):
    root = logging.getLogger()
    foreign = logging.StreamHandler()
    root.addHandler(foreign)
    try:
        log_file = tmp_path / "run.log"
        code = run(["dist", "--dist", "regular:3", "--out", str(tmp_path), "--log-file", str(log_file)])
    finally:
        root.removeHandler(foreign)
    assert code == EXIT_SUCCESS
    assert "Wrote" in log_file.read_text(encoding="utf-8")


if __name__ == "__main__":
    pytest.main()
