"""Command line interface.

Examples::

    mfpricing solve --dist regular:1 --P0 0 --P1 0
    mfpricing optimize --dist jackson_rogers:7,2 --class referral --out results/
    mfpricing figure 3 --jobs 4 --svg --out results/
    mfpricing --config experiment.ini profit --sweep P0 0 6 61

Flags given on the command line override the values of the `--config` file.
Exit status is 0 on success, 1 if a computation fails and 2 for invalid input.
"""

from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

import pandas as pd
from joblib import Parallel, delayed
from pydantic import TypeAdapter, ValidationError

from mfpricing import CLI_EXECUTABLE_NAME, __version__
from mfpricing.exceptions import (
    EnumerationBoundError,
    ExperimentConfigError,
    InvalidDistributionError,
    InvalidParamsError,
    InvalidPolicyError,
    MfpricingException,
    UndefinedEfficiencyError,
)
from mfpricing.experiments.config import (
    ExperimentConfig,
    FigureConfig,
    SweepConfig,
    parse_distribution,
    parse_params,
)
from mfpricing.experiments.figures import FIGURE_IDS, run_figure, write_figure
from mfpricing.game.abstract import PricingPolicy
from mfpricing.game.equilibrium import (
    early_fraction,
    equilibrium_table,
    informational_efficiency,
    solve_equilibrium,
)
from mfpricing.game.finite import (
    enumerate_pure_nash,
    finite_table,
    star_mixed_equilibrium,
    symmetric_mixed_complete,
)
from mfpricing.network.config import JacksonRogersDistributionConfig, get_distribution
from mfpricing.network.degree_dist import moments
from mfpricing.optimizer.config import OptimizerConfig, get_optimizer
from mfpricing.pricing.limit import evaluate_limit_policy
from mfpricing.pricing.profit import profit_at_policy
from mfpricing.utils.csv import format_real, write_csv
from mfpricing.utils.log import add_file_handler, get_logger, remove_file_handler, set_stream_level

__all__ = ["main", "run"]

_logger = get_logger("mfpricing.cli", emoji="🧮")

_OPTIMIZER_ADAPTER: TypeAdapter[OptimizerConfig] = TypeAdapter(OptimizerConfig)

EXIT_SUCCESS = 0
EXIT_COMPUTATION_FAILED = 1
EXIT_INVALID_INPUT = 2

_INVALID_INPUT_ERRORS = (
    ValidationError,
    ExperimentConfigError,
    InvalidParamsError,
    InvalidDistributionError,
    InvalidPolicyError,
    EnumerationBoundError,
)


def _add_common_arguments(parser: argparse.ArgumentParser, *, suppress: bool) -> None:
    # Subcommands repeat the global flags with suppressed defaults so they can
    # be given on either side of the command without overwriting each other.
    def default(value: Any) -> Any:
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "--params", default=default(None), help="Payoffs A0H,A1H,A0L,A1L,p (default 10,20,-10,-20,0.4)"
    )
    parser.add_argument(
        "--dist",
        default=default(None),
        help="Degree distribution, e.g. regular:5, two_degree:6,13,0.1, jackson_rogers:7,2,200 or custom:1=0.5,3=0.5",
    )
    parser.add_argument("--out", type=Path, default=default(None), help="Output directory")
    parser.add_argument("--config", type=Path, default=default(None), help="Experiment configuration file")
    parser.add_argument("--svg", action="store_true", default=default(False), help="Also write SVG plots")
    parser.add_argument("--jobs", type=int, default=default(None), help="Parallel workers for sweeps")
    parser.add_argument("--log-file", type=Path, default=default(None), help="Mirror the log into this file")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", default=default(False), help="Log at DEBUG level")
    verbosity.add_argument("-q", "--quiet", action="store_true", default=default(False), help="Log warnings only")


def _add_policy_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--P0", type=float, help="First-period price")
    parser.add_argument("--P1", type=float, help="Second-period price")
    parser.add_argument("--eta", type=float, help="Referral payment per late-adopting neighbor")
    parser.add_argument("--cap", type=int, help="Maximum number of paid referrals per early adopter")
    parser.add_argument(
        "--uninformed", action="store_true", default=None, help="The monopolist does not know the quality"
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=CLI_EXECUTABLE_NAME, description="Mean-field pricing of a networked technology adoption game"
    )
    _add_common_arguments(parser, suppress=False)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_command(name: str, help: str) -> argparse.ArgumentParser:
        subparser = subparsers.add_parser(name, help=help)
        _add_common_arguments(subparser, suppress=True)
        return subparser

    solve = add_command("solve", help="Solve the mean-field equilibrium at a policy")
    _add_policy_arguments(solve)

    profit = add_command("profit", help="Profit breakdown at a policy, or a sweep of one policy field")
    _add_policy_arguments(profit)
    profit.add_argument(
        "--sweep",
        nargs=4,
        metavar=("FIELD", "START", "STOP", "NUM"),
        help="Sweep P0, P1 or eta over NUM evenly spaced values",
    )
    profit.add_argument(
        "--class",
        dest="policy_class",
        choices=["two_price", "referral", "full"],
        default="full",
        help="Policy class of the reported limit profit",
    )

    optimize = add_command("optimize", help="Optimal policy of a policy class")
    optimize.add_argument("--class", dest="policy_class", choices=["two_price", "referral", "full"])
    optimize.add_argument("--cap", type=int, help="Referral cap (referral class only)")
    optimize.add_argument("--grid", type=int, help="Number of prices on the search grid")
    optimize.add_argument("--alpha-grid", type=int, help="Number of informational access values per price")
    optimize.add_argument("--uninformed", action="store_true", default=None)

    figure = add_command("figure", help=f"Reproduce a profit figure ({', '.join(map(str, FIGURE_IDS))})")
    figure.add_argument("figure_id", type=int, nargs="?", help="Figure number")
    figure.add_argument("--curves", help="Mean degrees of the 1/r sweep, e.g. 3,7,12")
    figure.add_argument("--caps", help="Referral caps of the capped sweep, e.g. 1,2,5,10,20,inf")
    figure.add_argument("--grid", type=int, help="Number of prices on the referral search grid")
    figure.add_argument("--alpha-grid", type=int, help="Number of informational access values per price")

    finite = add_command("finite", help="Pure and mixed Nash equilibria of a small network")
    _add_policy_arguments(finite)
    finite.add_argument("--topology", choices=["complete", "star"], default="complete")
    finite.add_argument("--n", type=int, required=True, help="Number of agents")

    add_command("dist", help="Write a degree distribution and its moments")
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    update: dict[str, Any] = {}
    if args.params:
        update["params"] = parse_params(args.params)
    if args.dist:
        update["distribution"] = parse_distribution(args.dist)
    output = {}
    if args.out is not None:
        output["directory"] = args.out
    if args.svg:
        output["svg"] = True
    if output:
        update["output"] = config.output.model_copy(update=output)
    if args.jobs is not None:
        update["figure"] = FigureConfig(**{**config.figure.model_dump(), "jobs": args.jobs})
    return config.model_copy(update=update)


def _policy(
    args: argparse.Namespace, config: ExperimentConfig, defaults: dict[str, float] | None = None
) -> PricingPolicy:
    values = {**(defaults or {}), **(config.policy.model_dump() if config.policy is not None else {})}
    for field, flag in (("P0", args.P0), ("P1", args.P1), ("eta", args.eta), ("referral_cap", args.cap)):
        if flag is not None:
            values[field] = flag
    if args.uninformed:
        values["monopolist_informed"] = False
    for field in ("P0", "P1"):
        if field not in values:
            msg = f"No {field} configured: pass --{field} or set it in the [policy] section"
            raise ExperimentConfigError(msg, extra_info={"key": f"policy.{field}"})
    return PricingPolicy(**values)


def _metadata(config: ExperimentConfig, policy: PricingPolicy | None = None, **extra: Any) -> dict[str, Any]:
    metadata: dict[str, Any] = dict(extra)
    if config.distribution is not None:
        metadata["distribution"] = config.distribution.label()
    metadata |= config.params.model_dump()
    if policy is not None:
        metadata |= {k: v for k, v in policy.model_dump().items() if v is not None}
    return metadata


def _print_values(**values: Any) -> None:
    for key, value in values.items():
        print(f"{key}={format_real(value)}")


def _write(config: ExperimentConfig, name: str, frame, metadata: dict[str, Any]) -> Path:
    path = write_csv(config.output.directory / name, frame, metadata)
    _logger.info("Wrote %s", path)
    return path


def _cmd_solve(args: argparse.Namespace, config: ExperimentConfig) -> int:
    f = get_distribution(config.require_distribution())
    policy = _policy(args, config)
    eq = solve_equilibrium(config.params, policy, f)
    beta = early_fraction(eq.strategy, f)
    try:
        efficiency = informational_efficiency(eq.strategy, f)
    except UndefinedEfficiencyError:
        efficiency = math.nan
    metadata = _metadata(config, policy, alpha_star=eq.alpha_star, d_L=eq.d_L, d_U=eq.d_U)
    _write(config, "equilibrium.csv", equilibrium_table(eq), metadata)
    _print_values(alpha_star=eq.alpha_star, d_L=eq.d_L, d_U=eq.d_U, beta=beta, efficiency=efficiency)
    return EXIT_SUCCESS


def _cmd_profit(args: argparse.Namespace, config: ExperimentConfig) -> int:
    f = get_distribution(config.require_distribution())
    sweep = config.sweep
    if args.sweep:
        variable, start, stop, num = args.sweep
        sweep = SweepConfig(variable=variable, start=start, stop=stop, num=num)
    # the swept field needs no value of its own
    policy = _policy(args, config, {sweep.variable: sweep.start} if sweep is not None else None)
    if sweep is None:
        breakdown = profit_at_policy(config.params, policy, f)
        limit = evaluate_limit_policy(config.params, policy, f, args.policy_class)
        _print_values(
            beta=breakdown.beta,
            gamma_H=breakdown.gamma_H,
            phi_H=breakdown.phi_H,
            revenue_early=breakdown.revenue_early,
            revenue_late=breakdown.revenue_late,
            referral_cost=breakdown.referral_cost,
            profit=breakdown.total,
            corner=breakdown.corner,
            limit_profit=limit.profit,
        )
        return EXIT_SUCCESS

    values = sweep.values()
    policies = [PricingPolicy(**{**policy.model_dump(), sweep.variable: float(v)}) for v in values]
    breakdowns = Parallel(n_jobs=config.figure.jobs)(
        delayed(profit_at_policy)(config.params, swept, f) for swept in policies
    )
    frame = pd.DataFrame(
        {
            "param": values,
            "beta": [b.beta for b in breakdowns],
            "gamma_H": [b.gamma_H for b in breakdowns],
            "phi_H": [b.phi_H for b in breakdowns],
            "profit": [b.total for b in breakdowns],
        }
    )
    _write(config, "profit.csv", frame, _metadata(config, policy, sweep=sweep.variable))
    best = int(frame["profit"].idxmax())
    _print_values(best_param=values[best], best_profit=frame["profit"][best])
    return EXIT_SUCCESS


def _optimizer_config(args: argparse.Namespace, config: ExperimentConfig) -> OptimizerConfig:
    if args.policy_class is None:
        if config.optimizer is None:
            msg = "No policy class configured: pass --class or add an [optimizer] section"
            raise ExperimentConfigError(msg, extra_info={"key": "optimizer.type"})
        values = config.optimizer.model_dump()
    else:
        values = {"type": args.policy_class}
    if args.cap is not None:
        if args.cap < 1:
            msg = f"Referral cap must be at least 1, got {args.cap}"
            raise InvalidPolicyError(msg)
        if values["type"] not in ("referral", "capped_referral"):
            msg = "--cap only applies to the referral class"
            raise ExperimentConfigError(msg, extra_info={"key": "cap"})
        values |= {"type": "capped_referral", "cap": args.cap}
    if args.uninformed:
        values["monopolist_informed"] = False
    if values["type"] != "two_price":
        if args.grid is not None:
            values["price_grid_size"] = args.grid
        if args.alpha_grid is not None:
            values["alpha_grid_size"] = args.alpha_grid
    return _OPTIMIZER_ADAPTER.validate_python(values)


def _cmd_optimize(args: argparse.Namespace, config: ExperimentConfig) -> int:
    f = get_distribution(config.require_distribution())
    result = get_optimizer(_optimizer_config(args, config)).optimize(config.params, f)
    policy = result.best_policy
    eq = result.equilibrium
    metadata = _metadata(
        config,
        policy_class=result.policy_class,
        best_P0=policy.P0,
        best_P1=policy.P1,
        best_eta=policy.eta,
        best_profit=result.best_profit,
        alpha_star=eq.alpha_star,
        d_L=eq.d_L,
        d_U=eq.d_U,
    )
    if policy.referral_cap is not None:
        metadata["referral_cap"] = policy.referral_cap
    if result.diagnostic:
        metadata["diagnostic"] = result.diagnostic
    _write(config, "trace.csv", result.trace_frame(), metadata)
    _print_values(
        policy_class=result.policy_class,
        P0=policy.P0,
        P1=policy.P1,
        eta=policy.eta,
        profit=result.best_profit,
        alpha_star=eq.alpha_star,
        d_L=eq.d_L,
        d_U=eq.d_U,
    )
    return EXIT_SUCCESS


def _cmd_figure(args: argparse.Namespace, config: ExperimentConfig) -> int:
    overrides: dict[str, Any] = {}
    for field, value in (
        ("id", args.figure_id),
        ("curves", args.curves),
        ("caps", args.caps),
        ("price_grid_size", args.grid),
        ("alpha_grid_size", args.alpha_grid),
    ):
        if value is not None:
            overrides[field] = value
    figure_config = FigureConfig(**{**config.figure.model_dump(), **overrides})
    if figure_config.id is None:
        msg = "No figure selected: pass a figure number or set `id` in the [figure] section"
        raise ExperimentConfigError(msg, extra_info={"key": "figure.id"})
    result = run_figure(figure_config.id, config.params, figure_config)
    for path in write_figure(result, config.output.directory, svg=config.output.svg):
        _logger.info("Wrote %s", path)
        print(f"wrote={path}")
    return EXIT_SUCCESS


def _cmd_finite(args: argparse.Namespace, config: ExperimentConfig) -> int:
    policy = _policy(args, config)
    table = finite_table(args.topology, args.n, config.params, policy)
    nash = enumerate_pure_nash(args.topology, args.n, config.params, policy)
    values: dict[str, Any] = {"nash_profiles": ";".join(profile.label for profile in nash)}
    if args.topology == "complete":
        mixing = symmetric_mixed_complete(args.n, config.params, policy)
        values |= {"omega": mixing.omega, "corner": mixing.corner}
    else:
        star = star_mixed_equilibrium(args.n, config.params, policy)
        if star is not None:
            values |= {"omega_center": star.omega_center, "omega_periphery": star.omega_periphery}
    metadata = {"topology": args.topology, "n": args.n, **_metadata(config, policy), **values}
    if args.topology == "complete":
        metadata["multiplicity"] = ";".join(str(count) for count in table.attrs["multiplicity"])
    _write(config, "finite.csv", table, metadata)
    _print_values(**values)
    return EXIT_SUCCESS


def _cmd_dist(args: argparse.Namespace, config: ExperimentConfig) -> int:
    dist_config = config.require_distribution()
    f = get_distribution(dist_config)
    mean, std = moments(f)
    values: dict[str, Any] = {"mean": mean, "std": std}
    if isinstance(dist_config, JacksonRogersDistributionConfig):
        values["analytic_mean"] = dist_config.analytic_mean
    _write(config, "distribution.csv", f.to_frame(), {"distribution": dist_config.label(), **values})
    _print_values(**values)
    return EXIT_SUCCESS


_COMMANDS: dict[str, Callable[[argparse.Namespace, ExperimentConfig], int]] = {
    "solve": _cmd_solve,
    "profit": _cmd_profit,
    "optimize": _cmd_optimize,
    "figure": _cmd_figure,
    "finite": _cmd_finite,
    "dist": _cmd_dist,
}


def _report(e: Exception) -> None:
    key = getattr(e, "extra_info", {}).get("key")
    suffix = f" [key: {key}]" if key else ""
    print(f"Error: {e}{suffix}", file=sys.stderr)


def run(argv: Sequence[str] | None = None) -> int:
    """Runs the command line and returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)

    # First parser just for version checking
    version_parser = argparse.ArgumentParser(add_help=False)
    version_parser.add_argument("-v", "--version", action="store_true")
    version_args, remaining_args = version_parser.parse_known_args(argv)
    if version_args.version:
        if remaining_args:
            print("Error: --version cannot be combined with other arguments", file=sys.stderr)
            return EXIT_INVALID_INPUT
        print(__version__)
        return EXIT_SUCCESS

    try:
        args = _build_parser().parse_args(remaining_args)
    except SystemExit as e:
        return EXIT_SUCCESS if e.code in (0, None) else EXIT_INVALID_INPUT

    if args.verbose:
        set_stream_level("DEBUG")
    elif args.quiet:
        set_stream_level("WARNING")
    handler = add_file_handler(args.log_file) if args.log_file else None
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](args, config)
    except _INVALID_INPUT_ERRORS as e:
        _report(e)
        return EXIT_INVALID_INPUT
    except MfpricingException as e:
        _report(e)
        return EXIT_COMPUTATION_FAILED
    finally:
        if handler is not None:
            remove_file_handler(handler)


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
