"""
Command line interface (cli) for prabhakar_kit.

Every subcommand parses its flags into a ``RunConfig``; ``run`` executes it.
Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 a failed
criterion in ``reproduce``.
"""
import dataclasses
import pathlib
import sys
import traceback
import typing as ty

import click
import numpy as np
from voluptuous import MultipleInvalid

from prabhakar_kit import __version__
from prabhakar_kit.bvp_spectral import manufacture_instance
from prabhakar_kit.data import FORMATS, PROTOCOLS, PROVENANCES, SUBCOMMAND_PARAMETERS
from prabhakar_kit.exceptions import ConfigError, PrabhakarKitError
from prabhakar_kit.greens_function import BVPConfig, chebyshev_grid, green_matrix, green_property_check
from prabhakar_kit.hw_inequality import Provenance, certify
from prabhakar_kit.parsers import load_q, parse_q_expression, read_sweep_configs
from prabhakar_kit.prabhakar_ops import PrabhakarSpec, prabhakar_derivative, prabhakar_integral
from prabhakar_kit.special_functions import MLParams, ml3
from prabhakar_kit.utils.log import configure_logging, get_logger
from prabhakar_kit.utils.output import dumps, dumps_line, grid_csv, write_text
from prabhakar_kit.workflows import certify_sweep, reproduce

LOGGER = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_PROPERTY = 4

_BVP_KEYS = ("a", "b", "xi", "beta", "rho", "mu", "gamma", "omega")


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """A validated subcommand invocation."""

    subcommand: str
    parameters: ty.Dict[str, ty.Any]
    output_path: ty.Optional[pathlib.Path] = None
    format: str = "json"


def _make_config(subcommand: str, options: dict) -> RunConfig:
    output_path = options.pop("json_out", None)
    output_format = options.pop("output_format", None) or "json"
    parameters = {key: value for key, value in options.items() if value is not None}
    try:
        parameters = SUBCOMMAND_PARAMETERS[subcommand](parameters).get_dict()
    except MultipleInvalid as exc:
        raise click.UsageError(f"{subcommand}: {exc}") from exc
    return RunConfig(
        subcommand=subcommand,
        parameters=parameters,
        output_path=pathlib.Path(output_path) if output_path else None,
        format=output_format,
    )


def output_options(func):
    func = click.option(
        "--format",
        "output_format",
        type=click.Choice(FORMATS),
        default=None,
        help="Output format (default: json).",
    )(func)
    return click.option(
        "--json-out",
        "-o",
        type=click.Path(dir_okay=False),
        help="Write output to file (default: print to stdout).",
    )(func)


def bvp_options(func):
    for name in reversed(_BVP_KEYS):
        func = click.option(f"--{name}", type=float, default=None)(func)
    return func


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", count=True, help="Increase verbosity (repeatable).")
def cli(verbose):
    """Prabhakar fractional operators and the Hartman-Wintner-type inequality."""
    configure_logging(verbose)


@cli.command("ml-eval")
@click.option("--rho", type=float)
@click.option("--mu", type=float)
@click.option("--gamma", type=float)
@click.option("--z", type=float)
@click.option("--tol", type=float)
@click.option("--max-terms", type=int)
@output_options
def ml_eval(**options):
    """Evaluate the three-parameter Mittag-Leffler function."""
    return _make_config("ml-eval", options)


def _operator_command(name: str, help_text: str):
    @click.option("--rho", type=float)
    @click.option("--mu", type=float)
    @click.option("--gamma", type=float)
    @click.option("--omega", type=float)
    @click.option("--a", type=float)
    @click.option("--x", type=float)
    @click.option("--f", type=str, help='Power expression in (u-a), e.g. "1 + 2*(u-a)^0.5".')
    @click.option("--mu-eff", type=float, help="Integral order (default: mu).")
    @output_options
    def command(**options):
        return _make_config(name, options)

    command.__doc__ = help_text
    return cli.command(name)(command)


_operator_command("prabhakar-int", "Prabhakar integral of a power expression.")
_operator_command("prabhakar-deriv", "Prabhakar derivative of a power expression.")


@cli.command("greens")
@bvp_options
@click.option("--n-grid", type=int)
@click.option("--csv-out", type=click.Path(dir_okay=False), help="Also write the (t, s, G) grid.")
@output_options
def greens(**options):
    """Green's function grid and its property report."""
    return _make_config("greens", options)


@cli.command("make-instance")
@bvp_options
@click.option("--q", type=str, help="Power expression in (s-a) or a .csv sample file.")
@click.option("--n", type=int)
@output_options
def make_instance(**options):
    """Manufacture a problem with a nontrivial solution by spectral scaling."""
    return _make_config("make-instance", options)


@cli.command("certify")
@bvp_options
@click.option("--q", type=str, help="Power expression in (s-a) or a .csv sample file.")
@click.option("--n", type=int)
@click.option("--provenance", type=click.Choice(PROVENANCES))
@output_options
def certify_command(**options):
    """Evaluate both sides of the inequality."""
    return _make_config("certify", options)


@cli.command("certify-sweep")
@click.option("--grid", type=click.Path(dir_okay=False), help="JSON array of configurations.")
@click.option("--q", type=str)
@click.option("--n", type=int)
@output_options
def certify_sweep_command(**options):
    """Certify spectrally scaled instances on every configuration of a sweep file."""
    return _make_config("certify-sweep", options)


@cli.command("reproduce")
@click.option("--protocol", type=click.Choice(PROTOCOLS))
@output_options
def reproduce_command(**options):
    """Run every acceptance criterion."""
    return _make_config("reproduce", options)


def parse_args(argv: ty.Sequence[str]) -> ty.Optional[RunConfig]:
    """Parse ``argv`` (without the program name).

    :raises click.UsageError: for unknown flags, missing or invalid parameters
    :return: the config, or ``None`` if only help or the version was printed
    """
    result = cli.main(list(argv), prog_name="prabhakar-kit", standalone_mode=False)
    return result if isinstance(result, RunConfig) else None


def _config(parameters: dict) -> BVPConfig:
    return BVPConfig.from_parameters(**{key: parameters[key] for key in _BVP_KEYS})


def _run_ml_eval(parameters: dict) -> dict:
    p = MLParams(parameters["rho"], parameters["mu"], parameters["gamma"], parameters["z"])
    result = ml3(p, tol=parameters["tol"], max_terms=parameters["max_terms"])
    return {"parameters": parameters, "value": result.value, "error": result.error, "n_terms": result.n_terms}


def _run_operator(subcommand: str, parameters: dict) -> dict:
    spec = PrabhakarSpec(
        rho=parameters["rho"],
        mu=parameters["mu"],
        gamma=parameters["gamma"],
        omega=parameters["omega"],
        a=parameters["a"],
    )
    f = parse_q_expression(parameters["f"], spec.a, integrable=True)
    if subcommand == "prabhakar-int":
        value = prabhakar_integral(f, parameters["x"], spec, parameters["mu_eff"])
    else:
        value = prabhakar_derivative(f, parameters["x"], spec)
    return {"parameters": parameters, "value": value}


def _write(config: RunConfig, text: str) -> None:
    write_text(text, config.output_path)


def run(config: RunConfig) -> int:  # pylint: disable=too-many-return-statements
    """Execute ``config``; module errors are reported as JSON on stderr.

    :return: exit status
    """
    parameters = config.parameters
    try:
        if config.subcommand == "ml-eval":
            _write(config, dumps(_run_ml_eval(parameters)))

        elif config.subcommand in ("prabhakar-int", "prabhakar-deriv"):
            _write(config, dumps(_run_operator(config.subcommand, parameters)))

        elif config.subcommand == "greens":
            cfg = _config(parameters)
            report = green_property_check(cfg, parameters["n_grid"])
            grid = chebyshev_grid(cfg.a, cfg.b, parameters["n_grid"])
            csv = grid_csv(grid, grid, green_matrix(grid, grid, cfg))
            if parameters["csv_out"]:
                write_text(csv, parameters["csv_out"])
            if config.format == "csv":
                _write(config, csv)
            else:
                _write(config, dumps({"config": cfg.to_dict(), "properties": report}))

        elif config.subcommand == "make-instance":
            cfg = _config(parameters)
            instance = manufacture_instance(cfg, load_q(parameters["q"], cfg.a), parameters["n"])
            if config.format == "csv":
                table = np.column_stack((instance.x.nodes, instance.q.values, instance.x.values))
                lines = ["t,q,x"] + [",".join(f"{value:.17g}" for value in row) for row in table]
                _write(config, "\n".join(lines) + "\n")
            else:
                payload = {
                    "config": cfg.to_dict(),
                    "lambda_star": instance.lambda_star,
                    "residuals": instance.residuals,
                    "nodes": instance.x.nodes,
                    "q": instance.q.values,
                    "x": instance.x.values,
                }
                _write(config, dumps(payload))

        elif config.subcommand == "certify":
            cfg = _config(parameters)
            q = load_q(parameters["q"], cfg.a)
            provenance = Provenance(parameters["provenance"])
            if provenance is Provenance.SPECTRAL_SCALED:
                q = manufacture_instance(cfg, q, parameters["n"]).q
            _write(config, dumps({"report": certify(cfg, q, provenance)}))

        elif config.subcommand == "certify-sweep":
            configs = read_sweep_configs(parameters["grid"])
            base = configs[0].a if configs else 0.0
            if any(cfg.a != base for cfg in configs):
                raise ConfigError("all configurations of a sweep must share the base point a")
            q = load_q(parameters["q"], base)
            reports = certify_sweep(configs, q, parameters["n"])
            _write(config, "".join(dumps_line(report.as_dict()) for report in reports))

        elif config.subcommand == "reproduce":
            summary = reproduce(parameters["protocol"])
            _write(config, dumps(summary))
            if not summary["passed"]:
                return EXIT_PROPERTY

    except PrabhakarKitError as exc:
        frames = traceback.extract_tb(exc.__traceback__)
        diagnostic = {
            "error": type(exc).__name__,
            "module": pathlib.Path(frames[-1].filename).stem if frames else None,
            "message": str(exc),
            "subcommand": config.subcommand,
            "parameters": parameters,
        }
        click.echo(dumps(diagnostic), err=True, nl=False)
        return EXIT_USAGE if isinstance(exc, ConfigError) else EXIT_NUMERICAL

    return EXIT_OK


def main(argv: ty.Optional[ty.Sequence[str]] = None) -> int:
    """Console entry point."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_args(argv)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    if config is None:
        return EXIT_OK
    return run(config)
