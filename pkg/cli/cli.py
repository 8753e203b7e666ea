import json
import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Optional

import typer

from chain_rule.chain_rule import compose_jet
from chain_rule.derivative_tensor import DerivativeTensor, MapJet
from chain_rule.faa_di_bruno import faa_di_bruno_1d
from chain_rule.scalar import ArithmeticMode
from chain_rule.symbolic import expand_symbolic, render_text
from cli.log_setup import setup_logger
from multiset_core.multiset_index import MultisetIndex, from_labels
from params.cli_config import CliConfig
from params.verify_params import VerifyParams
from partitions.multiset_partitions import multiset_partitions
from partitions.stirling import stirling2
from verifier.verifier import run_verification

VERSION = "1.0.0"
FAA1D_MAX_ORDER = 12

EXIT_MISMATCH = 1
EXIT_USAGE = 2

logger = logging.getLogger("CLI")

app = typer.Typer(
    add_completion=False,
    no_args_is_help=True,
    help="Multivariate higher-order chain rule over multiset indices."
)


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)


def _abort(message: str):
    """
    Logs the problem, repeats it on stderr and leaves with the usage/input exit code.
    """
    logger.critical(message)
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(code=EXIT_USAGE)


@contextmanager
def _input_errors(what: str):
    """
    Turns library errors (all ``ValueError`` subclasses), JSON decoding errors
    and unreadable files into exit code 2.
    """
    try:
        yield
    except (ValueError, OSError) as e:
        _abort(f"{what}: {e}")


def _session(ctx: typer.Context) -> CliConfig:
    return ctx.obj["cli"]


def _read_index(alpha: str | None, labels: str | None, dim: int | None) -> MultisetIndex:
    """
    Reads ``--alpha '[2,1]'`` (multiplicity vector) or ``--labels 1,1,2``; exactly one is allowed.
    """
    if (alpha is None) == (labels is None):
        _abort("give exactly one of `--alpha` and `--labels`")

    if alpha is not None:
        with _input_errors("invalid `--alpha`"):
            return MultisetIndex.from_json(json.loads(alpha))

    with _input_errors("invalid `--labels`"):
        parsed = [int(label) for label in labels.split(",") if label.strip()]
        return from_labels(dim if dim is not None else max(parsed, default=1), parsed)


def _load_config(path: Path) -> tuple[dict, str | None]:
    """
    :return: configuration and an optional warning to log once logging is set up
    """
    if not path.exists():
        return {}, f"`{path}` not found: default parameters will be used"

    try:
        with open(path, "r", encoding="utf-8") as config_file:
            config = json.load(config_file)
    except json.JSONDecodeError as e:
        setup_logger(False)
        _abort(f"JSONDecodeError: failed to parse `{path}`: {e}")

    if not isinstance(config, dict):
        setup_logger(False)
        _abort(f"`{path}` must contain a JSON object")
    return config, None


@app.callback()
def main_callback(
        ctx: typer.Context,
        output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write the result here instead of stdout."),
        mode: Optional[ArithmeticMode] = typer.Option(None, "--mode", help="Scalar arithmetic."),
        config: Path = typer.Option(Path("config.json"), "--config", help="Configuration file."),
        debug: bool = typer.Option(False, "--debug", help="Enable debugging logs.")
):
    config_payload, warning = _load_config(config)
    setup_logger(debug or bool(config_payload.get("debug", False)), bool(config_payload.get("log_to_file", False)))
    if warning is not None:
        logger.warning(warning)

    logger.debug(f"Multiset chain rule toolkit, version {VERSION}")

    with _input_errors("invalid global flags"):
        cli_config = CliConfig(logger, ctx.invoked_subcommand, output, mode)

    ctx.obj = {"cli": cli_config, "config": config_payload}


@app.command()
def partitions(
        ctx: typer.Context,
        alpha: Optional[str] = typer.Option(None, "--alpha", help="Index as a multiplicity vector, e.g. '[2,1]'."),
        labels: Optional[str] = typer.Option(None, "--labels", help="Index as labels, e.g. '1,1,2'."),
        dim: Optional[int] = typer.Option(None, "--dim", help="Number of variables for `--labels`."),
        k: int = typer.Option(..., "-k", "--k", min=0, help="Number of blocks."),
        counts_only: bool = typer.Option(False, "--counts-only", help="Print only the counts.")
):
    """
    Enumerates the partitions of an index into k blocks, with multiplicities.
    """
    session = _session(ctx)
    index = _read_index(alpha, labels, dim)

    enumeration = multiset_partitions(index, k)
    if counts_only:
        session.emit(_dumps({
            "distinct": enumeration.distinct(),
            "cardinality": enumeration.cardinality(),
            "stirling2": stirling2(index.cardinality(), k)
        }))
    else:
        session.emit(_dumps(enumeration.to_json()))


@app.command()
def expand(
        ctx: typer.Context,
        alpha: Optional[str] = typer.Option(None, "--alpha", help="Index as a multiplicity vector, e.g. '[1,1]'."),
        labels: Optional[str] = typer.Option(None, "--labels", help="Index as labels, e.g. '1,2'."),
        dim: Optional[int] = typer.Option(None, "--dim", help="Number of variables for `--labels`."),
        c: int = typer.Option(..., "-c", help="Number of components of g."),
        output_format: OutputFormat = typer.Option(OutputFormat.TEXT, "--format", help="Rendering.")
):
    """
    Prints the symbolic chain-rule expansion of ∂_α(f∘g).
    """
    session = _session(ctx)
    index = _read_index(alpha, labels, dim)

    with _input_errors("cannot expand"):
        expansion = expand_symbolic(index, c)

    if output_format is OutputFormat.TEXT:
        session.emit(render_text(expansion))
    else:
        session.emit(_dumps(expansion.to_json()))


@app.command()
def compose(
        ctx: typer.Context,
        f_jet: Path = typer.Argument(..., help="DerivativeTensor JSON of f at g(x)."),
        g_jet: Path = typer.Argument(..., help="MapJet JSON of g at x."),
        n: int = typer.Option(..., "-n", help="Order of the composed jet.")
):
    """
    Composes two jets into the derivative tensor of f∘g up to order N.
    """
    session = _session(ctx)

    with _input_errors(f"cannot read `{f_jet}`"):
        f_tensor = DerivativeTensor.from_json(json.loads(f_jet.read_text(encoding="utf-8")))
    with _input_errors(f"cannot read `{g_jet}`"):
        g_map = MapJet.from_json(json.loads(g_jet.read_text(encoding="utf-8")))

    mode = session.get_mode()
    if mode is not None:
        f_tensor, g_map = f_tensor.with_mode(mode), g_map.with_mode(mode)

    with _input_errors("cannot compose"):
        composed = compose_jet(f_tensor, g_map, n)

    session.emit(_dumps(composed.to_json()))


@app.command()
def faa1d(
        ctx: typer.Context,
        n: int = typer.Argument(..., help=f"Derivative order, 1..{FAA1D_MAX_ORDER}."),
        output_format: OutputFormat = typer.Option(OutputFormat.JSON, "--format", help="Rendering.")
):
    """
    Prints the one-variable coefficient table of the n-th derivative of f(g(x)).
    """
    session = _session(ctx)
    if not 1 <= n <= FAA1D_MAX_ORDER:
        _abort(f"order must be within 1..{FAA1D_MAX_ORDER}, got {n}")

    terms = faa_di_bruno_1d(n)
    if output_format is OutputFormat.JSON:
        session.emit(_dumps({"n": n, "terms": [term.to_json() for term in terms]}))
        return

    rows = [f"k={term.k}  m=({','.join(str(count) for count in term.m)})  coefficient={term.coefficient}"
            for term in terms]
    session.emit("\n".join(rows))


@app.command()
def verify(
        ctx: typer.Context,
        trials: Optional[int] = typer.Option(None, "--trials", help="Random trials per suite."),
        seed: Optional[int] = typer.Option(None, "--seed", help="Base seed."),
        max_order: Optional[int] = typer.Option(None, "--max-order", help="Highest derivative order."),
        dims: Optional[str] = typer.Option(None, "--dims", help="Largest input and output dimensions, 'd,c'.")
):
    """
    Runs every self-verification suite; exit code 1 when any check fails.
    """
    session = _session(ctx)
    verify_section = ctx.obj["config"].get("verify_params", {})

    with _input_errors("invalid verification parameters"):
        params = VerifyParams(logging.getLogger("Verifier"), verify_section if isinstance(verify_section, dict) else {})
        params.override(trials=trials, seed=seed, max_order=max_order, dims=dims)

    report = run_verification(params, session.get_mode(ArithmeticMode.RATIONAL))
    session.emit(report.dumps())

    if not report.passed:
        raise typer.Exit(code=EXIT_MISMATCH)
