"""
Typer application: ``python -m src estimate|bandwidth|verify|simulate``.

Data goes to stdout (or --out), logs and the verify summary to stderr. Exit codes:
0 success, 1 failed acceptance criteria, 2 parse errors, 3 domain errors,
4 unsupported asymptotics, 5 numerical failures.
"""
from pathlib import Path
from typing import Annotated, Any, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from src import __version__
from src.cli.commands import run_command
from src.dtos.kernel import KernelFamily, KernelRole
from src.dtos.request import BandwidthMode, Command, GridSpec, OutputFormat, RunConfig
from src.dtos.response import CommandResponse
from src.errors import DomainError, KdeError
from src.log import configure_logging

app = typer.Typer(help="Asymmetric kernel density estimation for positive data.",
                  no_args_is_help=True, add_completion=False)

InputArg = Annotated[Optional[Path], typer.Argument(help="Observation file, one value per line; '-' or omitted reads stdin.")]
KernelOpt = Annotated[str, typer.Option("--kernel", "-k", help="gamma|lognormal|birnbaum-saunders|inverse-gaussian|reciprocal-inverse-gaussian (or G, LN, BS, IG, RIG).")]
RoleOpt = Annotated[KernelRole, typer.Option("--role", "-r", help="Role of the evaluation point in the weight function.")]
BandwidthOpt = Annotated[str, typer.Option("--bandwidth", "-b", help="plugin | cv | fixed:VALUE")]
GridOpt = Annotated[Optional[str], typer.Option("--grid", help="MIN:MAX:COUNT[:geo|ari]")]
SeedOpt = Annotated[int, typer.Option("--seed", help="Non-negative run seed.")]
FormatOpt = Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format.")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", "-o", help="Output file; stdout when omitted.")]
WorkersOpt = Annotated[int, typer.Option("--workers", "-j", min=1, help="Worker threads.")]
QuickOpt = Annotated[bool, typer.Option("--quick", help="Reduced replication counts and wider tolerances.")]


def _stderr() -> Console:
    return Console(stderr=True, soft_wrap=True)


def parse_bandwidth(text: str) -> tuple[BandwidthMode, Optional[float]]:
    """
    Parse ``plugin``, ``cv`` or ``fixed:VALUE``.

    Raises:
        DomainError: For any other text or a non-numeric value
    """
    mode, _, value = text.strip().partition(":")
    try:
        mode = BandwidthMode(mode.lower())
    except ValueError:
        raise DomainError(f"bandwidth must be plugin, cv or fixed:VALUE, got {text!r}")
    if mode is BandwidthMode.FIXED:
        try:
            return mode, float(value)
        except ValueError:
            raise DomainError(f"fixed bandwidth needs a number, got {value!r}")
    if value:
        raise DomainError(f"{mode.value} bandwidth takes no value, got {text!r}")
    return mode, None


def build_config(command: Command, kernel: str = "gamma", bandwidth: Optional[str] = None,
                 grid: Optional[str] = None, **fields: Any) -> RunConfig:
    """
    Assemble a RunConfig from raw flag values.

    Raises:
        DomainError: If a flag fails to parse or the combination is invalid
    """
    fields["kernel"] = KernelFamily.parse(kernel)
    if bandwidth is not None:
        fields["bandwidth_mode"], fields["sigma"] = parse_bandwidth(bandwidth)
    if grid is not None:
        fields["grid"] = GridSpec.parse(grid)
    try:
        return RunConfig(command=command, **fields)
    except ValidationError as e:
        messages = "; ".join(error["msg"] for error in e.errors())
        raise DomainError(f"invalid {command.value} options: {messages}") from e


def _emit(response: CommandResponse, output_path: Optional[Path]) -> None:
    if response.content:
        if output_path is None:
            typer.echo(response.content, nl=False)
        else:
            output_path.write_text(response.content, encoding="utf-8")
    if response.error:
        _stderr().print(f"[red]error:[/red] {escape(response.error)}")
    if response.status_code != 0:
        raise typer.Exit(code=response.status_code)


def _execute(command: Command, **flags: Any) -> CommandResponse:
    try:
        config = build_config(command, **flags)
    except KdeError as e:
        _emit(CommandResponse(content="", status_code=e.exit_code, error=str(e)), None)
    response = run_command(config)
    if config.command is Command.VERIFY:
        _print_verify_summary(response)
    _emit(response, config.output_path)
    return response


def _print_verify_summary(response: CommandResponse) -> None:
    results = response.details.get("results")
    if not results:
        return
    table = Table(title=f"acceptance suite ({response.processing_time:.1f} s)")
    for column in ("criterion", "result", "measured", "tolerance", "seconds"):
        table.add_column(column)
    for r in results:
        verdict = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(escape(r.name), verdict, f"{r.measured:.4g}", f"{r.tolerance:.4g}", f"{r.seconds:.1f}")
    _stderr().print(table)


def _version(value: bool) -> None:
    if value:
        typer.echo(__version__)
        raise typer.Exit()


@app.callback()
def main(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log at DEBUG level.")] = False,
    log_json: Annotated[bool, typer.Option("--log-json", help="Emit logs as JSON records.")] = False,
    version: Annotated[bool, typer.Option("--version", callback=_version, is_eager=True,
                                          help="Show the version and exit.")] = False,
) -> None:
    configure_logging("DEBUG" if verbose else "WARNING", serialize=log_json)


@app.command()
def estimate(
    input_path: InputArg = None,
    kernel: KernelOpt = "gamma",
    role: RoleOpt = KernelRole.IMPROPER,
    bandwidth: BandwidthOpt = "plugin",
    grid: GridOpt = None,
    output_format: FormatOpt = OutputFormat.CSV,
    out: OutOpt = None,
    workers: WorkersOpt = 1,
    with_approximation: Annotated[bool, typer.Option("--with-approximation",
                                                     help="Add the Gaussian small-sigma approximation column.")] = False,
) -> None:
    """Density estimate on a grid of evaluation points."""
    _execute(Command.ESTIMATE, input_path=input_path, kernel=kernel, role=role, bandwidth=bandwidth, grid=grid,
             output_format=output_format, output_path=out, workers=workers, with_approximation=with_approximation)


@app.command()
def bandwidth(
    input_path: InputArg = None,
    kernel: KernelOpt = "gamma",
    role: RoleOpt = KernelRole.IMPROPER,
    bandwidth: BandwidthOpt = "plugin",
    grid: Annotated[Optional[str], typer.Option("--grid", help="Bandwidth grid MIN:MAX:COUNT[:geo|ari]")] = None,
    output_format: FormatOpt = OutputFormat.CSV,
    out: OutOpt = None,
    workers: WorkersOpt = 1,
    with_cv: Annotated[bool, typer.Option("--with-cv",
                                          help="In plugin mode, add the cross-validation scores.")] = False,
) -> None:
    """Plugin bandwidth, cross-validation profile and asymptotic MISE."""
    _execute(Command.BANDWIDTH, input_path=input_path, kernel=kernel, role=role, bandwidth=bandwidth, grid=grid,
             output_format=output_format, output_path=out, workers=workers, with_cv=with_cv)


@app.command()
def verify(
    seed: SeedOpt = 0,
    quick: QuickOpt = False,
    output_format: FormatOpt = OutputFormat.CSV,
    out: OutOpt = None,
    workers: WorkersOpt = 1,
    tolerance_scale: Annotated[float, typer.Option("--tolerance-scale", hidden=True, min=0.0)] = 1.0,
) -> None:
    """Run the seeded acceptance suite; exits 1 if any criterion fails."""
    _execute(Command.VERIFY, seed=seed, quick=quick, output_format=output_format, output_path=out,
             workers=workers, tolerance_scale=tolerance_scale)


@app.command()
def simulate(
    kernel: KernelOpt = "gamma",
    role: RoleOpt = KernelRole.PROPER,
    grid: Annotated[Optional[str], typer.Option("--grid", help="Bandwidth grid MIN:MAX:COUNT[:geo|ari]")] = None,
    seed: SeedOpt = 0,
    reps: Annotated[int, typer.Option("--reps", min=2, help="Replications.")] = 200,
    n: Annotated[int, typer.Option("--n", min=2, help="Samples per replication.")] = 300,
    mu: Annotated[float, typer.Option("--mu", help="Log-mean of the generating log-normal.")] = 1.0,
    log_sd: Annotated[float, typer.Option("--log-sd", help="Log-standard deviation of the generating log-normal.")] = 1.0,
    quick: QuickOpt = False,
    output_format: FormatOpt = OutputFormat.CSV,
    out: OutOpt = None,
    workers: WorkersOpt = 1,
) -> None:
    """Cross-validation profiles of seeded log-normal replications with envelopes."""
    _execute(Command.SIMULATE, kernel=kernel, role=role, grid=grid, seed=seed, replications=reps, n=n, mu=mu,
             log_sd=log_sd, quick=quick, output_format=output_format, output_path=out, workers=workers)
