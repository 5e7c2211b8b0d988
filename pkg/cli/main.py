import logging
from functools import wraps
from pathlib import Path
from typing import List, Optional, Tuple

import jsonschema
import typer
from pydantic import ValidationError
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

# Load environment variables from .env file
load_dotenv()

from g2moduli.config import config_schema, dump_config, load_config, save_config, section, set_config
from g2moduli.dynamics.trajectory_engine import TrajectoryEngine
from g2moduli.exceptions import G2ModuliError
from g2moduli.geometry.bs_metric import metric_table
from g2moduli.instantons.local_families import Family, seed_jet
from g2moduli.moduli.boundary import locate_boundary
from g2moduli.moduli.classifier import ModuliClassifier
from g2moduli.moduli.scanner import ParameterScanner, parameter_grid, summarize
from g2moduli.reports.portrait import cmd_portrait
from g2moduli.reports.verify import check_names, cmd_verify
from g2moduli.reports.writers import write_frame, write_json, write_records_csv, write_records_json, write_trajectory_csv
from cli.config import CLI_CONFIG
from cli.models import FamilyOption
from cli.stats_handler import ScanStatsHandler
from cli.utils import (
    boundary_table,
    counts_table,
    failed_names,
    frame_preview,
    records_table,
    summary_table,
    verify_table,
)

console = Console()

app = typer.Typer(
    name="g2moduli",
    help="g2moduli CLI: invariant G2-instantons on the Bryant-Salamon metric",
    add_completion=True,  # Enable shell completion
)


def _setup_logging(verbose: bool, quiet: bool):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def handle_errors(func):
    """Map library and validation errors to the usage exit code."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (G2ModuliError, ValidationError, jsonschema.ValidationError) as e:
            console.print(f"[red]Error: {e}[/red]")
            raise typer.Exit(CLI_CONFIG["exit_usage"])
        except OSError as e:
            console.print(f"[red]I/O error: {e}[/red]")
            raise typer.Exit(CLI_CONFIG["exit_usage"])

    return wrapper


def _family(option: FamilyOption) -> Family:
    return Family(option.value)


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", envvar=CLI_CONFIG["config_envvar"], help="JSON run configuration"
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
    quiet: bool = typer.Option(False, "--quiet", "-q", help="Warnings and errors only"),
):
    _setup_logging(verbose, quiet)
    try:
        run_config = load_config(str(config) if config else None)
    except G2ModuliError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(CLI_CONFIG["exit_usage"])
    set_config(run_config.to_dict())
    ctx.obj = {"run_config": run_config, "config": run_config.to_dict()}


@app.command()
@handle_errors
def metric(
    ctx: typer.Context,
    r_min: float = typer.Option(1.0, "--r-min", help="Smallest radius (>= 1)"),
    r_max: float = typer.Option(100.0, "--r-max", help="Largest radius"),
    samples: int = typer.Option(200, "--samples", help="Log-spaced samples"),
    out: Path = typer.Option(Path(CLI_CONFIG["metric_csv"]), "--out", help="CSV output"),
):
    """Tabulate the metric coefficients A, B and the geodesic distance t."""
    config = ctx.obj["config"]
    frame = metric_table(r_min, r_max, samples, tol=section(config, "metric")["quad_tol"])
    write_frame(frame, str(out), "metric")
    console.print(frame_preview(frame, "Bryant-Salamon metric", CLI_CONFIG["preview_rows"]))
    console.print(f"[green]Wrote {len(frame)} rows to {out}[/green]")


@app.command()
@handle_errors
def integrate(
    ctx: typer.Context,
    family: FamilyOption = typer.Option(..., "--family", help="Local family"),
    param: float = typer.Option(..., "--param", help="gamma (tgamma) or gamma' (tprime)"),
    t0: Optional[float] = typer.Option(None, "--t0", help="Seed time"),
    t_max: Optional[float] = typer.Option(None, "--t-max", help="Integration horizon"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Relative tolerance"),
    out: Path = typer.Option(Path(CLI_CONFIG["trajectory_csv"]), "--out", help="CSV output"),
):
    """Integrate one family member from its series seed and classify it."""
    config = ctx.obj["config"]
    trajectory = TrajectoryEngine(config).integrate(seed_jet(_family(family), param), t0=t0, t_max=t_max, rtol=tol)
    write_trajectory_csv(trajectory, str(out))
    record = ModuliClassifier(config).classify(trajectory)

    summary = trajectory.summary()
    summary["outcome"] = record.outcome.value
    if record.fitted_exponent is not None:
        summary.update(mu=record.mu, nu=record.nu, fitted_exponent=record.fitted_exponent)
    console.print(summary_table(summary, f"{_family(family).label} = {param:g}"))
    console.print(f"[green]Wrote {len(trajectory)} samples to {out}[/green]")


@app.command()
@handle_errors
def scan(
    ctx: typer.Context,
    family: FamilyOption = typer.Option(..., "--family", help="Local family"),
    start: Optional[float] = typer.Option(None, "--from", help="First parameter (default: config grid)"),
    stop: Optional[float] = typer.Option(None, "--to", help="Last parameter (default: config grid)"),
    step: Optional[float] = typer.Option(None, "--step", help="Grid step (default: config grid)"),
    out: Path = typer.Option(Path(CLI_CONFIG["scan_json"]), "--out", help="JSON records"),
    csv: Optional[Path] = typer.Option(None, "--csv", help="Optional CSV summary"),
    workers: Optional[int] = typer.Option(None, "--workers", min=1, help="Process pool size"),
):
    """Classify every member of a family over a parameter grid."""
    config = dict(ctx.obj["config"])
    if workers is not None:
        config["workers"] = workers
    grid = section(config, "grids")[family.value]
    start = grid["start"] if start is None else start
    stop = grid["stop"] if stop is None else stop
    step = grid["step"] if step is None else step
    total = len(parameter_grid(start, stop, step))

    stats = ScanStatsHandler()
    progress = Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )
    with progress:
        task = progress.add_task(f"Scanning {family.value}", total=total)

        def on_record(record):
            stats.on_record(record)
            progress.update(task, advance=1, description=f"Scanning {family.value} ({stats.describe()})")

        records = ParameterScanner(config).scan(_family(family), start, stop, step, on_record=on_record)

    write_records_json(records, str(out))
    if csv is not None:
        write_records_csv(records, str(csv))
    console.print(records_table(records, f"{_family(family).label} scan"))
    console.print(counts_table(summarize(records)))
    snapshot = stats.get_stats()
    if snapshot["errors"]:
        console.print(f"[yellow]{snapshot['errors']} of {snapshot['completed']} run(s) failed and were recorded as Inconclusive[/yellow]")
    console.print(f"[green]Wrote {len(records)} records to {out}[/green]")


@app.command()
@handle_errors
def boundary(
    ctx: typer.Context,
    family: FamilyOption = typer.Option(..., "--family", help="Local family"),
    bracket: Tuple[float, float] = typer.Option(..., "--bracket", help="LO HI straddling the boundary"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Bracket width to stop at"),
    out: Optional[Path] = typer.Option(None, "--out", help="Optional JSON output"),
):
    """Bisect a bracket for the edge of the moduli space."""
    result = locate_boundary(_family(family), bracket, tol, ctx.obj["config"])
    console.print(boundary_table(result))
    console.print(
        Panel(
            f"critical parameter [bold]{result.gamma_crit:+.9f}[/bold]\n"
            f"bracket [{result.lo:+.9f}, {result.hi:+.9f}] after {result.iterations} bisections"
            + (" (reflected)" if result.reflected else ""),
            title="Boundary",
            border_style="green",
        )
    )
    if out is not None:
        write_json(result.to_dict(), str(out))


@app.command()
@handle_errors
def portrait(
    ctx: typer.Context,
    out_dir: Optional[Path] = typer.Option(None, "--out-dir", help="Output directory (default: <results_dir>/portrait)"),
):
    """Write the phase portrait data and SVG figure."""
    files = cmd_portrait(ctx.obj["config"], str(out_dir) if out_dir else None)
    for kind, path in files.as_dict().items():
        console.print(f"[green]{kind}[/green]: {path}")


@app.command()
@handle_errors
def verify(
    ctx: typer.Context,
    out: Path = typer.Option(Path(CLI_CONFIG["verify_json"]), "--out", help="JSON report"),
    only: Optional[List[str]] = typer.Option(None, "--only", help="Run only the named check (repeatable)"),
):
    """Run the invariant suite; exit 1 if any check fails."""
    if only:
        unknown = sorted(set(only) - set(check_names()))
        if unknown:
            console.print(f"[red]Unknown check(s): {', '.join(unknown)}[/red]")
            raise typer.Exit(CLI_CONFIG["exit_usage"])
    exit_code, report = cmd_verify(ctx.obj["config"], str(out), only or None)
    console.print(verify_table(report))
    if exit_code != CLI_CONFIG["exit_ok"]:
        console.print(f"[bold red]{len(report.failures)} check(s) failed: {', '.join(failed_names(report))}[/bold red]")
        raise typer.Exit(CLI_CONFIG["exit_check_failed"])
    console.print(f"[green]All {len(report.results)} checks passed[/green]")


@app.command("config")
@handle_errors
def show_config(
    ctx: typer.Context,
    schema: bool = typer.Option(False, "--schema", help="Print the JSON schema instead"),
    out: Optional[Path] = typer.Option(None, "--out", help="Also save the effective config here"),
):
    """Print the effective configuration as JSON."""
    run_config = ctx.obj["run_config"]
    if schema:
        console.print_json(data=config_schema())
        return
    console.print_json(dump_config(run_config))
    if out is not None:
        save_config(run_config, str(out))


if __name__ == "__main__":
    app()
