"""
Command-line entry point for the three-mode entanglement toolkit.

Every subcommand merges its flags over an optional --config file, runs one
service and prints a JSON report (CSV for sweeps) on stdout. Logs go to
stderr. Exit codes: 0 success, 2 configuration/data errors, 3 numerical
contract violations, 1 anything unexpected.
"""

import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import click

from config import (
    DEFAULT_SETTINGS,
    RunConfig,
    Settings,
    load_settings,
    parse_config,
    resolve_output,
)
from services.classical_service import ClassicalService
from services.conditional_service import ConditionalService
from services.dynamics_service import DynamicsService
from services.teleclone_service import TelecloneService
from trimode.classical import CSV_COLUMNS
from trimode.conditional import SWEEP_COLUMNS
from trimode.errors import ConfigError, TrimodeError

logger = logging.getLogger(__name__)

COMMANDS = (
    "dynamics",
    "covariance",
    "ppt",
    "state",
    "teleclone",
    "teleclone-mc",
    "twb",
    "classical-sweep",
    "classical-compare",
)
COMPARE_COLUMNS = ("line", "e5_joules", "e2_joules", "predicted", "residual")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

Payload = Union[Dict[str, Any], List[dict]]


def run_command(name: str, run_config: RunConfig,
                dump_path: Optional[Path] = None) -> Tuple[int, Payload, Tuple[str, ...]]:
    """
    Dispatch one subcommand.

    Returns:
        (exit code, report dict or CSV rows, CSV columns; empty for JSON)
    """
    if name not in COMMANDS:
        raise click.UsageError(f"unknown command '{name}'")

    if name in ("dynamics", "covariance", "ppt", "state"):
        service = DynamicsService(run_config)
        if name == "state":
            report = service.state(dump_path)
        else:
            report = getattr(service, name)()
    elif name == "teleclone":
        report = TelecloneService(run_config).teleclone()
    elif name == "teleclone-mc":
        report = TelecloneService(run_config).teleclone_mc()
    elif name == "twb":
        service = ConditionalService(run_config)
        if run_config.n2_grid or run_config.n3_grid:
            if run_config.format == "json":
                report = service.twb_sweep()
            else:
                return 0, service.sweep_rows(), SWEEP_COLUMNS
        else:
            report = service.twb()
    elif name == "classical-sweep":
        service = ClassicalService(run_config)
        if run_config.format == "json":
            report = service.sweep()
        else:
            return 0, service.sweep_rows(), CSV_COLUMNS
    else:
        report = ClassicalService(run_config).compare()
        if report["success"] and run_config.format == "csv":
            return 0, report["rows"], COMPARE_COLUMNS

    if not report.get("success"):
        return report.get("exit_code", 1), report, ()
    return 0, report, ()


def render_json(report: Dict[str, Any]) -> str:
    """JSON with the only time-dependent value confined to generated_at"""
    document = {"generated_at": datetime.now(timezone.utc).isoformat()}
    document.update(report)
    return json.dumps(document, indent=2, sort_keys=True)


def render_csv(rows: List[dict], columns) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: repr(value) if isinstance(value, float) else value
                         for key, value in row.items()})
    return buffer.getvalue()


def error_document(error: Exception) -> Dict[str, Any]:
    if isinstance(error, TrimodeError):
        return error.to_dict()
    return {
        "success": False,
        "error": str(error),
        "error_type": type(error).__name__,
        "exit_code": 1,
    }


def _run_config(ctx: click.Context, overrides: Dict[str, Any]) -> RunConfig:
    """Parse flags over the config file, reporting group-level problems alongside"""
    violations = list(ctx.obj["violations"])
    try:
        run_config = parse_config(ctx.obj["config_text"], overrides, ctx.obj["settings"])
    except ConfigError as e:
        raise ConfigError(violations + e.violations)
    if violations:
        raise ConfigError(violations)
    return run_config


def _execute(ctx: click.Context, name: str, overrides: Dict[str, Any],
             dump_path: Optional[str] = None):
    settings: Settings = ctx.obj["settings"]
    try:
        run_config = _run_config(ctx, overrides)
        code, payload, columns = run_command(
            name, run_config, Path(dump_path) if dump_path else None
        )
        text = render_csv(payload, columns) if columns else render_json(payload)
        if code == 0:
            path = resolve_output(run_config, settings)
            if path is not None:
                path.write_text(text)
                logger.info(f"Report written to {path}")
    except click.UsageError:
        raise
    except Exception as e:
        if not isinstance(e, TrimodeError):
            logger.exception(f"{name} failed unexpectedly")
        code, text = error_document(e)["exit_code"], render_json(error_document(e))
    click.echo(text, nl=not text.endswith("\n"))
    ctx.exit(code)


def coupling_options(func):
    """Reduced (--ratio/--omega-t) or physical (--gamma1/--gamma2/--time) couplings"""
    options = [
        click.option("--ratio", help="|gamma1/gamma2|"),
        click.option("--omega-t", "omega_t", help="|Omega| t (|gamma2| t at ratio 1)"),
        click.option("--gamma1", help="|gamma1| in 1/time"),
        click.option("--gamma2", help="|gamma2| in 1/time"),
        click.option("--phase1", help="arg gamma1 (rad), default 0"),
        click.option("--phase2", help="arg gamma2 (rad), default 0"),
        click.option("--time", "t", help="interaction time"),
        click.option("--symmetric", is_flag=True, help="use the N2 = N3 point of --ratio"),
        click.option("--include-hyperbolic", "include_hyperbolic", is_flag=True,
                     help="allow symmetric points with 1 < ratio < sqrt(2)"),
        click.option("--output", help="report file (relative paths go under TRIMODE_OUTPUT_DIR)"),
        click.option("--format", "format", help="report format: json or csv"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def classical_options(func):
    options = [
        click.option("--unit", help="unit of energy values: J (default) or mJ"),
        click.option("--c1", help="coupling c1 in 1/(J m^2), default 8.3e4"),
        click.option("--c2", help="coupling c2 in 1/(J m^2), default 2.6e5"),
        click.option("--e1", help="seed energy, default 0.024 J"),
        click.option("--e4", help="extraordinary pump energy, default 0.158 J"),
        click.option("--length", "crystal_length", help="crystal length in m, default 0.004"),
        click.option("--omega-ratio", "omega_ratio", help="w2/w1, default 1064/355"),
        click.option("--output", help="report file (relative paths go under TRIMODE_OUTPUT_DIR)"),
        click.option("--format", "format", help="report format: json or csv"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _overrides(params: Dict[str, Any]) -> Dict[str, Any]:
    """Drop unset flags so the config file keeps its values"""
    return {key: value for key, value in params.items() if value is not None and value is not False}


@click.group()
@click.option("--config", "config_path", help="key=value file; flags override its entries")
@click.option("--log-level", help="DEBUG, INFO, WARNING or ERROR; defaults to TRIMODE_LOG_LEVEL or INFO")
@click.option("--env-file", type=click.Path(dir_okay=False), help=".env file to load")
@click.pass_context
def cli(ctx, config_path, log_level, env_file):
    """Three-mode entanglement: dynamics, telecloning, twin beams, classical model."""
    ctx.ensure_object(dict)
    violations = []
    try:
        settings = load_settings(env_file)
    except ConfigError as e:
        violations.extend(e.violations)
        settings = DEFAULT_SETTINGS

    level = (log_level or settings.log_level).upper()
    if level not in LOG_LEVELS:
        violations.append(f"log level must be one of {', '.join(LOG_LEVELS)}, got '{level}'")
        level = "INFO"
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )

    config_text = ""
    if config_path:
        try:
            config_text = Path(config_path).read_text()
        except (OSError, UnicodeDecodeError) as e:
            violations.append(f"cannot read config file {config_path}: {str(e)}")
    ctx.obj["settings"] = settings
    ctx.obj["config_text"] = config_text
    ctx.obj["violations"] = violations


@cli.command()
@coupling_options
@click.option("--alpha", help="seed amplitude, e.g. 1+1j")
@click.pass_context
def dynamics(ctx, **params):
    """Heisenberg coefficients, populations and symmetric point."""
    _execute(ctx, "dynamics", _overrides(params))


@cli.command()
@coupling_options
@click.pass_context
def covariance(ctx, **params):
    """Quadrature covariance matrix of the evolved vacuum."""
    _execute(ctx, "covariance", _overrides(params))


@cli.command()
@coupling_options
@click.pass_context
def ppt(ctx, **params):
    """Partial-transpose eigenvalues of the three single-mode cuts."""
    _execute(ctx, "ppt", _overrides(params))


@cli.command()
@coupling_options
@click.option("--alpha", help="seed amplitude, e.g. 1+1j")
@click.option("--cutoff", help="photons per mode (default: tail policy)")
@click.option("--dump", "dump_path", type=click.Path(dir_okay=False), help="binary amplitude dump")
@click.pass_context
def state(ctx, dump_path, **params):
    """Truncated Fock state checked against the closed forms."""
    _execute(ctx, "state", _overrides(params), dump_path)


@cli.command()
@coupling_options
@click.option("--n2", help="population N2 (instead of couplings)")
@click.option("--n3", help="population N3 (instead of couplings)")
@click.option("--f3", "f3_target", help="asymmetric frontier target F3 in [1/2, 2/3]")
@click.pass_context
def teleclone(ctx, **params):
    """Closed-form clone fidelities."""
    _execute(ctx, "teleclone", _overrides(params))


@cli.command("teleclone-mc")
@coupling_options
@click.option("--z", help="input coherent amplitude, e.g. 2+1j")
@click.option("--alpha", help="seed amplitude for the seeded protocol")
@click.option("--samples", help="Monte-Carlo samples (>= 1000, default 100000)")
@click.option("--seed", help="RNG seed (default TRIMODE_DEFAULT_SEED or 0)")
@click.option("--workers", help="threads for chunk evaluation")
@click.pass_context
def teleclone_mc(ctx, **params):
    """Monte-Carlo telecloning protocol."""
    _execute(ctx, "teleclone-mc", _overrides(params))


@cli.command()
@coupling_options
@click.option("--eta", help="detector efficiency in [0, 1], default 1")
@click.option("--xi", help="reference twin-beam parameter")
@click.option("--detected-mode", "detected_mode", help="1, 2 or 3 (default 3)")
@click.option("--n2", help="population N2 (instead of couplings)")
@click.option("--n3", help="population N3 (instead of couplings)")
@click.option("--cutoff", help="also evaluate on the truncated Fock state")
@click.option("--n2-grid", "n2_grid", help="comma-separated N2 values for a CSV sweep")
@click.option("--n3-grid", "n3_grid", help="comma-separated N3 values for a CSV sweep")
@click.option("--eta-grid", "eta_grid", help="comma-separated efficiencies for a CSV sweep")
@click.pass_context
def twb(ctx, **params):
    """Conditional twin beam by on/off detection."""
    _execute(ctx, "twb", _overrides(params))


@cli.command("classical-sweep")
@classical_options
@click.option("--from", "e5_from", help="first pump energy, default 0")
@click.option("--to", "e5_to", help="last pump energy, default 0.1 J")
@click.option("--steps", help="grid points, default 50")
@click.option("--e5", help="also report a single pump energy")
@click.pass_context
def classical_sweep(ctx, **params):
    """Predicted output energy E2 over a pump-energy grid (CSV by default)."""
    _execute(ctx, "classical-sweep", _overrides(params))


@cli.command("classical-compare")
@click.argument("data")
@classical_options
@click.pass_context
def classical_compare(ctx, **params):
    """Residuals of measured (e5_joules, e2_joules) rows against the model."""
    _execute(ctx, "classical-compare", _overrides(params))


if __name__ == "__main__":
    cli(obj={})
