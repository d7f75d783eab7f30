import csv
import io
import json
import logging
import time
from enum import Enum
from functools import wraps
from pathlib import Path
from typing import Optional

import click
import typer
import yaml
from pydantic import BaseModel, ValidationError
from rich.console import Console
from rich.table import Table
from sympy import isprime

from toroidal.catalog import get_example
from toroidal.exceptions import (
    AppError,
    EtdError,
    EtdFileError,
    InvalidSettingsError,
    LatticeError,
    MonoidError,
    NotPrimeError,
)
from toroidal.schemas.etd import EtdFile
from toroidal.schemas.report import Report, Verdict

logger = logging.getLogger(__name__)


class OutputFormat(str, Enum):
    json = "json"
    csv = "csv"
    text = "text"


class FieldMode(str, Enum):
    lattice = "lattice"
    reductions = "reductions"


class CliOptions(BaseModel):
    """Global options, stored on the typer context by the app callback."""

    output_format: OutputFormat = OutputFormat.json
    jobs: int = 1
    window: Optional[int] = None


def cli_options(ctx: typer.Context) -> CliOptions:
    if isinstance(ctx.obj, CliOptions):
        return ctx.obj
    return CliOptions()


def resolve_window(ctx: typer.Context, window: Optional[int]) -> Optional[int]:
    """Command option, then global option; None defers to the file and settings."""
    return window if window is not None else cli_options(ctx).window


def handle_command_exceptions(func):
    """
    Decorator mapping service exceptions to exit codes:
    unreadable input or bad usage -> 2, failed validation -> 1 with the
    witness on stdout, anything unexpected -> 2.
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)

        except (
            typer.Exit,
            typer.Abort,
            typer.BadParameter,
            click.exceptions.Exit,
            click.exceptions.Abort,
            click.ClickException,
        ):
            raise

        except EtdFileError as e:
            logger.warning(f"Unreadable ETD input in {func.__name__}: {str(e)}")
            typer.echo(str(e), err=True)
            for diagnostic in e.diagnostics:
                typer.echo(json.dumps(diagnostic, sort_keys=True), err=True)
            raise typer.Exit(code=2)

        except (NotPrimeError, InvalidSettingsError) as e:
            logger.warning(f"Invalid arguments in {func.__name__}: {str(e)}")
            typer.echo(str(e), err=True)
            raise typer.Exit(code=2)

        except (EtdError, MonoidError, LatticeError) as e:
            logger.warning(f"Validation failed in {func.__name__}: {str(e)}")
            witness = dict(getattr(e, "witness", {}) or {})
            missing = getattr(e, "missing", None)
            if missing is not None:
                witness["missing"] = list(missing)
            report = Report(
                command=func.__name__,
                etd="",
                input_fingerprint="",
                verdicts=[Verdict(name=type(e).__name__, passed=False, detail=str(e))],
                witnesses=[witness] if witness else [],
            )
            typer.echo(report.model_dump_json(indent=2))
            raise typer.Exit(code=1)

        except AppError as e:
            logger.error(f"Unhandled application error in {func.__name__}: {str(e)}")
            typer.echo(str(e), err=True)
            raise typer.Exit(code=2)

        except Exception as e:
            logger.error(f"Unexpected error in {func.__name__}: {str(e)}")
            typer.echo(f"Unexpected error: {e}", err=True)
            raise typer.Exit(code=2)

    return wrapper


# ----------------------------------------------------------------------
# input
# ----------------------------------------------------------------------


def read_etd_file(path: Path) -> EtdFile:
    """Parses a .json, .yaml or .yml ETD file into an EtdFile."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise EtdFileError(f"Cannot read {path}: {e.strerror}")

    if path.suffix.lower() in (".yaml", ".yml"):
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise EtdFileError(
                f"{path} is not valid YAML",
                diagnostics=[{"line": line, "message": str(e)}],
            )
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise EtdFileError(
                f"{path} is not valid JSON",
                diagnostics=[{"line": e.lineno, "column": e.colno, "message": e.msg}],
            )
    return parse_etd_data(data, source=str(path))


def parse_etd_data(data, source: str = "<input>") -> EtdFile:
    try:
        return EtdFile.model_validate(data)
    except ValidationError as e:
        diagnostics = [
            {
                "field": ".".join(str(part) for part in error["loc"]),
                "message": error["msg"],
            }
            for error in e.errors()
        ]
        raise EtdFileError(f"{source} does not describe an ETD", diagnostics=diagnostics)


def load_etd_file(path: Optional[Path], example: Optional[str]) -> EtdFile:
    if example is not None:
        return get_example(example)
    if path is None:
        raise EtdFileError(
            "Give an ETD file or --example NAME",
            diagnostics=[{"field": "path", "message": "missing"}],
        )
    return read_etd_file(path)


def parse_primes(value: Optional[str]) -> Optional[list[int]]:
    """Typer callback for comma separated prime lists."""
    if value is None:
        return None
    try:
        numbers = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"{value!r} is not a comma separated list of integers")
    for p in numbers:
        if not isprime(p):
            raise typer.BadParameter(f"{p} is not a prime")
    return numbers


def check_prime_option(value: Optional[int]) -> Optional[int]:
    if value is not None and value != 0 and not isprime(value):
        raise typer.BadParameter(f"{value} is not a prime")
    return value


def parse_vectors(value: Optional[str]) -> Optional[list[tuple[int, ...]]]:
    """Typer callback for vectors written as '1,1;2,0'."""
    if value is None:
        return None
    try:
        return [
            tuple(int(x) for x in chunk.split(","))
            for chunk in value.split(";")
            if chunk.strip()
        ]
    except ValueError:
        raise typer.BadParameter(f"{value!r} is not a list of integer vectors")


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------


def new_report(command: str, etd_file: EtdFile, **arguments) -> Report:
    return Report(
        command=command,
        etd=etd_file.name,
        input_fingerprint=etd_file.fingerprint(),
        arguments={k: v for k, v in arguments.items() if v is not None},
    )


def _cell(value) -> str:
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, default=str)
    return str(value)


def render(report: Report, output_format: OutputFormat) -> str:
    if output_format == OutputFormat.json:
        return report.model_dump_json(indent=2)

    if output_format == OutputFormat.csv:
        rows = report.model_dump(mode="json")["witnesses"]
        columns = list(dict.fromkeys(key for row in rows for key in row))
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: _cell(row.get(key, "")) for key in columns})
        return buffer.getvalue()

    console = Console(file=io.StringIO(), width=120, color_system=None)
    verdicts = Table(title=f"{report.command} {report.etd}")
    verdicts.add_column("verdict")
    verdicts.add_column("passed")
    verdicts.add_column("detail")
    for verdict in report.verdicts:
        verdicts.add_row(verdict.name, "yes" if verdict.passed else "NO", verdict.detail)
    console.print(verdicts)
    for key, value in report.model_dump(mode="json")["dims"].items():
        console.print(f"{key}: {_cell(value)}")
    if report.witnesses:
        rows = report.model_dump(mode="json")["witnesses"]
        columns = list(dict.fromkeys(key for row in rows for key in row))
        table = Table()
        for column in columns:
            table.add_column(column)
        for row in rows:
            table.add_row(*(_cell(row.get(key, "")) for key in columns))
        console.print(table)
    return console.file.getvalue()


def finish(report: Report, output_format: OutputFormat, started: float) -> None:
    """Prints the report and exits 0 when every verdict passed, 1 otherwise."""
    report = report.model_copy(
        update={"timing_ms": round((time.perf_counter() - started) * 1000, 3)}
    )
    typer.echo(render(report, output_format))
    if not report.passed:
        logger.warning(
            f"{report.command} on {report.etd}: "
            f"{sum(not v.passed for v in report.verdicts)} verdicts failed"
        )
        raise typer.Exit(code=1)
