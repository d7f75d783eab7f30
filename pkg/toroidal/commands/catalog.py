"""Commands that work on ETD files and reports rather than on the math."""

import json
import logging
import time
from pathlib import Path
from typing import Optional

import typer

from toroidal.commands.common import (
    cli_options,
    finish,
    handle_command_exceptions,
    load_etd_file,
    parse_vectors,
)
from toroidal.dependencies import get_catalog, get_degeneration_service
from toroidal.schemas.etd import EtdFile
from toroidal.schemas.report import Report, Verdict

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("catalog")
@handle_command_exceptions
def catalog(ctx: typer.Context):
    """List the built-in ETDs."""
    started = time.perf_counter()
    report = Report(command="catalog", etd="", input_fingerprint="")
    report.witnesses = [
        {
            "name": name,
            "ambient_rank": etd_file.ambient_rank,
            "p_generators": len(etd_file.p_generators),
            "q_generators": len(etd_file.q_generators),
            "facets": etd_file.facets,
            "fingerprint": etd_file.fingerprint(),
        }
        for name, etd_file in sorted(get_catalog().items())
    ]
    finish(report, cli_options(ctx).output_format, started)


@router.command("export")
@handle_command_exceptions
def export(
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    output: Optional[Path] = typer.Option(None, "--output", "-o"),
):
    """Write the canonical JSON of an ETD file."""
    etd_file = load_etd_file(path, example)
    text = json.dumps(etd_file.model_dump(mode="json"), indent=2, sort_keys=True)
    if output is None:
        typer.echo(text)
    else:
        output.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote {etd_file.name} to {output}")


@router.command("schema")
@handle_command_exceptions
def schema(
    kind: str = typer.Argument("report", help="'report' or 'etd'"),
):
    """Print the JSON schema of reports or of ETD files."""
    models = {"report": Report, "etd": EtdFile}
    if kind not in models:
        raise typer.BadParameter(f"{kind!r} is not one of {sorted(models)}")
    typer.echo(json.dumps(models[kind].model_json_schema(), indent=2, sort_keys=True))


@router.command("simplex")
@handle_command_exceptions
def simplex(
    ctx: typer.Context,
    edges: str = typer.Option(
        ..., "--edges", callback=parse_vectors, help="Edge vectors from 0, e.g. '1,0;0,1'"
    ),
):
    """Decide whether a lattice simplex is elementary and whether it is standard."""
    started = time.perf_counter()
    service = get_degeneration_service()
    datum = service.simplex_from_edges(edges)
    elementary = service.is_elementary(datum)
    standard = service.is_standard(datum)
    report = Report(
        command="simplex",
        etd="",
        input_fingerprint="",
        arguments={"edges": [list(v) for v in edges]},
        dims={
            "dimension": datum.dimension,
            "ambient_rank": datum.ambient_rank,
            "elementary": elementary,
            "standard": standard,
        },
        verdicts=[
            Verdict(
                name="standard_implies_elementary",
                passed=elementary or not standard,
                detail="a standard simplex has no lattice points besides its vertices",
            )
        ],
    )
    finish(report, cli_options(ctx).output_format, started)
