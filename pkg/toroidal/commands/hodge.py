import logging
import time
from pathlib import Path
from typing import Optional

import typer

from toroidal.commands.common import (
    FieldMode,
    check_prime_option,
    cli_options,
    finish,
    handle_command_exceptions,
    load_etd_file,
    new_report,
    parse_vectors,
    resolve_window,
)
from toroidal.dependencies import get_degeneration_service, get_etd_service
from toroidal.schemas.report import Verdict

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("hodge")
@handle_command_exceptions
def hodge(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    char: int = typer.Option(
        0, "--char", callback=check_prime_option, help="0 or a prime"
    ),
    mt: Optional[int] = typer.Option(
        None, "--mt", min=0, help="Use K = (m_t + 1)*rho + Q"
    ),
    ideal: Optional[str] = typer.Option(
        None, "--ideal", callback=parse_vectors, help="Generators of K as '1,1;2,0'"
    ),
    mode: FieldMode = typer.Option(FieldMode.lattice, "--mode"),
    window: Optional[int] = typer.Option(None, "--window", min=0),
):
    """Sum the fiber complex cohomology over a window and compare with the prediction."""
    started = time.perf_counter()
    options = cli_options(ctx)
    etd_file = load_etd_file(path, example)
    etd_service = get_etd_service()
    service = get_degeneration_service(options.jobs)
    etd = etd_service.validate(etd_file, resolve_window(ctx, window))

    if mt is not None:
        monoid_ideal = etd_service.truncation_ideal(etd, mt)
    elif ideal is not None:
        monoid_ideal = etd_service.monoid_ideal(etd, ideal)
    else:
        monoid_ideal = None
    result = service.hodge_report(etd, monoid_ideal, char, etd.window, mode.value)

    report = new_report(
        "hodge",
        etd_file,
        char=char,
        mt=mt,
        ideal=[list(g) for g in result.ideal],
        mode=mode.value,
        window=etd.window,
    )
    report.verdicts = [
        Verdict(
            name="totals",
            passed=result.passed,
            detail=f"computed {list(result.totals)}, predicted {list(result.predicted)}",
        )
    ]
    report.witnesses = [
        {"point": point, "dimensions": list(dims)}
        for point, dims in result.contributions.items()
    ] + [{"flag": "base_change", **flag.model_dump(mode="json")} for flag in result.flags]
    report.dims = {
        "fiber_dimension": etd.fiber_dimension,
        "totals": list(result.totals),
        "predicted": list(result.predicted),
        "flags": len(result.flags),
    }
    finish(report, options.output_format, started)
