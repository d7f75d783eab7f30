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
    new_report,
    resolve_window,
)
from toroidal.dependencies import get_degeneration_service, get_etd_service
from toroidal.schemas.report import Verdict

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("kcomplex")
@handle_command_exceptions
def kcomplex(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    mt: Optional[int] = typer.Option(
        None, "--mt", min=0, help="Truncation m_t; K = (m_t + 1)*rho + Q"
    ),
    window: Optional[int] = typer.Option(None, "--window", min=0),
    ubound: Optional[int] = typer.Option(None, "--ubound", min=0, help="u-degree bound"),
    corrupt: bool = typer.Option(
        False, "--corrupt", help="Drop the u-derivative term (negative control)"
    ),
    stability: bool = typer.Option(
        False, "--stability", help="Repeat with a larger u-bound and compare"
    ),
):
    """Check acyclicity of the kernel complex over a base Q = N."""
    started = time.perf_counter()
    options = cli_options(ctx)
    etd_file = load_etd_file(path, example)
    etd = get_etd_service().validate(etd_file, resolve_window(ctx, window))
    service = get_degeneration_service(options.jobs)

    truncation = mt if mt is not None else (etd_file.truncation or 0)
    if ubound is None:
        ubound = etd_file.ubound if etd_file.ubound is not None else service.ubound
    verdict = service.verify_k_acyclic(etd, truncation, etd.window, ubound, corrupt)

    report = new_report(
        "kcomplex",
        etd_file,
        mt=truncation,
        window=etd.window,
        ubound=ubound,
        corrupt=corrupt or None,
    )
    report.verdicts = [
        Verdict(
            name="acyclic",
            passed=verdict.passed,
            detail=f"{len(verdict.failures)} of {len(verdict.entries)} (e, k) fail",
        )
    ]
    if stability:
        wider = service.verify_k_acyclic(
            etd, truncation, etd.window, ubound + 2, corrupt
        )
        report.verdicts.append(
            Verdict(
                name="ubound_stable",
                passed=wider.passed == verdict.passed,
                detail=f"u-bound {ubound + 2}: passed={wider.passed}",
            )
        )
    report.witnesses = [entry.model_dump(mode="json") for entry in verdict.failures]
    report.dims = {
        "fiber_dimension": etd.fiber_dimension,
        "degrees": len({entry.point for entry in verdict.entries}),
        "entries": len(verdict.entries),
    }
    logger.info(
        f"Kernel complex of {etd.name}, m_t={truncation}: passed={verdict.passed}"
    )
    finish(report, options.output_format, started)
