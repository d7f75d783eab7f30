import logging
import time
from pathlib import Path
from typing import Optional

import typer

from toroidal.commands.common import (
    FieldMode,
    cli_options,
    finish,
    handle_command_exceptions,
    load_etd_file,
    new_report,
    parse_vectors,
    resolve_window,
)
from toroidal.dependencies import get_etd_service, get_frobenius_service
from toroidal.exceptions.etd import UnsupportedBaseError
from toroidal.schemas.report import Verdict
from toroidal.services.lattice import check_prime

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("frobenius")
@handle_command_exceptions
def frobenius(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    p: int = typer.Option(..., "--p", help="Characteristic, a prime"),
    ideal: Optional[str] = typer.Option(
        None,
        "--ideal",
        callback=parse_vectors,
        help="Generators of K in Q as '1,1;2,0'; the maximal ideal when omitted",
    ),
    mode: FieldMode = typer.Option(FieldMode.lattice, "--mode"),
    window: Optional[int] = typer.Option(None, "--window", min=0),
):
    """Verify the Frobenius decomposition of the fiber complexes in characteristic p."""
    started = time.perf_counter()
    options = cli_options(ctx)
    check_prime(p)
    etd_file = load_etd_file(path, example)
    etd_service = get_etd_service()
    service = get_frobenius_service(options.jobs)
    etd = etd_service.validate(etd_file, resolve_window(ctx, window))

    monoid_ideal = (
        etd_service.monoid_ideal(etd, ideal)
        if ideal is not None
        else service.default_ideal(etd)
    )
    image = service.frobenius_map(etd, p, monoid_ideal, etd.window)
    cartier = service.verify_decomposition(
        etd, p, monoid_ideal, etd.window, mode.value
    )
    vanishing = [
        service.vanishing_iff_pE(etd, p, e)
        for e in etd_service.enumerate_essential(etd, etd.window)
    ]

    report = new_report(
        "frobenius",
        etd_file,
        p=p,
        ideal=[list(g) for g in monoid_ideal.generators],
        mode=mode.value,
        window=etd.window,
    )
    report.verdicts = [
        Verdict(
            name="frobenius_map",
            passed=image.passed,
            detail=f"p*E checked on {len(image.entries)} essential degrees",
        ),
        Verdict(
            name="cartier",
            passed=cartier.passed,
            detail=f"{len(cartier.failures)} of {len(cartier.entries)} degrees disagree",
        ),
        Verdict(
            name="vanishing_iff_pE",
            passed=all(v.passed for v in vanishing),
            detail=f"{len(vanishing)} essential degrees",
        ),
    ]
    report.witnesses = (
        [{"check": "cartier", **e.model_dump(mode="json")} for e in cartier.failures]
        + [
            {"check": "frobenius_map", **e.model_dump(mode="json")}
            for e in image.entries
            if not e.passed
        ]
        + [
            {"check": "vanishing", **v.model_dump(mode="json")}
            for v in vanishing
            if not v.passed
        ]
    )
    report.dims = {
        "fiber_dimension": etd.fiber_dimension,
        "degrees": len(cartier.entries),
        "in_frobenius_image": sum(e.in_frobenius_image for e in cartier.entries),
    }
    if etd.q.rank and monoid_ideal.generators:
        try:
            report.dims["quotient_base_dimension"] = (
                etd_service.quotient_base_dimension(etd, monoid_ideal)
            )
        except UnsupportedBaseError as e:
            logger.warning(f"No finite quotient base for {etd.name}: {str(e)}")
    logger.info(f"Frobenius check for {etd.name} at p={p}: passed={report.passed}")
    finish(report, options.output_format, started)
