import logging
import time
from pathlib import Path
from typing import Optional

import typer
from sympy import primerange

from toroidal.commands.common import (
    cli_options,
    finish,
    handle_command_exceptions,
    load_etd_file,
    new_report,
    parse_primes,
    resolve_window,
)
from toroidal.dependencies import (
    get_base_change_service,
    get_etd_service,
    get_settings,
)
from toroidal.schemas.report import Verdict

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("basechange")
@handle_command_exceptions
def basechange(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    primes: Optional[str] = typer.Option(
        None,
        "--primes",
        callback=parse_primes,
        help="Comma separated primes; defaults to all primes up to the max prime",
    ),
    m: Optional[int] = typer.Option(
        None, "--m", min=0, help="Form degree; every degree 0..d when omitted"
    ),
    window: Optional[int] = typer.Option(
        None, "--window", min=0, help="Also run the element-level check on this window"
    ),
):
    """Test base change of the intersection of relative forms prime by prime."""
    started = time.perf_counter()
    options = cli_options(ctx)
    etd_file = load_etd_file(path, example)
    window = resolve_window(ctx, window)
    etd = get_etd_service().validate(etd_file, window)
    service = get_base_change_service(options.jobs)

    if primes is None:
        primes = list(primerange(2, get_settings().max_prime + 1))
    degrees = [m] if m is not None else list(range(etd.fiber_dimension + 1))

    bound = service.p0_bound(etd, degrees)
    report = new_report(
        "basechange", etd_file, primes=primes, m=m, window=window
    )
    failed = []
    for p in primes:
        results = [service.check_iso_condition(etd, k, p, window) for k in degrees]
        passed = all(result.passed for result in results)
        failures = [w for result in results for w in result.failures]
        report.verdicts.append(
            Verdict(
                name=f"p={p}",
                passed=passed,
                detail=f"{len(failures)} failing instances over degrees {degrees}",
            )
        )
        report.witnesses += [
            {"prime": p, **w.model_dump(mode="json", exclude={"primes"})}
            for w in failures
        ]
        if not passed:
            failed.append(p)

    report.dims = {
        "fiber_dimension": etd.fiber_dimension,
        "degrees": degrees,
        "p0": bound.p0,
        "obstruction_primes": list(bound.primes),
        "failed_primes": failed,
        "passed_primes": [p for p in primes if p not in failed],
    }
    logger.info(f"Base change for {etd.name}: p0 = {bound.p0}, failing primes {failed}")
    finish(report, options.output_format, started)
