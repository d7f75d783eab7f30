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
    resolve_window,
)
from toroidal.dependencies import get_etd_service, get_forms_service
from toroidal.schemas.report import Verdict

logger = logging.getLogger(__name__)

router = typer.Typer()


def _basis(value) -> list[list[str]]:
    """Sublattice or subspace basis, entries as strings (fractions over Q)."""
    return [[str(x) for x in b] for b in value.basis]


@router.command("wforms")
@handle_command_exceptions
def wforms(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    m: int = typer.Option(1, "--m", min=0, help="Form degree"),
    char: Optional[int] = typer.Option(
        None,
        "--char",
        callback=check_prime_option,
        help="0 for Q, a prime p for F_p; integral when omitted",
    ),
    mode: FieldMode = typer.Option(FieldMode.lattice, "--mode"),
    window: Optional[int] = typer.Option(None, "--window", min=0),
):
    """Tabulate the graded pieces of W^m, one row per face class of degrees."""
    started = time.perf_counter()
    options = cli_options(ctx)
    etd_file = load_etd_file(path, example)
    etd_service = get_etd_service()
    forms = get_forms_service()
    etd = etd_service.validate(etd_file, resolve_window(ctx, window))

    points = etd_service.monoid_service.enumerate_up_to(
        etd.p, etd.grading.form, etd.window
    )
    classes: dict[tuple, list] = {}
    for point in points:
        classes.setdefault(etd_service.face_of(etd, point).support, []).append(point)

    rows = []
    splits = []
    for support, members in classes.items():
        representative = members[0]
        relative = forms.w_relative(etd, m, representative, char, mode.value)
        absolute = forms.w_absolute(etd, m, representative, char, mode.value)
        rows.append(
            {
                "face": list(support),
                "point": list(representative),
                "degrees": len(members),
                "ring": relative.ring,
                "relative_rank": relative.rank,
                "absolute_rank": absolute.rank,
                "basis": _basis(relative.value),
            }
        )
        split = forms.check_split_sequence(etd, representative, m)
        if not split.passed:
            splits.append(
                {
                    "point": list(representative),
                    "exact": split.exact,
                    "surjective": split.surjective,
                    "split": split.split,
                }
            )

    logger.debug(f"W^{m} of {etd.name}: {len(rows)} face classes over {len(points)} degrees")
    free_basis = forms.free_basis_report(etd, m, etd.window)

    report = new_report(
        "wforms", etd_file, m=m, char=char, mode=mode.value, window=etd.window
    )
    report.verdicts = [
        Verdict(
            name="split_sequence",
            passed=not splits,
            detail=f"{len(splits)} of {len(rows)} face classes fail",
        ),
        Verdict(
            name="free_basis",
            passed=free_basis.passed,
            detail=f"{len(free_basis.failures)} of {free_basis.checked} degrees fail",
        ),
    ]
    report.witnesses = rows + splits + free_basis.failures
    report.dims = {
        "fiber_dimension": etd.fiber_dimension,
        "degrees": len(points),
        "face_classes": len(rows),
    }
    finish(report, options.output_format, started)
