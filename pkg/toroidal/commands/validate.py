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
from toroidal.dependencies import get_etd_service
from toroidal.schemas.report import Verdict

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("validate")
@handle_command_exceptions
def validate(
    ctx: typer.Context,
    path: Optional[Path] = typer.Argument(None, help="ETD file (.json, .yaml)"),
    example: Optional[str] = typer.Option(None, "--example", help="Built-in ETD"),
    window: Optional[int] = typer.Option(None, "--window", min=0),
):
    """Check the ETD axioms and describe facets, essential faces and the cover."""
    started = time.perf_counter()
    options = cli_options(ctx)
    etd_file = load_etd_file(path, example)
    window = resolve_window(ctx, window)
    etd_service = get_etd_service()

    etd = etd_service.validate(etd_file, window)
    classification = etd_service.classify_facets(etd)
    cover = etd_service.cover(etd)
    used, strict = etd_service.smooth_type_decomposition(etd)
    bad = {b.face.support: b for b in cover.bad_faces}
    charts = {f.support for f in cover.chart_faces}
    essential = {f.support for f in etd.essential_faces}

    report = new_report("validate", etd_file, window=etd.window)
    report.verdicts = [
        Verdict(
            name="etd_axioms",
            passed=True,
            detail=f"free basis certified up to degree {etd.window}",
        ),
        Verdict(
            name="cover",
            passed=cover.covered,
            detail=f"{len(cover.uncovered)} uncovered faces, "
            f"{len(cover.bad_charts)} charts meet a bad face",
        ),
    ]
    report.dims = {
        "ambient_rank": etd.ambient_rank,
        "rank_p": etd.p.rank,
        "rank_q": etd.q.rank,
        "fiber_dimension": etd.fiber_dimension,
        "facet_normals": [list(u) for u in etd.p.facet_normals],
        "facets": list(etd.facets),
        "minimal_facets": list(etd.minimal_facets),
        "vertical": list(classification.vertical),
        "horizontal": list(classification.horizontal),
        "unused": list(classification.unused),
        "essential_faces": len(etd.essential_faces),
        "bad_faces": len(cover.bad_faces),
        "log_smooth": etd_service.is_log_smooth(etd),
        "charts_with_all_facets": [list(f.support) for f in used],
        "charts_on_unused_facets": [list(f.support) for f in strict],
    }
    report.witnesses = [
        {
            "face": list(face.support),
            "rank": face.rank,
            "facets": list(face.facets),
            "essential": face.support in essential,
            "bad": face.support in bad,
            "chart": face.support in charts,
        }
        for face in etd.p.faces
    ]
    logger.info(f"Validated {etd.name}: d = {etd.fiber_dimension}")
    finish(report, options.output_format, started)
