import logging
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from toroidal.commands import basechange, catalog, frobenius, hodge, kcomplex, validate, wforms
from toroidal.commands.common import CliOptions, OutputFormat, handle_command_exceptions
from toroidal.dependencies import get_settings

app = typer.Typer(
    name="toroidal",
    help="Exact computations with elementary log toroidal data",
    no_args_is_help=True,
)


def configure_logging(level: str) -> None:
    """Rich log records on stderr; reports own stdout."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


@app.callback()
@handle_command_exceptions
def main(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(
        None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"
    ),
    output_format: Optional[OutputFormat] = typer.Option(None, "--format"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1),
    window: Optional[int] = typer.Option(None, "--window", min=0),
):
    settings = get_settings()
    configure_logging((log_level or settings.log_level).upper())
    ctx.obj = CliOptions(
        output_format=output_format or OutputFormat(settings.output_format),
        jobs=jobs or settings.jobs,
        window=window,
    )


# Include command groups
app.add_typer(validate.router)
app.add_typer(wforms.router)
app.add_typer(basechange.router)
app.add_typer(frobenius.router)
app.add_typer(kcomplex.router)
app.add_typer(hodge.router)
app.add_typer(catalog.router)
