"""Main CLI entry point for contrail-seg."""

from typing import Optional

import click

from . import __version__
from .commands import (
    ablate_cli,
    crossval_cli,
    eval_cli,
    gradcheck_cli,
    pseudolabel_cli,
    report_cli,
    synth_cli,
    train_cli,
    two_phase_cli,
    validate_cli,
)
from .runtime import DEBUG_ENV, THREADS_ENV, Runtime, setup_logging


@click.group(invoke_without_command=True)
@click.version_option(version=__version__)
@click.option(
    "--debug",
    is_flag=True,
    help=(
        f"Verbose logs and tensor finiteness checks. Can also be set via {DEBUG_ENV} env var."
    ),
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    help=f"Maximum worker threads for folds and generation. Can also be set via {THREADS_ENV}.",
)
@click.pass_context
def cli(ctx, debug: bool, threads: Optional[int]):
    """Contrail segmentation toolkit.

    Generates synthetic multi-annotator contrail scenes, trains a small EfficientNet
    U-Net from scratch, and measures misalignment correction, soft labels and
    pseudo-labels against a baseline.
    """
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        ctx.exit(0)

    # Environment first so explicit flags win
    Runtime.configure_from_env()
    if threads:
        Runtime.set_threads(threads)
    if debug:
        Runtime.set_debug(True)
    setup_logging(Runtime.debug())


# Register commands
cli.add_command(synth_cli)
cli.add_command(train_cli)
cli.add_command(crossval_cli)
cli.add_command(pseudolabel_cli)
cli.add_command(two_phase_cli)
cli.add_command(eval_cli)
cli.add_command(report_cli)
cli.add_command(ablate_cli)
cli.add_command(gradcheck_cli)
cli.add_command(validate_cli)


if __name__ == "__main__":
    cli()
