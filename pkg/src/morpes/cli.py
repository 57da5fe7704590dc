"""Command line entry points: serve the proxy, report session metrics."""

from __future__ import annotations

import sys

import click

from .errors import EmptyGroupError
from .metrics import parse_records_csv, records_to_report
from .service import load_config, run_service


@click.group()
def main() -> None:
    """Personalizing re-rendering proxy for small-screen clients."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Path to the YAML config (overrides MORPES_CONFIG).")
@click.option("--listen", default=None, metavar="HOST:PORT",
              help="Override the configured listen address.")
def serve(config_path: str | None, listen: str | None) -> None:
    """Run the proxy until interrupted."""
    from dataclasses import replace

    config = load_config(config_path)
    if listen:
        config = replace(config, listen_address=listen)
    try:
        run_service(config)
    except RuntimeError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Visit records CSV: session_label,segment_count,first_shot_count,shot_count.")
@click.option("--format", "output_format", type=click.Choice(["table", "csv"]),
              default="table", show_default=True)
def metrics(input_path: str, output_format: str) -> None:
    """Aggregate recorded sessions into MSC / MSFS / MPSC."""
    with open(input_path, encoding="utf-8") as handle:
        text = handle.read()
    try:
        report = records_to_report(parse_records_csv(text))
    except EmptyGroupError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except (KeyError, ValueError) as exc:
        click.echo(f"error: malformed records CSV: {exc}", err=True)
        sys.exit(1)
    click.echo(report.table if output_format == "table" else report.csv, nl=False)
    if output_format == "table":
        click.echo()


if __name__ == "__main__":
    main()
