"""Coloured console lines; colour is dropped when stdout is not a tty."""

import click


def print_blue(text: str) -> None:
    click.secho(text, fg="bright_blue")


def print_red(text: str) -> None:
    click.secho(text, fg="bright_red")


def print_result(passed: bool, text: str) -> None:
    """One ledger line with a coloured PASS or FAIL tag."""
    tag = click.style(
        "PASS" if passed else "FAIL",
        fg="bright_blue" if passed else "bright_red",
        bold=True,
    )
    click.echo(f"{tag}  {text}")
