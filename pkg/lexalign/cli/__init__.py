"""Command-line interface for lexalign."""

import typer

from lexalign.cli.correlate import correlate_command
from lexalign.cli.evaluate import evaluate_command
from lexalign.cli.gh import gh_command
from lexalign.cli.refine import refine_command
from lexalign.cli.toybench import toybench_command
from lexalign.cli.toygen import toygen_command
from lexalign.cli.train import train_command

app = typer.Typer(help="lexalign - bilingual lexicon induction and isometry analysis")

app.command(name="train")(train_command)
app.command(name="refine")(refine_command)
app.command(name="evaluate")(evaluate_command)
app.command(name="gh")(gh_command)
app.command(name="correlate")(correlate_command)
app.command(name="toygen")(toygen_command)
app.command(name="toybench")(toybench_command)


def main():
    """Main CLI entry point."""
    app()


__all__ = ["app", "main"]
