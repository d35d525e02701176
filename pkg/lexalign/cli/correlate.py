"""Correlate command: isometry measures against translation accuracy."""

import json
from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from lexalign.cli.config import console, exit_on_error, require_file
from lexalign.isometry import correlate_measures


def correlate_command(
    table_path: str = typer.Argument(..., help="CSV with a pair column, measure columns and accuracy columns"),
    measures: Optional[List[str]] = typer.Option(
        None, "--measure", help="Measure column (repeatable; default: gh, eigenvector_similarity, orthogonality_residual)",
    ),
    accuracies: Optional[List[str]] = typer.Option(
        None, "--accuracy", help="Accuracy column (repeatable; default: every other column)",
    ),
    output: Optional[str] = typer.Option(None, "--output", help="Write the correlations as JSON"),
):
    """Pearson and Spearman correlation of each measure with each accuracy column."""
    with exit_on_error():
        require_file(table_path, "TABLE")
        results = correlate_measures(table_path, measures or None, accuracies or None)

        table = Table(title="Correlation with accuracy")
        table.add_column("Measure")
        table.add_column("Accuracy")
        table.add_column("n", justify="right")
        table.add_column("Pearson", justify="right")
        table.add_column("|Pearson|", justify="right")
        table.add_column("Spearman", justify="right")
        for r in results:
            table.add_row(
                r.measure, r.accuracy, str(r.n), f"{r.pearson:.2f}", f"{abs(r.pearson):.2f}", f"{r.spearman:.2f}",
            )
        console.print(table)

        if output:
            path = Path(output)
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump([r.to_dict() for r in results], f, indent=2)
            console.print(f"[green]Correlations saved to:[/green] {path}")
