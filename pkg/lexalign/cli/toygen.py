"""Toygen command: write the 2-d toy dataset."""

from pathlib import Path
from typing import List, Optional

import numpy as np
import typer
from rich.table import Table

from lexalign.cli.config import RunManifest, console, exit_on_error, load_config, section
from lexalign.evaluation import N_CLASSES, ToySpec, generate_toy


def toygen_command(
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed of the draw"),
    anchors: Optional[int] = typer.Option(None, "--anchors", help="Anchor pairs per class"),
    large_points: Optional[int] = typer.Option(None, "--large-points", help="Points in each large class"),
    small_points: Optional[int] = typer.Option(None, "--small-points", help="Points in each small class"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config-file",
        "-c",
        help="YAML or key=value config file (relative to configs/ directory or absolute path)",
    ),
    overrides: Optional[List[str]] = typer.Option(
        None, "--set", help="Config override as dotted key=value (repeatable)",
    ),
    output_dir: Optional[str] = typer.Option(None, "-o", "--output-dir", help="Output directory"),
):
    """Generate source/target toy embeddings, anchors and the spec that produced them."""
    with exit_on_error():
        cli_overrides = {}
        if seed is not None:
            cli_overrides.setdefault("toy", {})["seed"] = seed
        if anchors is not None:
            cli_overrides.setdefault("toy", {})["anchors_per_class"] = anchors
        if large_points is not None:
            cli_overrides.setdefault("toy", {})["large_points"] = large_points
        if small_points is not None:
            cli_overrides.setdefault("toy", {})["small_points"] = small_points
        if output_dir is not None:
            cli_overrides["output_dir"] = output_dir
        cfg = load_config(config_file, cli_overrides, overrides)

        spec = ToySpec.from_dict(section(cfg, "toy"))
        out = Path(cfg.get("output_dir", "output"))
        data = generate_toy(spec)
        paths = data.save(out)
        manifest = RunManifest(command="toygen", config={"toy": spec.to_dict()}, seed=spec.seed, outputs=paths)
        manifest.write(out)

        table = Table(title="Toy dataset")
        table.add_column("Class", justify="right")
        table.add_column("Source", justify="right")
        table.add_column("Target", justify="right")
        for label in range(1, N_CLASSES + 1):
            table.add_row(
                str(label),
                str(int(np.sum(data.src_labels == label))),
                str(int(np.sum(data.tgt_labels == label))),
            )
        console.print(table)
        console.print(f"Anchors: {len(data.anchors)}")
        console.print(f"[green]Toy data written to:[/green] {out}")
