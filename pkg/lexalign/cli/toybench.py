"""Toybench command: multi-seed training on the toy dataset."""

import json
from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from lexalign.alignment import TrainConfig
from lexalign.cli.config import RunManifest, console, exit_on_error, load_config, run_logger, section
from lexalign.evaluation import ToySpec
from lexalign.evaluation.harness import run_toy_seeds


def toybench_command(
    seeds: int = typer.Option(20, "--seeds", help="Number of training seeds per mode"),
    modes: Optional[List[str]] = typer.Option(
        None, "--mode", "-m", help="Training mode (repeatable; default: unsup and semi)",
    ),
    tol: float = typer.Option(0.15, "--tol", help="Success when ||W - T||_F is below this"),
    parallel: int = typer.Option(1, "--parallel", "-j", help="Number of parallel workers"),
    config_file: Optional[str] = typer.Option(
        "experiment/toy",
        "--config-file",
        "-c",
        help="YAML or key=value config file (relative to configs/ directory or absolute path)",
    ),
    overrides: Optional[List[str]] = typer.Option(
        None, "--set", help="Config override as dotted key=value (repeatable)",
    ),
    output_dir: Optional[str] = typer.Option(None, "-o", "--output-dir", help="Output directory"),
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Verbose output"),
):
    """How often each training mode recovers the planted toy transform."""
    with exit_on_error():
        cli_overrides = {"output_dir": output_dir} if output_dir is not None else {}
        cfg = load_config(config_file, cli_overrides, overrides)
        spec = ToySpec.from_dict(section(cfg, "toy"))
        train_cfg = TrainConfig.from_dict(section(cfg, "train"))

        out = Path(cfg.get("output_dir", "output"))
        manifest = RunManifest(
            command="toybench",
            config={"toy": spec.to_dict(), "train": train_cfg.to_dict(), "seeds": seeds, "tol": tol},
            seed=spec.seed,
            outputs={"report": str(out / "toybench.json")},
        )
        manifest.write(out)

        report = run_toy_seeds(
            spec,
            train_cfg,
            seeds=range(seeds),
            modes=modes or ["unsupervised", "semi"],
            tol=tol,
            workers=parallel,
            run_logger=run_logger(out, verbose),
        )
        with open(out / "toybench.json", "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=2)

        table = Table(title=f"Toy recovery over {seeds} seeds")
        table.add_column("Mode")
        table.add_column("Success rate", justify="right")
        table.add_column("Criterion variance", justify="right")
        for summary in report.modes.values():
            variance = summary.criterion_variance
            table.add_row(
                summary.mode,
                f"{summary.success_rate:.0%}",
                "-" if variance is None else f"{variance:.3g}",
            )
        console.print(table)
        console.print(f"[green]Results saved to:[/green] {out / 'toybench.json'}")
