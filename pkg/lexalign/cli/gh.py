"""GH command: isometry measures between two embedding spaces."""

from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from lexalign.alignment import MappingMatrix
from lexalign.cli.config import (
    RunManifest,
    console,
    exit_on_error,
    load_config,
    load_table,
    require_file,
    run_logger,
    section,
)
from lexalign.errors import ConfigError
from lexalign.isometry import DEFAULT_GRID, isometry_sweep


def _parse_grid(grid: str) -> List[int]:
    try:
        return [int(n) for n in grid.split(",") if n.strip()]
    except ValueError:
        raise ConfigError(f"--grid must be comma-separated integers, got {grid!r}")


def gh_command(
    src_emb: Optional[str] = typer.Option(None, "--src-emb", help="Source embeddings"),
    tgt_emb: Optional[str] = typer.Option(None, "--tgt-emb", help="Target embeddings"),
    mapping: Optional[str] = typer.Option(
        None, "--mapping", help="Learned mapping; adds the orthogonality residual",
    ),
    grid: Optional[str] = typer.Option(
        None, "--grid", help="Comma-separated vocabulary sizes (default: 100,500,1000,5000,10000)",
    ),
    eigen: Optional[bool] = typer.Option(
        None, "--eigen/--no-eigen", help="Also compute eigenvector similarity",
    ),
    pair: str = typer.Option("", "--pair", help="Language pair label written to the report"),
    csv_path: Optional[str] = typer.Option(None, "--csv", help="Also write the sweep as CSV"),
    workers: Optional[int] = typer.Option(None, "--workers", "-j", help="Grid sizes computed in parallel"),
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
    verbose: bool = typer.Option(False, "-v", "--verbose", help="Verbose output"),
):
    """Gromov-Hausdorff lower bound and eigenvector similarity over a vocabulary-size sweep."""
    with exit_on_error():
        cli_overrides = {}
        if grid is not None:
            cli_overrides.setdefault("isometry", {})["grid"] = _parse_grid(grid)
        if eigen is not None:
            cli_overrides.setdefault("isometry", {})["eigen"] = eigen
        if workers is not None:
            cli_overrides.setdefault("isometry", {})["workers"] = workers
        if output_dir is not None:
            cli_overrides["output_dir"] = output_dir
        cfg = load_config(config_file, cli_overrides, overrides)
        iso_cfg = section(cfg, "isometry")
        data_cfg = section(cfg, "data")

        src_path = require_file(src_emb, "--src-emb")
        tgt_path = require_file(tgt_emb, "--tgt-emb")
        if mapping is not None:
            require_file(mapping, "--mapping")

        out = Path(cfg.get("output_dir", "output"))
        manifest = RunManifest(command="gh", config={"isometry": iso_cfg, "data": data_cfg})
        manifest.add_input("src_emb", src_path)
        manifest.add_input("tgt_emb", tgt_path)
        manifest.add_input("mapping", mapping)
        manifest.outputs = {"report": str(out / "isometry.json")}
        if csv_path:
            manifest.outputs["csv"] = csv_path
        manifest.write(out)

        # clouds are centered and normalized per sweep size
        src = load_table(src_path, data_cfg, normalized=False)
        tgt = load_table(tgt_path, data_cfg, normalized=False)
        W = MappingMatrix.load(mapping) if mapping is not None else None

        report = isometry_sweep(
            src,
            tgt,
            grid=iso_cfg.get("grid", DEFAULT_GRID),
            W=W,
            knn_k=iso_cfg.get("knn_k", 10),
            energy=iso_cfg.get("energy", 0.9),
            eigen=iso_cfg.get("eigen", True),
            pair=pair,
            run_logger=run_logger(out, verbose),
            workers=iso_cfg.get("workers", 1),
        )
        report.write_json(out / "isometry.json")
        if csv_path:
            report.write_csv(csv_path)

        table = Table(title=f"Isometry {pair}".strip())
        table.add_column("n", justify="right")
        table.add_column("GH lower bound", justify="right")
        table.add_column("Eigenvector similarity", justify="right")
        for point in report.points:
            lam = "-" if point.eigenvector_similarity is None else f"{point.eigenvector_similarity:.4f}"
            table.add_row(str(point.n_points), f"{point.gh_lower_bound:.4f}", lam)
        console.print(table)
        if report.orthogonality_residual is not None:
            console.print(f"||I - WᵀW||²: {report.orthogonality_residual:.4f}")
        console.print(f"[green]Report saved to:[/green] {out / 'isometry.json'}")
