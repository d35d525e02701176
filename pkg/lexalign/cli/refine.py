"""Refine command: iterative Procrustes on induced dictionaries."""

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
from lexalign.refinement import RefineConfig, iterative_refine


def refine_command(
    mapping: Optional[str] = typer.Option(None, "--mapping", help="Mapping to start from (text or .npz)"),
    src_emb: Optional[str] = typer.Option(None, "--src-emb", help="Source embeddings"),
    tgt_emb: Optional[str] = typer.Option(None, "--tgt-emb", help="Target embeddings"),
    rounds: Optional[int] = typer.Option(None, "--rounds", help="Refinement rounds"),
    hubness_threshold: Optional[int] = typer.Option(
        None, "--hubness-threshold", help="Largest rank-1 hub count a target may have (default: 20)",
    ),
    hubness_filter: Optional[bool] = typer.Option(
        None, "--hubness-filter/--no-hubness-filter", help="Drop hub targets from induced dictionaries",
    ),
    export_dictionaries: bool = typer.Option(
        False, "--export-dictionaries", help="Write each round's induced dictionary",
    ),
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
    """Refine a mapping with Procrustes on mutual CSLS matches."""
    with exit_on_error():
        cli_overrides = {}
        if rounds is not None:
            cli_overrides.setdefault("refine", {})["rounds"] = rounds
        if hubness_threshold is not None:
            cli_overrides.setdefault("refine", {})["hubness_threshold"] = hubness_threshold
        if hubness_filter is not None:
            cli_overrides.setdefault("refine", {})["hubness_filter"] = hubness_filter
        if output_dir is not None:
            cli_overrides["output_dir"] = output_dir
        cfg = load_config(config_file, cli_overrides, overrides)

        refine_section = section(cfg, "refine")
        refine_section.pop("enabled", None)
        refine_cfg = RefineConfig.from_dict(refine_section)
        data_cfg = section(cfg, "data")

        mapping_path = require_file(mapping, "--mapping")
        src_path = require_file(src_emb, "--src-emb")
        tgt_path = require_file(tgt_emb, "--tgt-emb")

        out = Path(cfg.get("output_dir", "output"))
        manifest = RunManifest(command="refine", config={"refine": refine_cfg.to_dict(), "data": data_cfg})
        manifest.add_input("mapping", mapping_path)
        manifest.add_input("src_emb", src_path)
        manifest.add_input("tgt_emb", tgt_path)
        manifest.outputs = {"mapping": str(out / "mapping.txt"), "refinement": str(out / "refinement.json")}
        manifest.write(out)

        run_log = run_logger(out, verbose)
        W0 = MappingMatrix.load(mapping_path)
        src = load_table(src_path, data_cfg)
        tgt = load_table(tgt_path, data_cfg)
        W0.check_dim(src.dim)

        result = iterative_refine(W0, src, tgt, refine_cfg, run_logger=run_log)
        result.mapping.save_text(out / "mapping.txt")
        result.write_json(out / "refinement.json")
        if export_dictionaries:
            for dictionary in result.dictionaries:
                dictionary.save(out / f"dictionary_round{dictionary.round}.txt", src, tgt)

        table = Table(title="Refinement")
        table.add_column("Round", justify="right")
        table.add_column("Candidates", justify="right")
        table.add_column("Kept", justify="right")
        table.add_column("Criterion", justify="right")
        for entry in result.history:
            style = "green" if entry.round == result.best_round else None
            table.add_row(
                str(entry.round), str(entry.candidates), str(entry.kept), f"{entry.criterion:.6f}", style=style,
            )
        console.print(table)
        console.print(f"[green]Refined mapping saved to:[/green] {out / 'mapping.txt'}")
