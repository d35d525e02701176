"""Train command: learn a mapping, then refine it."""

from pathlib import Path
from typing import List, Optional

import typer

from lexalign.alignment import TrainConfig, TrainMode, train
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
from lexalign.embeddings import load_lexicon
from lexalign.errors import ConfigError
from lexalign.refinement import RefineConfig, iterative_refine


def train_command(
    src_emb: Optional[str] = typer.Option(None, "--src-emb", help="Source embeddings (.vec or .npz cache)"),
    tgt_emb: Optional[str] = typer.Option(None, "--tgt-emb", help="Target embeddings (.vec or .npz cache)"),
    dictionary: Optional[str] = typer.Option(
        None, "--dict", "-d", help="Seed dictionary (required for sup and semi modes)",
    ),
    eval_dict: Optional[str] = typer.Option(
        None, "--eval-dict", help="Test dictionary; precision@1 is logged every round",
    ),
    mode: Optional[str] = typer.Option(None, "--mode", "-m", help="unsup, sup or semi"),
    f_s: Optional[str] = typer.Option(None, "--f-s", help="Pair similarity for the dictionary loss: cosine or csls"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    rounds: Optional[int] = typer.Option(None, "--rounds", help="Training rounds"),
    iters_per_round: Optional[int] = typer.Option(None, "--iters-per-round", help="Mapping updates per round"),
    refine: Optional[bool] = typer.Option(
        None, "--refine/--no-refine", help="Run Procrustes refinement after training",
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
    """Learn a mapping from source to target embeddings."""
    with exit_on_error():
        cli_overrides = {}
        if mode is not None:
            cli_overrides.setdefault("train", {})["mode"] = TrainMode.parse(mode).value
        if f_s is not None:
            cli_overrides.setdefault("train", {})["f_s"] = f_s
        if seed is not None:
            cli_overrides.setdefault("train", {})["seed"] = seed
        if rounds is not None:
            cli_overrides.setdefault("train", {})["rounds"] = rounds
        if iters_per_round is not None:
            cli_overrides.setdefault("train", {})["iters_per_round"] = iters_per_round
        if refine is not None:
            cli_overrides.setdefault("refine", {})["enabled"] = refine
        if output_dir is not None:
            cli_overrides["output_dir"] = output_dir
        cfg = load_config(config_file, cli_overrides, overrides)

        train_cfg = TrainConfig.from_dict(section(cfg, "train"))
        refine_section = section(cfg, "refine")
        refine_enabled = refine_section.pop("enabled", True)
        refine_cfg = RefineConfig.from_dict(refine_section)
        data_cfg = section(cfg, "data")

        src_path = require_file(src_emb, "--src-emb")
        tgt_path = require_file(tgt_emb, "--tgt-emb")
        if train_cfg.mode != TrainMode.UNSUPERVISED and dictionary is None:
            raise ConfigError(f"--dict is required for mode {train_cfg.mode.value}")
        if dictionary is not None:
            require_file(dictionary, "--dict")
        if eval_dict is not None:
            require_file(eval_dict, "--eval-dict")

        out = Path(cfg.get("output_dir", "output"))
        out.mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            command="train",
            config={
                "train": train_cfg.to_dict(),
                "refine": {"enabled": refine_enabled, **refine_cfg.to_dict()},
                "data": data_cfg,
            },
            seed=train_cfg.seed,
        )
        manifest.add_input("src_emb", src_path)
        manifest.add_input("tgt_emb", tgt_path)
        manifest.add_input("dict", dictionary)
        manifest.add_input("eval_dict", eval_dict)
        manifest.outputs = {
            "mapping": str(out / "mapping.txt"),
            "mapping_raw": str(out / "mapping_raw.txt"),
            "log": str(out / "log.jsonl"),
        }
        if refine_enabled:
            manifest.outputs["refinement"] = str(out / "refinement.json")
        manifest.write(out)

        run_log = run_logger(out, verbose)
        run_log.info("run.started", f"train {train_cfg.mode.value}, seed {train_cfg.seed}", manifest.to_dict())

        src = load_table(src_path, data_cfg)
        tgt = load_table(tgt_path, data_cfg)
        run_log.info("data.loaded", f"{len(src)} source / {len(tgt)} target words", {"size": len(src)})

        lexicon = None
        if dictionary is not None and train_cfg.mode != TrainMode.UNSUPERVISED:
            lexicon = load_lexicon(dictionary, src, tgt)
        eval_lexicon = load_lexicon(eval_dict, src, tgt) if eval_dict is not None else None

        result = train(src, tgt, lexicon, train_cfg, run_logger=run_log, eval_lexicon=eval_lexicon)
        result.log.write_jsonl(out / "log.jsonl")
        result.mapping.save_text(out / "mapping_raw.txt")

        mapping, criterion = result.mapping, result.best_criterion
        if refine_enabled:
            refined = iterative_refine(mapping, src, tgt, refine_cfg, run_logger=run_log)
            refined.write_json(out / "refinement.json")
            mapping, criterion = refined.mapping, refined.best_criterion
        mapping.save_text(out / "mapping.txt")

        run_log.info("run.completed", f"criterion {criterion:.6f}", {"criterion": criterion})
        console.print(f"[bold]Unsupervised criterion:[/bold] {criterion:.6f}")
        if result.diverged:
            console.print(f"[yellow]Training diverged; kept the round {result.best_round} checkpoint[/yellow]")
        console.print(f"[green]Mapping saved to:[/green] {out / 'mapping.txt'}")
