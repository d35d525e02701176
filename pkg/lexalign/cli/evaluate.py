"""Evaluate command: precision@k against a gold dictionary."""

from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from lexalign.alignment import MappingMatrix, unsupervised_criterion
from lexalign.cli.config import console, exit_on_error, load_config, load_table, require_file, section
from lexalign.embeddings import load_lexicon
from lexalign.errors import ConfigError
from lexalign.evaluation import evaluate_mapping


def _parse_ks(ks: str) -> List[int]:
    try:
        values = sorted({int(k) for k in ks.split(",") if k.strip()})
    except ValueError:
        raise ConfigError(f"--ks must be comma-separated integers, got {ks!r}")
    if not values or values[0] < 1:
        raise ConfigError("--ks needs positive ranks")
    return values


def _percent(value: Optional[float]) -> str:
    return "-" if value is None else f"{100 * value:.1f}"


def evaluate_command(
    mapping: Optional[str] = typer.Option(None, "--mapping", help="Mapping to evaluate (text or .npz)"),
    src_emb: Optional[str] = typer.Option(None, "--src-emb", help="Source embeddings"),
    tgt_emb: Optional[str] = typer.Option(None, "--tgt-emb", help="Target embeddings"),
    gold: Optional[str] = typer.Option(None, "--gold", help="Gold test dictionary"),
    ks: str = typer.Option("1,5,10", "--ks", help="Comma-separated cut-off ranks"),
    predictions: bool = typer.Option(False, "--predictions", help="Include ranked predictions in the report"),
    output: Optional[str] = typer.Option(None, "--output", help="Report JSON path (default: <output_dir>/eval.json)"),
    config_file: Optional[str] = typer.Option(
        None,
        "--config-file",
        "-c",
        help="YAML or key=value config file (relative to configs/ directory or absolute path)",
    ),
    overrides: Optional[List[str]] = typer.Option(
        None, "--set", help="Config override as dotted key=value (repeatable)",
    ),
):
    """Report precision@k with CSLS and nearest-neighbor retrieval."""
    with exit_on_error():
        cfg = load_config(config_file, dotlist=overrides)
        data_cfg = section(cfg, "data")
        eval_cfg = section(cfg, "evaluate")

        mapping_path = require_file(mapping, "--mapping")
        src_path = require_file(src_emb, "--src-emb")
        tgt_path = require_file(tgt_emb, "--tgt-emb")
        gold_path = require_file(gold, "--gold")
        cutoffs = _parse_ks(ks)

        W = MappingMatrix.load(mapping_path)
        src = load_table(src_path, data_cfg)
        tgt = load_table(tgt_path, data_cfg)
        W.check_dim(src.dim)
        lexicon = load_lexicon(gold_path, src, tgt)

        csls_k = eval_cfg.get("csls_k", 10)
        max_targets = eval_cfg.get("max_targets", 200000)
        criterion = unsupervised_criterion(W, src, tgt, k=csls_k, max_targets=max_targets)
        summary = evaluate_mapping(
            W, src, tgt, lexicon,
            ks=cutoffs,
            csls_k=csls_k,
            max_targets=max_targets,
            criterion_value=criterion,
            keep_predictions=predictions,
        )

        report_path = Path(output) if output else Path(cfg.get("output_dir", "output")) / "eval.json"
        summary.write_json(report_path)

        table = Table(title=f"Translation accuracy ({len(lexicon.sources())} queries, {lexicon.oov} OOV pairs)")
        table.add_column("Retrieval")
        for k in cutoffs:
            table.add_column(f"P@{k}", justify="right")
        for report in summary.reports:
            table.add_row(report.method, *[_percent(report.precision_at.get(k)) for k in cutoffs])
        console.print(table)
        console.print(f"Unsupervised criterion: {criterion:.6f}")
        console.print(f"[green]Report saved to:[/green] {report_path}")
