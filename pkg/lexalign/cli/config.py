"""Configuration loading, run manifests and error-to-exit-code mapping shared by the commands."""

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Union

import typer
from omegaconf import DictConfig, OmegaConf
from rich.console import Console

from lexalign import __version__
from lexalign.embeddings import EmbeddingTable, load_embeddings, normalize
from lexalign.errors import ConfigError, DataError, DivergenceError
from lexalign.logging import ConsoleLogger, FileLogger, Logger, LogLevel, MultiLogger

console = Console()

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4

CONFIG_DIR = Path("configs")
DEFAULT_CONFIG = CONFIG_DIR / "config.yaml"


def resolve_config_path(config_file: str) -> Path:
    """Absolute paths as given; otherwise try configs/<name>, then configs/<name>.yaml."""
    config_path = Path(config_file)
    if config_path.is_absolute() or config_path.exists():
        candidates = [config_path]
    else:
        candidates = [CONFIG_DIR / config_file, CONFIG_DIR / f"{config_file}.yaml"]
    for candidate in candidates:
        if candidate.exists():
            return candidate
    raise ConfigError(f"Config file not found: {config_file}")


def read_config_file(path: Path) -> DictConfig:
    """YAML for ``.yaml``/``.yml`` files, otherwise one ``key=value`` per line."""
    if path.suffix in (".yaml", ".yml"):
        return OmegaConf.load(path)
    lines = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            stripped = line.split("#", 1)[0].strip()
            if stripped:
                if "=" not in stripped:
                    raise ConfigError(f"{path}: expected key=value, got {stripped!r}")
                lines.append(stripped)
    return OmegaConf.from_dotlist(lines)


def load_config(
    config_file: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    dotlist: Optional[List[str]] = None,
) -> DictConfig:
    """
    Merge configs/config.yaml, an optional config file, CLI flag overrides
    and ``--set key=value`` overrides, in increasing precedence.
    """
    cfg = OmegaConf.load(DEFAULT_CONFIG) if DEFAULT_CONFIG.exists() else OmegaConf.create({})
    if config_file:
        config_path = resolve_config_path(config_file)
        console.print(f"[bold]Loading config from:[/bold] {config_path}")
        cfg = OmegaConf.merge(cfg, read_config_file(config_path))
    if overrides:
        cfg = OmegaConf.merge(cfg, OmegaConf.create(overrides))
    if dotlist:
        bad = [item for item in dotlist if "=" not in item]
        if bad:
            raise ConfigError(f"--set expects key=value, got {bad[0]!r}")
        cfg = OmegaConf.merge(cfg, OmegaConf.from_dotlist(list(dotlist)))
    return cfg


def section(cfg: DictConfig, name: str) -> Dict[str, Any]:
    """A config section as a plain dict (empty when absent)."""
    node = cfg.get(name)
    if node is None:
        return {}
    return OmegaConf.to_container(node, resolve=True)


def file_sha256(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class RunManifest:
    """Everything needed to re-run a command: resolved config, input hashes, seed, version."""
    command: str
    config: Dict[str, Any]
    inputs: Dict[str, Dict[str, str]] = field(default_factory=dict)
    seed: Optional[int] = None
    version: str = __version__
    outputs: Dict[str, str] = field(default_factory=dict)

    def add_input(self, name: str, path: Optional[Union[str, Path]]) -> None:
        if path is not None:
            self.inputs[name] = {"path": str(path), "sha256": file_sha256(path)}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }

    def write(self, output_dir: Union[str, Path]) -> Path:
        path = Path(output_dir) / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
        return path


def require_file(path: Optional[str], flag: str) -> str:
    """Missing input files are usage errors."""
    if path is None:
        raise ConfigError(f"{flag} is required")
    if not Path(path).exists():
        raise ConfigError(f"{flag}: file not found: {path}")
    return path


def load_table(path: str, data_cfg: Dict[str, Any], normalized: bool = True) -> EmbeddingTable:
    """Load an embedding file with the configured vocabulary cap and normalization."""
    table = load_embeddings(path, max_vocab=data_cfg.get("max_vocab", 200000))
    scheme = data_cfg.get("normalize", "centered_unit")
    if normalized and scheme not in (None, "none", "raw"):
        table = normalize(table, scheme)
    return table


def run_logger(output_dir: Union[str, Path], verbose: bool = False) -> Logger:
    """JSON-lines events in ``<output_dir>/events.jsonl`` (one run per file), echoed to the console."""
    return MultiLogger(
        ConsoleLogger(min_level=LogLevel.DEBUG if verbose else LogLevel.INFO),
        FileLogger(str(Path(output_dir) / "events.jsonl"), append=False),
    )


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Map library errors to exit codes, printing the message in red."""
    try:
        yield
    except typer.Exit:
        raise
    except ConfigError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(code=EXIT_USAGE)
    except DataError as e:
        console.print(f"[red]Data error: {e}[/red]")
        raise typer.Exit(code=EXIT_DATA)
    except FileNotFoundError as e:
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(code=EXIT_USAGE)
    except DivergenceError as e:
        console.print(f"[red]Training diverged: {e}[/red]")
        raise typer.Exit(code=EXIT_DIVERGED)
