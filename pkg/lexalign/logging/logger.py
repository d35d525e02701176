"""Structured run logging for lexalign."""

from abc import ABC, abstractmethod
from typing import Dict, Any, Optional
from enum import Enum
from datetime import datetime
from pathlib import Path
import json
import sys


class LogLevel(str, Enum):
    """Log severity levels."""
    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


LEVEL_ORDER = {
    LogLevel.DEBUG: 0,
    LogLevel.INFO: 1,
    LogLevel.WARNING: 2,
    LogLevel.ERROR: 3,
    LogLevel.CRITICAL: 4,
}


class Logger(ABC):
    """Abstract base class for run loggers."""

    @abstractmethod
    def log(
        self,
        level: LogLevel,
        event: str,
        message: str = "",
        data: Optional[Dict[str, Any]] = None
    ) -> None:
        """
        Log an event with optional data.

        Args:
            level: Log severity level
            event: Dotted event name, e.g. ``train.round``
            message: Human-readable message
            data: Optional metadata dictionary (must be JSON serialisable)
        """

    def debug(self, event: str, message: str = "", data: Optional[Dict[str, Any]] = None) -> None:
        """Log debug message."""
        self.log(LogLevel.DEBUG, event, message, data)

    def info(self, event: str, message: str = "", data: Optional[Dict[str, Any]] = None) -> None:
        """Log info message."""
        self.log(LogLevel.INFO, event, message, data)

    def warning(self, event: str, message: str = "", data: Optional[Dict[str, Any]] = None) -> None:
        """Log warning message."""
        self.log(LogLevel.WARNING, event, message, data)

    def error(self, event: str, message: str = "", data: Optional[Dict[str, Any]] = None) -> None:
        """Log error message."""
        self.log(LogLevel.ERROR, event, message, data)

    def critical(self, event: str, message: str = "", data: Optional[Dict[str, Any]] = None) -> None:
        """Log critical message."""
        self.log(LogLevel.CRITICAL, event, message, data)


class ConsoleLogger(Logger):
    """Console logger with colored output, one line per event."""

    COLORS = {
        LogLevel.DEBUG: "\033[36m",
        LogLevel.INFO: "\033[32m",
        LogLevel.WARNING: "\033[33m",
        LogLevel.ERROR: "\033[31m",
        LogLevel.CRITICAL: "\033[35m",
    }
    RESET = "\033[0m"
    BOLD = "\033[1m"
    DIM = "\033[2m"

    ICONS = {
        "run.started": "🚀",
        "run.completed": "✅",
        "data.loaded": "📂",
        "train.round": "🔄",
        "train.diverged": "❌",
        "train.checkpoint": "💾",
        "refine.round": "🔧",
        "refine.stopped": "⏹",
        "isometry.point": "📐",
        "toy.seed": "🎲",
    }

    # Keys shown inline after the message, in this order
    KEY_DATA = [
        "round", "size", "n_points", "criterion", "precision_at_1",
        "lr", "gh_lower_bound", "eigenvector_similarity", "success", "seed",
    ]

    def __init__(
        self,
        min_level: LogLevel = LogLevel.INFO,
        colored: bool = True,
        show_timestamp: bool = False,
        show_data: bool = True,
        stream=None,
    ):
        """
        Initialize console logger.

        Args:
            min_level: Minimum log level to display
            colored: Whether to use colored output (ignored when not a TTY)
            show_timestamp: Whether to show timestamps
            show_data: Whether to show the key data fields
            stream: Output stream, stdout by default
        """
        self.stream = stream or sys.stdout
        self.min_level = min_level
        self.colored = colored and self.stream.isatty()
        self.show_timestamp = show_timestamp
        self.show_data = show_data

    def log(
        self,
        level: LogLevel,
        event: str,
        message: str = "",
        data: Optional[Dict[str, Any]] = None
    ) -> None:
        """Log an event to the console."""
        if LEVEL_ORDER[level] < LEVEL_ORDER[self.min_level]:
            return

        if event in ("run.started", "run.completed"):
            self._log_major_event(event, message)
            return

        parts = []
        if self.show_timestamp:
            parts.append(self._dim(datetime.now().strftime("%H:%M:%S")))
        parts.append(self.ICONS.get(event, "•"))

        text = message or event
        if self.colored:
            text = f"{self.COLORS.get(level, '')}{text}{self.RESET}"
        parts.append(text)

        if data and self.show_data:
            key_data = self._extract_key_data(data)
            if key_data:
                parts.append(self._dim(f"({key_data})"))

        print("  " + " ".join(parts), file=self.stream)

    def _log_major_event(self, event: str, message: str) -> None:
        """Banner for run start and end."""
        title = "lexalign run" if event == "run.started" else "Run completed"
        icon = self.ICONS[event]
        print(file=self.stream)
        print("=" * 70, file=self.stream)
        if self.colored:
            print(f"{self.BOLD}{icon} {title}{self.RESET}", file=self.stream)
        else:
            print(f"{icon} {title}", file=self.stream)
        if message:
            print(f"   {message}", file=self.stream)
        print("=" * 70, file=self.stream)

    def _dim(self, text: str) -> str:
        return f"{self.DIM}{text}{self.RESET}" if self.colored else text

    def _extract_key_data(self, data: Dict[str, Any]) -> str:
        """Extract the most important data for display."""
        items = []
        for key in self.KEY_DATA:
            if key in data and data[key] is not None:
                value = data[key]
                if isinstance(value, float):
                    value = f"{value:.4g}"
                items.append(f"{key}={value}")
        return ", ".join(items)


class NullLogger(Logger):
    """Logger that does nothing (library default and tests)."""

    def log(
        self,
        level: LogLevel,
        event: str,
        message: str = "",
        data: Optional[Dict[str, Any]] = None
    ) -> None:
        """Do nothing."""


class FileLogger(Logger):
    """Logger that appends JSON lines to a file."""

    def __init__(self, file_path: str, min_level: LogLevel = LogLevel.INFO, append: bool = True):
        """
        Initialize file logger.

        Args:
            file_path: Path to log file (parent directories are created)
            min_level: Minimum log level to write
            append: Keep existing entries; when False the file is emptied first
        """
        self.file_path = Path(file_path)
        self.file_path.parent.mkdir(parents=True, exist_ok=True)
        self.min_level = min_level
        if not append:
            self.file_path.write_text("", encoding="utf-8")

    def log(
        self,
        level: LogLevel,
        event: str,
        message: str = "",
        data: Optional[Dict[str, Any]] = None
    ) -> None:
        """Log an event to file as JSON."""
        if LEVEL_ORDER[level] < LEVEL_ORDER[self.min_level]:
            return

        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "level": level.value,
            "event": event,
            "message": message,
        }
        if data:
            log_entry["data"] = data

        with open(self.file_path, "a", encoding="utf-8") as f:
            f.write(json.dumps(log_entry) + "\n")


class MultiLogger(Logger):
    """Fan an event out to several loggers (console + file in the CLI)."""

    def __init__(self, *loggers: Logger):
        self.loggers = list(loggers)

    def log(
        self,
        level: LogLevel,
        event: str,
        message: str = "",
        data: Optional[Dict[str, Any]] = None
    ) -> None:
        for logger in self.loggers:
            logger.log(level, event, message, data)
