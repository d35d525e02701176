"""Tests for the run loggers."""

import io
import json

from lexalign.logging import ConsoleLogger, FileLogger, LogLevel, MultiLogger, NullLogger


class TestConsoleLogger:
    """One line per event, banners for run start and end."""

    def test_event_line_with_key_data(self):
        stream = io.StringIO()
        logger = ConsoleLogger(stream=stream)
        logger.info("train.round", "Round 1/3", {"round": 1, "criterion": 0.123456, "ignored": "x"})
        line = stream.getvalue()
        assert "Round 1/3" in line
        assert "round=1, criterion=0.1235" in line
        assert "ignored" not in line

    def test_not_colored_without_tty(self):
        stream = io.StringIO()
        ConsoleLogger(stream=stream, colored=True).warning("refine.stopped", "stop")
        assert "\033[" not in stream.getvalue()

    def test_min_level(self):
        stream = io.StringIO()
        logger = ConsoleLogger(min_level=LogLevel.WARNING, stream=stream)
        logger.info("data.loaded", "hidden")
        logger.debug("data.loaded", "hidden")
        logger.error("train.diverged", "shown")
        assert "hidden" not in stream.getvalue()
        assert "shown" in stream.getvalue()

    def test_banner(self):
        stream = io.StringIO()
        ConsoleLogger(stream=stream).info("run.started", "train semi, seed 0")
        text = stream.getvalue()
        assert "lexalign run" in text
        assert "train semi, seed 0" in text
        assert "=" * 70 in text

    def test_unknown_event_uses_name(self):
        stream = io.StringIO()
        ConsoleLogger(stream=stream, show_data=False).info("custom.event", data={"round": 2})
        assert "custom.event" in stream.getvalue()
        assert "round=2" not in stream.getvalue()

    def test_isometry_fields(self):
        stream = io.StringIO()
        ConsoleLogger(stream=stream).info(
            "isometry.point", "n=10", {"n_points": 10, "gh_lower_bound": 0.123456, "eigenvector_similarity": 2.5}
        )
        line = stream.getvalue()
        assert "n_points=10, gh_lower_bound=0.1235, eigenvector_similarity=2.5" in line


class TestFileLogger:
    """JSON lines."""

    def test_writes_entries(self, tmp_path):
        path = tmp_path / "logs" / "events.jsonl"
        logger = FileLogger(str(path))
        logger.info("refine.round", "Round 1/5", {"round": 1, "pairs": 120})
        logger.debug("refine.round", "below threshold")
        logger.warning("refine.stopped", "no pairs")

        entries = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert [e["event"] for e in entries] == ["refine.round", "refine.stopped"]
        assert entries[0]["level"] == "info"
        assert entries[0]["data"] == {"round": 1, "pairs": 120}
        assert "data" not in entries[1]
        assert "timestamp" in entries[0]

    def test_append_false_starts_a_fresh_file(self, tmp_path):
        path = tmp_path / "events.jsonl"
        FileLogger(str(path)).info("toy.seed", "first run")
        FileLogger(str(path)).info("toy.seed", "kept")
        assert len(path.read_text(encoding="utf-8").splitlines()) == 2

        FileLogger(str(path), append=False).info("toy.seed", "second run")
        [entry] = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
        assert entry["message"] == "second run"


class TestMultiLogger:
    """Fan-out."""

    def test_all_loggers_receive_events(self, tmp_path):
        stream = io.StringIO()
        path = tmp_path / "events.jsonl"
        logger = MultiLogger(ConsoleLogger(stream=stream), FileLogger(str(path)), NullLogger())
        logger.info("toy.seed", "semi seed=0", {"seed": 0, "success": True})
        assert "semi seed=0" in stream.getvalue()
        assert json.loads(path.read_text(encoding="utf-8"))["data"]["success"] is True
