# tests/utils/test_logging_config.py
import io
import json
import logging

import pytest
import structlog

from fcopt.exceptions import ConfigError
from fcopt.utils.logging_config import resolve_level, setup_logging


class TestLoggingConfig:
    def test_levels(self):
        assert resolve_level("ERROR") == logging.ERROR
        assert resolve_level(" debug ") == logging.DEBUG

    def test_unknown_level(self):
        with pytest.raises(ConfigError):
            resolve_level("verbose")

    def test_json_console_goes_to_the_given_stream(self, capsys):
        # Arrange
        stream = io.StringIO()
        setup_logging("info", force_json_console=True, stream=stream)

        # Act
        structlog.get_logger("fcopt.test").info("Run finished.", rows=3)

        # Assert
        event = json.loads(stream.getvalue().splitlines()[-1])
        assert event["event"] == "Run finished."
        assert event["rows"] == 3
        assert capsys.readouterr().out == ""

    def test_level_filters_records(self):
        stream = io.StringIO()
        setup_logging("error", stream=stream)

        structlog.get_logger("fcopt.test").info("hidden")

        assert "hidden" not in stream.getvalue()

    def test_log_file_receives_json(self, tmp_path):
        log_file = tmp_path / "fcopt.log"
        setup_logging("info", log_to_console=False, log_file=log_file)

        structlog.get_logger("fcopt.test").warning("Inner budget capped.", k=2)
        for handler in logging.getLogger().handlers:
            handler.flush()

        event = json.loads(log_file.read_text(encoding="utf-8").splitlines()[-1])
        assert event["k"] == 2
