import io
import logging

import pytest
import structlog

from utils.common import ensure_directory, format_s, make_rng
from utils.logging import configure_logging, resolve_level


@pytest.fixture
def reset_structlog():
    yield
    structlog.reset_defaults()


class TestLogging:
    @pytest.mark.parametrize(
        "verbose, quiet, default, expected",
        [
            (True, True, "ERROR", logging.DEBUG),
            (False, True, "DEBUG", logging.WARNING),
            (False, False, "error", logging.ERROR),
            (False, False, "bogus", logging.INFO),
        ],
    )
    def test_resolve_level(self, verbose, quiet, default, expected):
        assert resolve_level(verbose, quiet, default) == expected

    def test_level_filter(self, reset_structlog):
        stream = io.StringIO()
        configure_logging(logging.WARNING, stream=stream)
        log = structlog.get_logger("fracham.test")
        log.info("隐藏的消息")
        log.warning("可见的消息")
        text = stream.getvalue()
        assert "可见的消息" in text
        assert "隐藏的消息" not in text


class TestCommon:
    def test_rng_streams_independent_of_order(self):
        a = make_rng(3, 1).random(4)
        make_rng(3, 0).random(100)
        b = make_rng(3, 1).random(4)
        assert (a == b).all()
        assert not (make_rng(3, 2).random(4) == a).all()

    def test_format_s(self):
        assert format_s(0.5) == "s0.5"
        assert format_s(0.95) == "s0.95"

    def test_ensure_directory(self, tmp_path):
        path = ensure_directory(tmp_path / "a" / "b")
        assert path.is_dir()
        assert ensure_directory(path) == path
