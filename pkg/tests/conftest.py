import struct
import sys

import numpy as np
import pytest


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance criterion verdicts where they are easy to find."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(mod, "CRITERION_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def write_idx(tmp_path):
    """Factory writing a minimal IDX image file and returning its path."""

    def _write(
        images: np.ndarray | None = None,
        count: int | None = None,
        magic: int = 0x00000803,
        rows: int = 28,
        cols: int = 28,
        truncate_at: int | None = None,
        name: str = "images.idx",
    ) -> str:
        if images is None:
            images = np.zeros((0, rows * cols), dtype=np.uint8)
        images = np.asarray(images, dtype=np.uint8)
        if count is None:
            count = images.shape[0]
        payload = struct.pack(">IIII", magic, count, rows, cols) + images.tobytes()
        if truncate_at is not None:
            payload = payload[:truncate_at]
        path = tmp_path / name
        path.write_bytes(payload)
        return str(path)

    return _write
