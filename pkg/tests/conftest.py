from __future__ import annotations

import os

import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_configure(config):
    # keep universe/table caches out of the user's home during test runs
    cache = config.rootpath / ".pytest_cache" / "fmdel"
    os.environ.setdefault("FMDEL_CACHE_DIR", str(cache))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_report():
    def report(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report
