import random

import pytest

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(key: str, title: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {key} {title}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE[key] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k[2:])):
        terminalreporter.write_line(_ACCEPTANCE[key])
