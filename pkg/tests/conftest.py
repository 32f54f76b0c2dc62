"""Shared fixtures: shipped study grids and the acceptance summary hook."""
from __future__ import annotations

import pathlib

import pytest

from gridshield import apply_configuration, parse_grid, parse_override

DATA_DIR = pathlib.Path(__file__).resolve().parent.parent / "data"

#: (criterion number, title, passed, detail) rows collected by
#: tests/test_acceptance.py and echoed after the run, one line each.
ACCEPTANCE_ROWS: list[tuple[int, str, bool, str]] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_ROWS.append((number, title, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_ROWS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number} [{title}]: {verdict} - {detail}")


@pytest.fixture(scope="session")
def data_dir() -> pathlib.Path:
    return DATA_DIR


def _load(name: str):
    return parse_grid((DATA_DIR / name).read_text(encoding="utf-8"))


def _override(name: str):
    return parse_override((DATA_DIR / "overrides" / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def toy_grid():
    return _load("toy_2bus.json")


@pytest.fixture(scope="session")
def ieee9():
    return _load("ieee9.json")


@pytest.fixture(scope="session")
def ieee30():
    return _load("ieee30.json")


@pytest.fixture(scope="session")
def cigre():
    return _load("cigre_mv.json")


@pytest.fixture(scope="session")
def cigre_closed(cigre):
    return apply_configuration(cigre, _override("cigre_closed_switches.json"))


@pytest.fixture(scope="session")
def cigre_overrides():
    names = (
        "cigre_open_switches.json",
        "cigre_closed_switches.json",
        "cigre_high_load.json",
        "cigre_low_load.json",
    )
    return {name: _override(name) for name in names}
