from pathlib import Path

import pytest

from cmdviz import Experiment

DATA = Path(__file__).resolve().parent.parent / "data"

MEMORY_ROWS = (
    [[0.20, 0.50], [0.25, 0.50], [0.45, 0.70]],
    [[0.70, 0.70], [0.75, 0.70], [0.70, 0.75]],
    [[0.25, 1.00], [0.50, 0.60], [0.75, 0.55]],
)


def make_memory() -> Experiment:
    return Experiment(
        ("A1", "A2", "A3"), ("recall", "association"), ("noise_hours",),
        tuple(([t], rows) for t, rows in enumerate(MEMORY_ROWS)),
    )


@pytest.fixture
def memory():
    return make_memory()


@pytest.fixture
def memory_json_path():
    return DATA / "memory.json"


@pytest.fixture
def memory_csv_path():
    return DATA / "memory.csv"


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
