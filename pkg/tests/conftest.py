"""Shared paths and cached model loads for the test suite."""

from pathlib import Path

import pytest

from rtabs import load_model

TESTS_DIR = Path(__file__).resolve().parent
MODELS_DIR = TESTS_DIR.parent / "models"
GOLDEN_DIR = TESTS_DIR / "golden"

# verdict lines collected by the acceptance module; echoed after the
# test summary so they survive output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def model_file(name: str) -> str:
    return str(MODELS_DIR / name)


@pytest.fixture(scope="session")
def single_request_model():
    return load_model(model_file("single_request.rtabs"))


@pytest.fixture(scope="session")
def media_models():
    """The media-server workload under its five scheduler variants."""
    names = ("sjf", "edf", "fifo", "adaptive_low", "adaptive_high")
    return {name: load_model(model_file(f"media_server_{name}.rtabs"))
            for name in names}


@pytest.fixture(scope="session")
def monitor_models():
    return {name: load_model(model_file(f"monitor_{name}.rtabs"))
            for name in ("simple", "general")}
