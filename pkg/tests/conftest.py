from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

# lines recorded by the acceptance suite, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running (minutes)")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    """``record(criterion, ok, detail)`` adds one line to the acceptance summary."""

    def record(criterion: int, ok: bool | None, detail: str) -> str:
        tag = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        line = f"{tag} criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return line

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def reduced_spike_path() -> Path:
    return DATA / "reduced_spike.json"


@pytest.fixture(scope="session")
def full_spike_path() -> Path:
    return DATA / "full_spike.json"
