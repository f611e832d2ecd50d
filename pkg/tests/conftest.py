from pathlib import Path

import pytest

from critshock.model import build_problem, load_problem

MODELS = Path(__file__).resolve().parent.parent / "models"


@pytest.fixture(scope="session")
def burgers():
    return load_problem(MODELS / "burgers.model")


@pytest.fixture(scope="session")
def generalized():
    return load_problem(MODELS / "generalized.model")


def make_spec(**values):
    raw = {"a": "u", "F": "1/(1+x^2)", "branch_lo": "0", "branch_hi": "20"}
    raw.update({k: str(v) for k, v in values.items()})
    return build_problem(raw)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
