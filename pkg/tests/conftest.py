import os
from pathlib import Path

import pytest

from wsrefine.derivation import replay_all
from wsrefine.syntax.parser import parse_derivation, parse_program
from wsrefine.universe import small_universe

DATA = Path(__file__).resolve().parents[1] / "src" / "wsrefine" / "data"
GOLDEN = Path(__file__).resolve().parent / "golden"

os.environ.setdefault("HYPOTHESIS_PROFILE", "ci")

try:
    from hypothesis import settings

    settings.register_profile("ci", max_examples=60, deadline=None, derandomize=True)
    settings.load_profile("ci")
except ImportError:  # pragma: no cover
    pass


def load(name: str):
    return parse_program((DATA / name).read_text())


def scripts(name: str):
    return parse_derivation((DATA / name).read_text())


@pytest.fixture(scope="session")
def u22():
    return small_universe(2, 2)


@pytest.fixture(scope="session")
def factorial_program():
    return load("factorial.wsl")


@pytest.fixture(scope="session")
def nqueens_program():
    return load("nqueens.wsl")


@pytest.fixture(scope="session")
def factorial_reports(factorial_program):
    return replay_all(scripts("factorial.wsd"), factorial_program)


@pytest.fixture(scope="session")
def nqueens_reports(nqueens_program):
    return replay_all(scripts("nqueens.wsd"), nqueens_program)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
