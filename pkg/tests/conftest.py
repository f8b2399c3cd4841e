import pathlib

import pytest

from bigtor.cli import parse_problem

DATA_DIR = pathlib.Path(__file__).parent / "data"

CORPUS_NAMES = [
    "wps12",
    "wps123",
    "cp1cp1",
    "prod1212",
    "cut_k1",
    "cut_k2",
    "ann_square",
]


def load_problem(name):
    return parse_problem((DATA_DIR / f"{name}.tcx").read_text())


@pytest.fixture(scope="session")
def corpus():
    return {name: load_problem(name) for name in CORPUS_NAMES}


@pytest.fixture(params=CORPUS_NAMES)
def corpus_problem(request, corpus):
    return request.param, corpus[request.param]


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
