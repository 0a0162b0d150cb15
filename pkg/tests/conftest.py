import pytest

from sessiontree.session import build_session_tree, parse_session_line

EXAMPLE_LINES = [
    "S1,student: doc_seed -> citation -> doc_1 -> citation -> doc_seed -> search",
    "S2,student: doc_seed -> journal -> doc_seed -> author -> doc_1 -> author -> doc_2",
    "S3,postdoc: doc_seed -> search -> doc_1 -> search -> doc_2 -> search -> doc_seed"
    " -> journal -> doc_seed -> citation -> doc_3",
]


@pytest.fixture
def example_records():
    return [parse_session_line(line) for line in EXAMPLE_LINES]


@pytest.fixture
def example_trees(example_records):
    return [build_session_tree(r) for r in example_records]


# verdict lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
