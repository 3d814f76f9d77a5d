import pytest

from combspecies.parser import parse_system
from combspecies.resources import corpus_names, load_corpus

CLASSICAL = [n for n in corpus_names() if load_corpus(n).mode == "classical"]
LINEAR = [n for n in corpus_names() if load_corpus(n).mode == "linear"]
# systems without Set/Cyc/PSet
FLAT = ["catalan", "motzkin"]


@pytest.fixture
def catalan():
    return load_corpus("catalan")


@pytest.fixture
def cayley():
    return load_corpus("cayley")


def spec(text: str):
    return parse_system(text)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
