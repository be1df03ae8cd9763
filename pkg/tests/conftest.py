import json
from pathlib import Path

import pytest

from scholarqa.corpus import CorpusIndex, load_index

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


@pytest.fixture(scope="session")
def corpus_path() -> Path:
    return FIXTURES / "corpus_60.jsonl"


@pytest.fixture(scope="session")
def corpus_records(corpus_path) -> list[dict]:
    return [json.loads(line) for line in corpus_path.read_text().splitlines()]


@pytest.fixture(scope="session")
def corpus_index(corpus_path) -> CorpusIndex:
    return load_index(corpus_path)


@pytest.fixture(scope="session")
def claims_path() -> Path:
    return FIXTURES / "claims_250.jsonl"


_criterion_results: dict[str, str] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call":
        _criterion_results[marker.args[0]] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criterion_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criterion_results.items():
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
