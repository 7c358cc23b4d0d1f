import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

EXAMPLE_TAGS = ["I-ORG", "O", "I-PER", "O", "O", "I-LOC", "O"]


@pytest.fixture
def example_text():
    return (FIXTURES / "example_sentence.conll").read_text()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
