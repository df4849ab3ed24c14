import pytest

from colorlab.graph_core import LabeledGraph

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[n] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def triangle():
    return LabeledGraph([1, 2, 3], [(1, 2), (2, 3), (1, 3)])


@pytest.fixture
def path3():
    return LabeledGraph([1, 2, 3], [(1, 2), (2, 3)])
