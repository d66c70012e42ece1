from pathlib import Path

import pytest

from slfusion import Domain, MultinomialOpinion
from slfusion.table import table_inputs

FIXTURES = Path(__file__).parent / "fixtures"

BINARY = Domain(("x", "not_x"))


def max_diff(a, b) -> float:
    """Largest component-wise difference between two opinions (b, u and a)."""
    keys = set(a.belief) | set(b.belief)
    diffs = [abs(a.b(x) - b.b(x)) for x in keys]
    diffs.append(abs(a.uncertainty - b.uncertainty))
    diffs.extend(abs(p - q) for p, q in zip(a.base_rate, b.base_rate))
    return max(diffs)


def binomial(bx, bnx, u, a=(0.5, 0.5)):
    return MultinomialOpinion.from_vector(BINARY, (bx, bnx), u, a)


@pytest.fixture
def table_ops():
    return table_inputs()


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


_acceptance = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
