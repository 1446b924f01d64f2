import pytest

from divisor_moments.arith import DivisorPair
from divisor_moments.zeta import default_context

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def ctx():
    return default_context()


@pytest.fixture(scope="session")
def p11():
    return DivisorPair(1, 1)


@pytest.fixture(scope="session")
def p12():
    return DivisorPair(1, 2)


@pytest.fixture(scope="session")
def p23():
    return DivisorPair(2, 3)


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion and print it."""

    def record(label: str, passed: bool, detail: str, elapsed: float, budget: float | None) -> bool:
        timing = f"{elapsed:.1f}s" + (f" (budget {budget:g}s)" if budget else "")
        ok = passed and (budget is None or elapsed <= budget)
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}; {timing}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
