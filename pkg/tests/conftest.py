import pytest
from hypothesis import settings

from dhrsieve.rbound import default_optimizer
from dhrsieve.sievefn import default_evaluator

settings.register_profile("dhrsieve", max_examples=60, deadline=None)
settings.load_profile("dhrsieve")


@pytest.fixture(scope="session")
def sf():
    return default_evaluator()


@pytest.fixture(scope="session")
def opt():
    return default_optimizer()


# Acceptance results, one entry per criterion, printed after the run.
ACCEPTANCE: dict[int, dict] = {}


class AcceptanceRecorder:
    def __call__(self, number: int, title: str, passed: bool, detail: str = "") -> bool:
        entry = ACCEPTANCE.setdefault(number, {"title": title, "passed": True, "details": []})
        entry["passed"] &= bool(passed)
        if detail:
            entry["details"].append(detail if passed else f"{detail} [FAIL]")
        return bool(passed)


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[number]
        verdict = "PASS" if entry["passed"] else "FAIL"
        details = "; ".join(entry["details"])
        terminalreporter.write_line(f"[{verdict}] {number:2d}. {entry['title']}: {details}")
