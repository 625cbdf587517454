import pytest

from matchq import solve

from reference_models import table1_model, table2_model


@pytest.fixture(scope="session")
def map2_model():
    return table1_model("map2", (0.25, 1.0))


@pytest.fixture(scope="session")
def map2_solution(map2_model):
    return solve(map2_model)


@pytest.fixture(scope="session")
def exp_model():
    return table2_model("exponential", (1.0, 2.0))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
