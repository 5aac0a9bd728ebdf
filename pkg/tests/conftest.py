import pytest
from hypothesis import settings

from helpers import CRITERIA_LOG, WORKED_TRIPLES, worked
from mahlermu.series import expand_any

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def worked_series():
    return {t: (worked(*t), expand_any(worked(*t), 64)) for t in WORKED_TRIPLES}


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LOG:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LOG):
            terminalreporter.write_line(line)
