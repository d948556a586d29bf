import pytest

from perishable_duopoly.model import ModelParams


@pytest.fixture
def reference_params():
    return ModelParams(temperature=0.02, greed=0.6)


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = sorted(getattr(module, "RESULTS", []), key=lambda ln: int(ln.split()[2].rstrip(":")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
