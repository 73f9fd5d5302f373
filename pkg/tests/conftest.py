import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: time-domain runs taking several seconds")


@pytest.fixture(scope="session")
def bundled_scenarios():
    from importlib import resources

    return resources.files("tunnelkit").joinpath("scenarios")


_RUNS = {}


@pytest.fixture(scope="session")
def run_bundled(bundled_scenarios):
    """Simulate a bundled scenario once per session and reuse the result."""
    import json

    from tunnelkit.tdse import TraversalScenario, simulate_traversal

    def run(name):
        if name not in _RUNS:
            data = json.loads(bundled_scenarios.joinpath(name).read_text())
            _RUNS[name] = simulate_traversal(TraversalScenario.from_json(data))
        return _RUNS[name]

    return run


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
