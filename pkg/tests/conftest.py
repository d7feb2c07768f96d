import sys
from pathlib import Path

# test modules import the shared hypothesis strategies as a top-level module
sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, str] = {}
_nodes: dict[str, int] = {}
_outcomes: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, label): acceptance criterion number n")


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            n, label = m.args
            _criteria[n] = label
            _nodes[item.nodeid] = n


def pytest_runtest_logreport(report):
    n = _nodes.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(n, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _outcomes.get(n, [])
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"AC{n:<2} {status:<7} {_criteria[n]}")
