import importlib.util
import shutil
import sys
from collections import defaultdict
from pathlib import Path

import pytest

from asp_mustache.interpretation import Interpretation
from asp_mustache.solver import ClingoClient

DATA = Path(__file__).parent / "data"


def solver_command():
    if shutil.which("clingo"):
        return "clingo"
    if importlib.util.find_spec("clingo") is not None:
        return f"{sys.executable} -m clingo"
    return None


def read(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


def facts(name: str) -> Interpretation:
    return Interpretation.parse(read(name))


@pytest.fixture
def solver():
    command = solver_command()
    if command is None:
        pytest.skip("no clingo available")
    return ClingoClient(command)


# ------------------------------------------------- acceptance criteria report

_criteria = {}
_outcomes = defaultdict(list)


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _criteria[item.nodeid] = (mark.args[0], mark.args[1])


def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes[_criteria[report.nodeid]].append("SKIP" if report.skipped else report.outcome.upper())


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), results in sorted(_outcomes.items()):
        if "FAILED" in results:
            verdict = "FAIL"
        elif all(r == "SKIP" for r in results):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {title}  ({len(results)} checks)")
