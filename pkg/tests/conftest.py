from __future__ import annotations

import importlib.util
from pathlib import Path

import pytest

from featrec.recognizer import recognize
from featrec.synth import counterbore_fig8, standard_suite

DATA = Path(__file__).parent / "data"


def _golden_module():
    spec = importlib.util.spec_from_file_location("make_golden", DATA / "make_golden.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def cube():
    return _golden_module().cube()


@pytest.fixture(scope="session")
def fig8():
    return counterbore_fig8()


@pytest.fixture(scope="session")
def suite():
    return {sm.name: sm for sm in standard_suite()}


@pytest.fixture(scope="session")
def suite_results(suite):
    return {name: recognize(sm.model) for name, sm in suite.items()}


def pytest_terminal_summary(terminalreporter):
    """Print one line per acceptance criterion after the run."""
    try:
        from test_acceptance import CRITERIA, RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = RESULTS.get(n)
        if not runs:
            status, detail = "NOT RUN", ""
        else:
            status = "PASS" if all(ok for ok, _ in runs) else "FAIL"
            detail = "; ".join(d for ok, d in runs if not ok) or runs[-1][1]
        terminalreporter.write_line(f"criterion {n:2d} {status:7s} {title}: {detail}")
