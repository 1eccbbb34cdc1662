import pytest

from riskexpansion import load_instance
from riskexpansion.cli import bundled_path

from helpers import probe_doc


@pytest.fixture(scope="session")
def toy():
    return load_instance(bundled_path("toy"))


@pytest.fixture(scope="session")
def hedging():
    return load_instance(bundled_path("hedging"))


@pytest.fixture(scope="session")
def interconnect():
    return load_instance(bundled_path("interconnect"))


@pytest.fixture
def probe():
    return probe_doc


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, elapsed, why = ACCEPTANCE[number]
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f} s)"
        if why:
            line += f"  -- {why}"
        terminalreporter.write_line(line)
