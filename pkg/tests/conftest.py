import numpy as np
import pytest

from gvc_atlas.core import ICIOTable, NodeIndex, SectorGroup, build_table
from gvc_atlas.ingest import SynthParams, synth_economy

MANUF = SectorGroup.MANUFACTURING


def worked(group_b=MANUF, year=2000):
    """Two countries, one sector each; A sells 50 to B as intermediate."""
    nodes = (NodeIndex("A", "M", MANUF), NodeIndex("B", "M", group_b))
    Z = [[0.0, 50.0], [0.0, 0.0]]
    F = [[30.0, 20.0], [40.0, 80.0]]
    return ICIOTable(nodes, Z, F, va=[100.0, 70.0], x=[100.0, 120.0], year=year)


def autarkic(year=2000):
    nodes = (NodeIndex("A", "M", MANUF), NodeIndex("A", "P", SectorGroup.PRIMARY), NodeIndex("B", "M", MANUF))
    A = np.array([[0.1, 0.2, 0.0], [0.3, 0.1, 0.0], [0.0, 0.0, 0.25]])
    F = np.array([[50.0, 0.0], [20.0, 0.0], [0.0, 70.0]])
    return build_table(nodes, A, F, year)


def three_country():
    """Three countries with mixed sector groups and dense linkages."""
    groups = [MANUF, SectorGroup.PRIMARY, SectorGroup.BUSINESS_SERVICES]
    nodes = tuple(NodeIndex(c, f"S{k}", groups[(i + k) % 3]) for i, c in enumerate("XYZ") for k in range(2))
    rng = np.random.default_rng(7)
    A = rng.uniform(0, 1, (6, 6))
    A = A / A.sum(axis=0) * np.array([0.5, 0.3, 0.6, 0.45, 0.2, 0.55])
    F = rng.uniform(5, 50, (6, 3))
    return build_table(nodes, A, F, 2010)


@pytest.fixture
def worked_table():
    return worked()


@pytest.fixture
def autarkic_table():
    return autarkic()


@pytest.fixture
def three_country_table():
    return three_country()


@pytest.fixture(params=[(3, 2, 42), (2, 1, 1), (5, 3, 9), (4, 4, 77)], ids=lambda p: f"G{p[0]}N{p[1]}s{p[2]}")
def synth_table(request):
    g, n, seed = request.param
    return synth_economy(SynthParams(g, n, seed))


_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
        _ACCEPTANCE.append((status, marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, name in _ACCEPTANCE:
        terminalreporter.write_line(f"{status:4}  {name}")
