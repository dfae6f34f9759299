import pytest

from frrplan.fleet import Fleet, GeneratorUnit
from frrplan.synthetic import DEADBAND_HZ, base_condition, synthetic_fleet

_CRITERIA = []


def record_criterion(number, ok, detail):
    """Collect one acceptance line; printed in the terminal summary."""
    _CRITERIA.append((number, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_CRITERIA, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}")


def unit(uid, fuel="gas", *, rated=1000.0, pmax=900.0, pset=600.0, h=4.0, droop=0.05,
         db=0.0, responsive=True, committed=True, rank=1):
    return GeneratorUnit(
        id=uid, fuel_type=fuel, rated_mva=rated, pmax_mw=pmax, pset_mw=pset,
        inertia_h_s=h, droop_pu=droop if responsive else 0.0, deadband_hz=db,
        responsive=responsive, committed=committed, merit_rank=rank,
    )


@pytest.fixture(scope="session")
def ei_fleet():
    return synthetic_fleet(deadband_hz=DEADBAND_HZ)


@pytest.fixture(scope="session")
def ei_cond():
    return base_condition()


@pytest.fixture
def small_fleet():
    return Fleet((
        unit("h1", "hydro", pset=800.0, rank=3),
        unit("s1", "steam", pset=600.0, rank=2),
        unit("g1", "gas", pset=500.0, pmax=800.0, rank=1),
        unit("n1", "steam", pmax=950.0, pset=950.0, responsive=False, rank=4),
    ))
