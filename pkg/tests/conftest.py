import pytest
from hypothesis import HealthCheck, settings

from _support import aluminium, bundled

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def proton_range():
    return bundled("range_proton_al.csv", "csda_range")


@pytest.fixture(scope="session")
def electron_range():
    return bundled("range_electron_al.csv", "csda_range")


@pytest.fixture(scope="session")
def photon_mu():
    return bundled("mu_photon_al.csv", "mass_attenuation")


@pytest.fixture
def shield():
    return aluminium


SUITE_BUDGET_S = 60.0
_start = {}


def pytest_sessionstart(session):
    import time

    _start["t"] = time.perf_counter()


def _elapsed():
    import time

    return time.perf_counter() - _start.get("t", time.perf_counter())


def pytest_terminal_summary(terminalreporter):
    import test_acceptance as acc

    if not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for item in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.format_result(*item))
    elapsed = _elapsed()
    flag = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(f"[{flag}] criterion 7: full suite runtime {elapsed:.1f} s (limit {SUITE_BUDGET_S:g} s)")


def pytest_sessionfinish(session, exitstatus):
    if _start and _elapsed() >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
