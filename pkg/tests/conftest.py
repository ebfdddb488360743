import pytest

from bottlemode.coupling import sphere_mode, sphere_mode_volume
from bottlemode.fields import mode_volume
from bottlemode.modes import solve_bottle_mode

DESIGN = dict(target_wavelength=0.852, R_c=7.8, delta_k=0.0032, q=80)


@pytest.fixture(scope="session")
def design_mode():
    return solve_bottle_mode(**DESIGN)


@pytest.fixture(scope="session")
def design_volume(design_mode):
    return mode_volume(design_mode)


@pytest.fixture(scope="session")
def small_mode():
    """Low-order mode that solves quickly, for property tests."""
    return solve_bottle_mode(0.852, 3.0, 0.01, 2)


@pytest.fixture(scope="session")
def microsphere():
    return sphere_mode(25.0, 0.852)


@pytest.fixture(scope="session")
def microsphere_volume(microsphere):
    return sphere_mode_volume(microsphere)


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance criteria lines collected by test_acceptance.py."""
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
