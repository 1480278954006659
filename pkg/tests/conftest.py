import pytest

from frachs.grid import ProblemParams, make_grid
from frachs.profiles import localized_random, random_smooth


@pytest.fixture(scope="session")
def line_grid():
    return make_grid(1, 1024, 50.0)


@pytest.fixture(scope="session")
def params_half():
    """n=1, alpha=0.5, s=0.25 with a moderate positive Hardy coupling."""
    p = ProblemParams(1, 0.5, 0.25, 0.0)
    return p.with_gamma(0.3 * p.gamma_H)


def seeded_fields(grid, count, first_seed=0, localized=True):
    """Deterministic family of test fields on ``grid``."""
    make = localized_random if localized else random_smooth
    return [make(grid, seed) for seed in range(first_seed, first_seed + count)]


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
