import os

import pytest

from hirefire.model import validate_params

# default parameter set (c0 and p only matter for U)
BASE = dict(mu0=1.4, mu1=1.7, sigma=1.0, p=0.5, r=0.05, c0=1.2, c1=1.5)


@pytest.fixture
def base():
    return validate_params(**BASE)


@pytest.fixture
def make_params():
    def make(**over):
        return validate_params(**{**BASE, **over})
    return make


def pytest_configure(config):
    os.environ.setdefault("NUMBA_CACHE_DIR", os.path.join(str(config.rootpath), ".numba_cache"))


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """criterion number -> list of (passed, detail); summarised after the run."""
    return request.config.stash.setdefault(ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(ACCEPTANCE, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(log):
        ok = all(p for p, _ in log[k])
        detail = "; ".join(d for _, d in log[k])
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
