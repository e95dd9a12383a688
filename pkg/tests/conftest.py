import warnings

import pytest
from hypothesis import HealthCheck, settings

from scatlab import potential as P
from scatlab import radial as R
from scatlab import scattering as S

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_numba():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*TBB.*")
        yield


@pytest.fixture(scope="session")
def solver():
    return R.SolverSettings()


@pytest.fixture(scope="session")
def pt_profile(solver):
    return S.build_profile(P.poschl_teller(1.0), solver)


@pytest.fixture(scope="session")
def gauss3():
    return P.gaussian(3, -2.0, 1.0)


@pytest.fixture(scope="session")
def gauss3_profile(gauss3, solver):
    return S.build_profile(gauss3, solver)


@pytest.fixture(scope="session")
def well3_profile(solver):
    return S.build_profile(P.square_well(3, 4.0, 1.0), solver)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_ACCEPTANCE, {})
    if log:
        terminalreporter.write_sep("=", "acceptance criteria")
        for key in sorted(log):
            terminalreporter.write_line(log[key])
