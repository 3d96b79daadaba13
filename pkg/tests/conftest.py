import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from agentarch.corpus import builtin, load_env

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def rl():
    return builtin("RL")


@pytest.fixture(scope="session")
def crl():
    return builtin("CRL")


@pytest.fixture(scope="session")
def grid4():
    return load_env("grid4")


@pytest.fixture(scope="session")
def chain2():
    return load_env("chain2")


@pytest.fixture(scope="session")
def cheat():
    return load_env("grid4_cheat")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def tabular_agent(grid4):
    from agentarch.rl_runtime import build_rl_agent

    return build_rl_agent(grid4, "tabular", {"seed": 0})


@pytest.fixture(scope="session")
def neural_agent(grid4):
    from agentarch.rl_runtime import build_rl_agent

    return build_rl_agent(grid4, "neural", {"seed": 0, "neural_steps": 2000, "width": 8})


@pytest.fixture(scope="session")
def crl_agent(grid4):
    from agentarch.rl_runtime import build_crl_agent

    return build_crl_agent(grid4, {"seed": 0})


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, format_line
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(format_line(n))
