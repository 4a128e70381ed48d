import pytest

from protocomplex.adversary import (
    immediate_snapshot_model,
    reliable_broadcast_model,
    synchronous_broadcast_model,
)
from protocomplex.cset import AgentSet, standard_simplex
from protocomplex.protocol import ProtocolFunctor


@pytest.fixture(scope="session")
def abc():
    return AgentSet("abc")


@pytest.fixture(scope="session")
def ab():
    return AgentSet("ab")


@pytest.fixture(scope="session")
def IS3(abc):
    return ProtocolFunctor(immediate_snapshot_model(abc), "is")


@pytest.fixture(scope="session")
def IS2(ab):
    return ProtocolFunctor(immediate_snapshot_model(ab), "is")


@pytest.fixture(scope="session")
def SYNC3(abc):
    return ProtocolFunctor(synchronous_broadcast_model(abc), "sync")


@pytest.fixture(scope="session")
def RB3(abc):
    return ProtocolFunctor(reliable_broadcast_model(abc), "rb")


@pytest.fixture(scope="session")
def tri(abc):
    return standard_simplex(abc, "a,b,c")


@pytest.fixture(scope="session")
def edge(ab):
    return standard_simplex(ab, "a,b")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
