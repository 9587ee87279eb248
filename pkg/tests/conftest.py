import math

import pytest

from qcomplex.core import ghz_state, paper_h4, paper_hq
from qcomplex.grover import build_gsa_state


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Keep searches and sweeps in-process so tests stay deterministic and fast."""
    monkeypatch.setenv("QCOMPLEX_THREADS", "1")
    monkeypatch.delenv("QCOMPLEX_TOL", raising=False)
    monkeypatch.delenv("QCOMPLEX_SUPPORT_EPS", raising=False)


@pytest.fixture
def h4():
    return paper_h4()


@pytest.fixture
def hq():
    return paper_hq()


@pytest.fixture
def ghz3():
    return ghz_state(3)


@pytest.fixture
def gsa3():
    return build_gsa_state(3, 0, 3.0 * math.asin(2.0 ** -1.5))
