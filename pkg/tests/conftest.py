import random
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from timdof.topology import NetworkTopology, load_fixture  # noqa: E402


@pytest.fixture(params=["hexnet6", "paper7", "square8", "iconflict3"])
def fixture_name(request):
    return request.param


@pytest.fixture
def hexnet6():
    return load_fixture("hexnet6")


@pytest.fixture
def paper7():
    return load_fixture("paper7")


@pytest.fixture
def square8():
    return load_fixture("square8")


@pytest.fixture
def iconflict3():
    return load_fixture("iconflict3")


@st.composite
def topologies(draw, max_k=8):
    K = draw(st.integers(1, max_k))
    interferers = {}
    for k in range(1, K + 1):
        others = [i for i in range(1, K + 1) if i != k]
        interferers[k] = draw(st.sets(st.sampled_from(others), max_size=len(others))) if others else set()
    return NetworkTopology.from_interferers(K, interferers)


def seeded(seed):
    return random.Random(seed)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
