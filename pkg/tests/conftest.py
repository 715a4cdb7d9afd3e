import json
import pathlib

import pytest

import gamowlab as gl

GOLDEN = pathlib.Path(__file__).parent / "golden"


def golden(name):
    return json.loads((GOLDEN / name).read_text())


def as_complex(pair):
    return complex(pair[0], pair[1])


@pytest.fixture(scope="session")
def g0():
    return gl.ShellPotential(1.0, 2.0, 10.0)


@pytest.fixture(scope="session")
def free():
    return gl.ShellPotential(1.0, 2.0, 0.0)


@pytest.fixture(scope="session")
def well():
    return gl.ShellPotential(1.0, 2.0, -5.0)


@pytest.fixture(scope="session")
def g0_region():
    return gl.SearchRegion(0.1, 8.0, -3.0, -0.001, grid_step=0.5)


@pytest.fixture(scope="session")
def g0_poles(g0, g0_region):
    return gl.find_poles(g0, g0_region)


@pytest.fixture(scope="session")
def g0_states(g0, g0_poles):
    return gl.build_states(g0, g0_poles)


@pytest.fixture(scope="session")
def state1(g0_states):
    return next(s for s in g0_states if s.pole.n == 1)


@pytest.fixture(scope="session")
def packets():
    return gl.standard_packets()
