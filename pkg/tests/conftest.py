from __future__ import annotations

import numpy as np
import pytest

from foxartin.arcs import assemble_wild_arc, build_arc_triple
from foxartin.sphere import pixton_map, trivial_sphere_map
from foxartin.surgery import build_surgery
from foxartin.tube import frame_chart, radial_chart


@pytest.fixture(scope="session")
def triple():
    return build_arc_triple(64)


@pytest.fixture(scope="session")
def wild_model(triple):
    return assemble_wild_arc(triple, 3)


@pytest.fixture(scope="session")
def frame3(wild_model):
    return frame_chart(wild_model, 3)


@pytest.fixture(scope="session")
def radial3():
    return radial_chart(np.array([0.0, 0.0, 1.0]))


@pytest.fixture(scope="session")
def pixton():
    return pixton_map()


@pytest.fixture(scope="session")
def trivial4():
    return trivial_sphere_map(4)


@pytest.fixture(scope="session")
def surgery_arc():
    return build_surgery("arc")


@pytest.fixture(scope="session")
def surgery_cylinder():
    return build_surgery("cylinder")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
