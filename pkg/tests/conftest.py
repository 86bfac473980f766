"""Shared scene builders for the test suite.

Everything here is deterministic: random draws always come from a
freshly seeded generator so repeated runs see identical inputs.
"""

import numpy as np
import pytest

from lanegame.costs import CostGains, KinematicState, LaneView, NeighborView
from lanegame.road import LaneSpec, RoadGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def gains():
    return CostGains()


@pytest.fixture
def two_lane_road():
    return RoadGeometry(kind="straight", length=500.0, lane_width=4.0,
                        lanes={1: LaneSpec(index=1), 2: LaneSpec(index=2)})


@pytest.fixture
def three_lane_arc():
    return RoadGeometry(kind="arc", radius=2000.0, length=600.0, lane_width=4.0,
                        lanes={1: LaneSpec(index=1), 2: LaneSpec(index=2),
                               3: LaneSpec(index=3)})


def make_neighbors(lanes=None, **kw) -> NeighborView:
    """Two open lanes by default; callers override per test."""
    if lanes is None:
        lanes = {1: LaneView(), 2: LaneView()}
    return NeighborView(lanes=lanes, **kw)


@pytest.fixture
def open_neighbors():
    return make_neighbors()


@pytest.fixture
def merge_neighbors():
    """Ego on lane 2 behind nothing, one opponent on lane 1."""
    return make_neighbors(lanes={
        1: LaneView(adjacent=KinematicState(s=0.0, v=15.0), adjacent_v_ref=15.0),
        2: LaneView(),
    })
