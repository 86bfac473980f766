"""Potential field: obstacle bump shape, road barrier, composition."""

import math

import numpy as np
import pytest

from lanegame.errors import DomainError
from lanegame.field import (ObstacleFieldParams, ObstaclePose, RoadFieldParams,
                            gamma_crit, obstacle_field, road_field, total_field)

P = ObstacleFieldParams(a_oc=50.0, rho_x=8.0, rho_y=1.2, b=1.0, c=0.05)


def test_peak_at_center_regardless_of_speed():
    for v in (0.0, 10.0, 30.0):
        obs = ObstaclePose(x=3.0, y=-1.0, heading=0.2, v=v)
        assert obstacle_field(3.0, -1.0, obs, P) == pytest.approx(50.0, abs=1e-12)


def test_one_shape_unit_out():
    # At x-hat = rho_x * sqrt(2) the exponent is exactly -1 for a still car.
    obs = ObstaclePose(x=0.0, y=0.0, v=0.0)
    val = obstacle_field(8.0 * math.sqrt(2.0), 0.0, obs, P)
    assert val == pytest.approx(50.0 * math.exp(-1.0), rel=1e-12)
    assert gamma_crit(P) == pytest.approx(50.0 / math.e, rel=1e-12)


def test_fore_aft_symmetry_when_still():
    obs = ObstaclePose(x=10.0, y=2.0, v=0.0)
    dx = np.linspace(0.5, 20.0, 40)
    fore = obstacle_field(10.0 + dx, 2.0, obs, P)
    aft = obstacle_field(10.0 - dx, 2.0, obs, P)
    assert np.max(np.abs(fore - aft)) < 1e-12


def test_forward_skew_when_moving():
    obs = ObstaclePose(x=0.0, y=0.0, v=20.0)
    dx = np.linspace(0.5, 25.0, 50)
    fore = obstacle_field(dx, 0.0, obs, P)
    aft = obstacle_field(-dx, 0.0, obs, P)
    assert np.all(fore >= aft)
    assert np.any(fore > aft * 1.5)


def test_rotation_invariance():
    ang = 0.77
    obs0 = ObstaclePose(x=0.0, y=0.0, heading=0.0, v=12.0)
    obs1 = ObstaclePose(x=0.0, y=0.0, heading=ang, v=12.0)
    pts = np.array([[4.0, 1.0], [-3.0, 0.4], [10.0, -2.0], [0.3, 0.0]])
    ch, sh = math.cos(ang), math.sin(ang)
    rot = np.array([[ch, -sh], [sh, ch]])
    rotated = pts @ rot.T
    v0 = obstacle_field(pts[:, 0], pts[:, 1], obs0, P)
    v1 = obstacle_field(rotated[:, 0], rotated[:, 1], obs1, P)
    assert np.max(np.abs(v1 - v0)) < 1e-12


def test_array_valued_pose_matches_scalar_loop():
    # The planner sweeps obstacles along the horizon by handing the pose
    # arrays of positions; elementwise it must agree with scalar poses.
    t = np.arange(1, 6) * 0.1
    h, v = 0.3, 14.0
    xs = 2.0 + v * t * math.cos(h)
    ys = -1.0 + v * t * math.sin(h)
    swept = ObstaclePose(x=xs, y=ys, heading=h, v=v)
    qx = np.linspace(0.0, 12.0, 5)
    qy = np.linspace(-2.0, 2.0, 5)
    batched = obstacle_field(qx, qy, swept, P)
    single = [obstacle_field(qx[i], qy[i],
                             ObstaclePose(x=xs[i], y=ys[i], heading=h, v=v), P)
              for i in range(5)]
    assert np.allclose(batched, single, atol=1e-15)


def test_road_field_decays_from_edges(two_lane_road):
    rp = RoadFieldParams(a_r=10.0, d_safe=0.2, w=1.8)
    # Left edge sits at d = +6, right edge at d = -2, interior midpoint at 2.
    d_from_left = np.linspace(6.0, 2.0, 30)
    vals_left = road_field(np.zeros(30), d_from_left, two_lane_road, rp)
    assert np.all(np.diff(vals_left) < 0.0)
    d_from_right = np.linspace(-2.0, 2.0, 30)
    vals_right = road_field(np.zeros(30), d_from_right, two_lane_road, rp)
    assert np.all(np.diff(vals_right) < 0.0)


def test_road_field_line_value(two_lane_road):
    rp = RoadFieldParams(a_r=10.0, d_safe=0.2, w=1.8)
    # On the left edge line the own-line term is a_r e^(d_safe + w/2);
    # the far edge adds its tail from 8 m away.
    val = road_field(0.0, 6.0, two_lane_road, rp)
    own = 10.0 * math.exp(0.2 + 0.9)
    far = 10.0 * math.exp(-8.0 + 0.2 + 0.9)
    assert val == pytest.approx(own + far, rel=1e-12)


def test_interior_lines_can_be_weighted(two_lane_road):
    rp = RoadFieldParams(a_r=10.0, d_safe=0.2, w=1.8, interior_weight=1.0)
    base = RoadFieldParams(a_r=10.0, d_safe=0.2, w=1.8)
    # Lane divider of the two-lane road sits at d = +2.
    with_div = road_field(0.0, 2.0, two_lane_road, rp)
    without = road_field(0.0, 2.0, two_lane_road, base)
    assert with_div == pytest.approx(without + 10.0 * math.exp(0.2 + 0.9), rel=1e-12)


def test_station_domain_enforced(three_lane_arc):
    rp = RoadFieldParams()
    x, y = three_lane_arc.to_global(-5.0, 0.0)
    with pytest.raises(DomainError):
        road_field(x, y, three_lane_arc, rp)
    x, y = three_lane_arc.to_global(three_lane_arc.length + 5.0, 0.0)
    with pytest.raises(DomainError):
        road_field(x, y, three_lane_arc, rp)


def test_total_is_sum_of_parts(two_lane_road):
    rp = RoadFieldParams()
    obs = [ObstaclePose(x=30.0, y=0.0, v=10.0), ObstaclePose(x=60.0, y=4.0, v=5.0)]
    qx = np.linspace(10.0, 80.0, 15)
    qy = np.linspace(-1.0, 5.0, 15)
    total = total_field(qx, qy, obs, two_lane_road, P, rp)
    parts = (obstacle_field(qx, qy, obs[0], P) + obstacle_field(qx, qy, obs[1], P)
             + road_field(qx, qy, two_lane_road, rp))
    assert np.allclose(total, parts, rtol=1e-14)
    off_road = total_field(qx, qy, obs, None, P, rp)
    assert np.allclose(off_road, parts - road_field(qx, qy, two_lane_road, rp),
                       rtol=1e-13)


def test_param_validation():
    with pytest.raises(ValueError):
        ObstacleFieldParams(a_oc=0.0)
    with pytest.raises(ValueError):
        ObstacleFieldParams(b=0.5)
    with pytest.raises(ValueError):
        ObstacleFieldParams(c=-0.1)
    with pytest.raises(ValueError):
        RoadFieldParams(a_r=0.0)
    with pytest.raises(ValueError):
        RoadFieldParams(d_safe=-1.0)
