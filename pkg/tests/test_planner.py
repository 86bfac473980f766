"""Receding-horizon planner: prediction model, boxes, zero-dominance."""

import numpy as np
import pytest

from lanegame.field import ObstacleFieldParams, ObstaclePose, RoadFieldParams, total_field
from lanegame.planner import (HorizonModel, MpcConfig, PlanResult, _coasted,
                              _outputs, _project, apply_receding, mpc_cost,
                              predict_outputs, solve_plan)
from lanegame.styles import style_profile
from lanegame.vehicle import IPHI, IVX, IX, IY, NX, VehicleParams

VP = VehicleParams()
DP = style_profile("normal").driver
OFP = ObstacleFieldParams()
RFP = RoadFieldParams()


def _x0(v=20.0, y=0.0):
    x = np.zeros(NX)
    x[IVX] = v
    x[IY] = y
    return x


def small_cfg(**kw):
    kw.setdefault("n_p", 12)
    kw.setdefault("n_c", 4)
    kw.setdefault("max_iter", 30)
    return MpcConfig(**kw)


def test_config_validation():
    with pytest.raises(ValueError):
        MpcConfig(n_p=3, n_c=5)
    with pytest.raises(ValueError):
        MpcConfig(n_c=0)
    with pytest.raises(ValueError):
        MpcConfig(dt=0.0)
    with pytest.raises(ValueError):
        MpcConfig(r=-1.0)
    with pytest.raises(ValueError):
        MpcConfig(q=np.ones((2, 2)))
    with pytest.raises(ValueError):
        MpcConfig(q=np.diag([1.0, -2.0, 1.0]))
    q = np.diag([1.0, 2.0, 3.0])
    q[0, 1] = 5.0
    with pytest.raises(ValueError):
        MpcConfig(q=q)
    with pytest.raises(ValueError):
        MpcConfig(u_min=1.0, u_max=-1.0)
    with pytest.raises(ValueError):
        MpcConfig(du_min=0.5, du_max=-0.5)


def test_horizon_model_needs_forward_speed():
    with pytest.raises(ValueError):
        HorizonModel(_x0(v=0.2), 0.0, 0.0, VP, DP, small_cfg())


def test_accel_enters_through_affine_term():
    # v_y = r = 0 at the linearization point, so the speed row of A is
    # zero and the discrete speed update is exactly v + a_x * dt.
    cfg = small_cfg()
    m = HorizonModel(_x0(), 0.0, 2.0, VP, DP, cfg)
    steps = np.arange(1, cfg.n_p + 1)
    assert np.allclose(m.base[:, IVX], 20.0 + 2.0 * cfg.dt * steps, atol=1e-12)
    m0 = HorizonModel(_x0(), 0.0, 0.0, VP, DP, cfg)
    assert np.allclose(m0.base[:, IVX], 20.0, atol=1e-12)


def test_base_is_held_command_rollout():
    cfg = small_cfg()
    m = HorizonModel(_x0(y=1.0), 0.5, 0.0, VP, DP, cfg)
    x = m.x0.copy()
    for i in range(cfg.n_p):
        x = m.a_d @ x + m.b_u * 0.5 + m.w_d
        assert np.allclose(m.base[i], x, atol=1e-12)
    assert np.allclose(m.states(np.zeros(cfg.n_c)), m.base)


def test_states_batched_matches_rows(rng):
    cfg = small_cfg()
    m = HorizonModel(_x0(), 0.0, 0.0, VP, DP, cfg)
    batch = rng.uniform(-0.3, 0.3, (7, cfg.n_c))
    got = m.states(batch)
    assert got.shape == (7, cfg.n_p, NX)
    for b in range(7):
        assert np.allclose(got[b], m.states(batch[b]), atol=1e-13)


def test_states_linear_in_du(rng):
    cfg = small_cfg()
    m = HorizonModel(_x0(), 0.0, 0.0, VP, DP, cfg)
    du = rng.uniform(-0.3, 0.3, cfg.n_c)
    lhs = m.states(2.0 * du) - m.base
    rhs = 2.0 * (m.states(du) - m.base)
    assert np.allclose(lhs, rhs, atol=1e-10)
    # Commands after n_c are held: the last increment reaches every later step.
    bump = np.zeros(cfg.n_c)
    bump[-1] = 0.1
    diff = m.states(bump) - m.base
    assert np.all(np.abs(diff[cfg.n_c - 1:, IY]) > 0.0) or np.any(diff != 0.0)


def test_coasted_sweeps_constant_velocity():
    cfg = small_cfg()
    obs = [ObstaclePose(x=10.0, y=-4.0, heading=0.1, v=15.0)]
    swept = _coasted(obs, cfg)
    assert len(swept) == 1
    t = (np.arange(cfg.n_p) + 1) * cfg.dt
    assert np.allclose(swept[0].x, 10.0 + 15.0 * t * np.cos(0.1))
    assert np.allclose(swept[0].y, -4.0 + 15.0 * t * np.sin(0.1))
    assert swept[0].heading == 0.1 and swept[0].v == 15.0


def test_outputs_channels(two_lane_road):
    cfg = small_cfg()
    m = HorizonModel(_x0(), 0.0, 0.0, VP, DP, cfg)
    obs = [ObstaclePose(x=30.0, y=0.0, heading=0.0, v=10.0)]
    states, y = predict_outputs(m, np.zeros(cfg.n_c), obs, two_lane_road, 1,
                                OFP, RFP)
    assert y.shape == (cfg.n_p, 3)
    # Cross-check the vectorized field sweep step by step.
    t = (np.arange(cfg.n_p) + 1) * cfg.dt
    for i in range(cfg.n_p):
        stepped = [ObstaclePose(x=30.0 + 10.0 * t[i], y=0.0, heading=0.0, v=10.0)]
        ref = total_field(states[i, IX], states[i, IY], stepped,
                          two_lane_road, OFP, RFP)
        assert y[i, 0] == pytest.approx(float(ref), rel=1e-12)
    # Lane 1 centerline sits at +4 on this road; the ego starts at 0.
    s, d = two_lane_road.to_frenet(states[:, IX], states[:, IY])
    assert np.allclose(y[:, 1], d - 4.0, atol=1e-12)
    assert np.allclose(y[:, 2], states[:, IPHI] - two_lane_road.tangent_heading(s),
                       atol=1e-12)


def test_mpc_cost_closed_form():
    q = np.diag([2.0, 1.0, 1.0])
    outputs = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 3.0]])
    du = np.array([0.5, -0.5])
    # 2*1 + 4 + 0 + 0 + 1 + 9 = 16, du energy = 0.5
    assert mpc_cost(outputs, du, q, 1.0) == pytest.approx(16.5)
    batch = np.stack([outputs, np.zeros_like(outputs)])
    got = mpc_cost(batch, np.stack([du, du]), q, 2.0)
    assert np.allclose(got, [17.0, 1.0])


def test_project_respects_running_command_box():
    cfg = small_cfg(u_min=-10.0, u_max=10.0, du_min=-0.3, du_max=0.3)
    out = _project(np.array([0.3, 0.3, 0.3, 0.3]), 9.9, cfg)
    assert np.allclose(out, [0.1, 0.0, 0.0, 0.0])
    out = _project(np.array([-1.0, -1.0, -1.0, -1.0]), -9.5, cfg)
    assert np.allclose(out, [-0.3, -0.2, 0.0, 0.0])
    # Inside every box the projection is the identity.
    du = np.array([0.1, -0.2, 0.05, 0.0])
    assert np.allclose(_project(du, 0.0, cfg), du)


def test_plan_never_beats_zero_baseline(two_lane_road, rng):
    cfg = small_cfg()
    for _ in range(5):
        x0 = _x0(v=rng.uniform(10.0, 25.0), y=rng.uniform(-1.0, 5.0))
        obs = [ObstaclePose(x=rng.uniform(10.0, 40.0), y=0.0, heading=0.0,
                            v=rng.uniform(5.0, 15.0))]
        plan = solve_plan(x0, 0.0, 0.0, obs, two_lane_road, 1, OFP, RFP,
                          cfg, VP, DP)
        assert plan.cost <= plan.cost_zero + 1e-12
        assert np.all(plan.du_sequence >= cfg.du_min - 1e-12)
        assert np.all(plan.du_sequence <= cfg.du_max + 1e-12)
        u = np.cumsum(plan.du_sequence)
        assert np.all(u >= cfg.u_min - 1e-9) and np.all(u <= cfg.u_max + 1e-9)
        assert plan.u_applied == pytest.approx(plan.du_sequence[0])


def test_plan_moves_toward_target_lane(two_lane_road):
    # Starting on lane 2 with the preview at the old centerline, switching
    # the target to lane 1 must pull the command upward and strictly
    # improve on doing nothing.
    cfg = small_cfg()
    plan = solve_plan(_x0(), 0.0, 0.0, [], two_lane_road, 1, OFP, RFP,
                      cfg, VP, DP)
    assert plan.cost < plan.cost_zero
    assert plan.du_sequence[0] > 0.0
    assert not plan.degraded
    assert plan.predicted_states.shape == (cfg.n_p, NX)
    assert plan.predicted_outputs.shape == (cfg.n_p, 3)


def test_plan_at_rest_point_stays_put(two_lane_road):
    # With the road field off, the target centerline with matching preview
    # is an exact rest point: every output is zero, the gradient vanishes,
    # and the optimizer must keep the zero sequence rather than wander.
    cfg = small_cfg()
    quiet = RoadFieldParams(edge_weight=0.0, interior_weight=0.0)
    plan = solve_plan(_x0(), 0.0, 0.0, [], two_lane_road, 2, OFP, quiet,
                      cfg, VP, DP)
    assert plan.cost_zero == pytest.approx(0.0, abs=1e-18)
    assert plan.cost == pytest.approx(plan.cost_zero, abs=1e-18)
    assert not np.any(plan.du_sequence)
    assert not plan.degraded


def test_plan_keeps_lane_despite_road_field(two_lane_road):
    # The live road field pulls slightly toward the road center; the lane
    # tracking term must keep that drift to centimeters over the horizon.
    cfg = small_cfg()
    plan = solve_plan(_x0(), 0.0, 0.0, [], two_lane_road, 2, OFP, RFP,
                      cfg, VP, DP)
    assert plan.cost <= plan.cost_zero
    assert np.max(np.abs(plan.predicted_outputs[:, 1])) < 0.2


def test_apply_receding_uses_first_increment():
    plan = PlanResult(du_sequence=np.array([0.2, -0.1]), u_applied=1.2,
                      predicted_states=np.zeros((1, NX)),
                      predicted_outputs=np.zeros((1, 3)), cost=0.0,
                      cost_zero=0.0, iterations=1, degraded=False)
    assert apply_receding(1.0, plan) == pytest.approx(1.2)
