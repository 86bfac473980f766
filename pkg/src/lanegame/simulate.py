"""Closed-loop simulation of one scenario and its run metrics.

Per step: (1) finish or continue any committed lane change, (2) if no
change is in progress, build the ego's view of the scene and solve the
decision game, (3) log style-free running cost components, (4) plan the
steering preview command, (5) integrate the ego and advance the other
cars as point masses.

Other cars follow their initial lane; adjacent (strategic) cars apply
the acceleration from their side of the game while one is active and
hold it during the ego's lane change, then coast. Everything is
deterministic, so repeated runs produce identical traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .costs import (CostGains, KinematicState, LaneView, NeighborView,
                    lane_change_lat_accel, lateral_safety_cost,
                    longitudinal_safety_cost)
from .errors import InfeasibleDecisionError
from .field import ObstaclePose, total_field
from .games import (GameSolution, solve_nash_2p, solve_nash_two_ac,
                    solve_solo, solve_stackelberg_2p, solve_stackelberg_two_ac)
from .planner import solve_plan
from .road import RoadGeometry
from .scenario import EGO_ROLE, ScenarioConfig
from .styles import style_profile
from .vehicle import (DEFAULT_VEHICLE, IDELTA, IPHI, IR, IVX, IVY, IX, IY,
                      ControlInput, DriverParams, step)

# Cars closer laterally than this are treated as sharing a lane when the
# inter-vehicle clearance metric is collected.
LANE_SHARE_BAND = 2.5


@dataclass
class _Car:
    """Point-mass runtime state of a non-ego vehicle."""

    role: str
    lane: int
    strategic: bool
    style: str
    s: float
    d: float
    v: float
    v_ref: float     # initial speed, defended as the car's own cruise speed
    a: float = 0.0


@dataclass
class TraceLog:
    """Column-oriented record of one run."""

    scenario: str
    style: str
    strategy: str
    dt: float
    columns: list[str]
    rows: list[list[float]] = field(default_factory=list)
    roles: list[str] = field(default_factory=list)
    aborted: bool = False
    abort_reason: str = ""

    def column(self, name: str) -> np.ndarray:
        idx = self.columns.index(name)
        return np.array([row[idx] for row in self.rows])

    def as_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


@dataclass
class RunMetrics:
    scenario: str
    style: str
    strategy: str
    steps: int
    aborted: bool
    abort_reason: str
    t_commit: float              # first lane-change commitment, nan if none
    sigma_commit: int            # direction of that first commitment
    merged: bool                 # a lane change finished during the run
    t_merge_done: float
    final_lane: int
    gap_at_commit: dict[str, float]  # role -> s_ego - s_role at t_commit
    v_at_commit: dict[str, float]    # role (and EC) -> speed at t_commit
    rms_safety: float
    rms_comfort: float
    rms_efficiency: float
    rms_total: float
    min_clearance: float         # lane-sharing pairs only; inf if none occur
    max_field: float
    planner_regressions: int     # steps where the plan lost to zero increments
    box_violations: int
    degraded_steps: int
    security_steps: int
    clamp_steps: int


BASE_COLUMNS = [
    "t", "s_ec", "d_ec", "v_ec", "vy_ec", "yaw_ec", "x_ec", "y_ec",
    "delta_ec", "lane_ec", "target_lane", "sigma", "a_cmd", "latched",
    "decided", "mode", "multiplicity", "security", "side", "u_cmd",
    "mpc_cost", "mpc_cost_zero", "mpc_iters", "mpc_degraded",
    "box_violation", "dec_j_ds", "dec_j_rc", "dec_j_pe", "dec_total",
    "j_ds", "j_rc", "j_pe", "j_total", "field_ec", "min_clearance",
    "clamped",
]


def _lead_for(cars: list[_Car], lane: int, ego_lane: int, s_e: float) -> KinematicState | None:
    """Nearest car ahead that the ego would follow on this lane.

    Strategic cars count only once the ego shares their lane; elsewhere
    they appear as game opponents, not leads.
    """
    best = None
    for c in cars:
        if c.lane != lane or c.s <= s_e:
            continue
        if c.strategic and lane != ego_lane:
            continue
        if best is None or c.s < best.s:
            best = c
    if best is None:
        return None
    return KinematicState(s=best.s, v=best.v)


def _adjacent_on(cars: list[_Car], lane: int, ego_lane: int) -> _Car | None:
    if lane == ego_lane:
        return None
    for c in cars:
        if c.strategic and c.lane == lane:
            return c
    return None


def _neighbor_view(road: RoadGeometry, cfg: ScenarioConfig, cars: list[_Car],
                   ego_lane: int, s_e: float, flow_ref: float) -> NeighborView:
    lanes: dict[int, LaneView] = {}
    end_remaining: dict[int, float] = {}
    for idx, spec in road.lanes.items():
        adj = _adjacent_on(cars, idx, ego_lane)
        ac_lead = None
        if adj is not None:
            ahead = [c for c in cars if c.lane == idx and c.s > adj.s]
            if ahead:
                nearest = min(ahead, key=lambda c: c.s)
                ac_lead = KinematicState(s=nearest.s, v=nearest.v)
        lanes[idx] = LaneView(
            lead=_lead_for(cars, idx, ego_lane, s_e),
            adjacent=None if adj is None else KinematicState(s=adj.s, v=adj.v),
            ac_lead=ac_lead,
            adjacent_v_ref=None if adj is None else adj.v_ref,
            v_min=spec.v_min,
            v_max=spec.v_max,
        )
        rem = road.remaining(idx, s_e)
        if math.isfinite(rem):
            end_remaining[idx] = rem
    dec = cfg.decision
    return NeighborView(lanes=lanes, lane_width=road.lane_width,
                        flow_ref=flow_ref, end_remaining=end_remaining,
                        a_end=dec.a_end, end_margin=dec.end_margin,
                        a_brake=dec.a_brake)


def _decide(cfg: ScenarioConfig, strategy: str, nb: NeighborView,
            ego_kin: KinematicState, ego_lane: int, ego_style,
            cars: list[_Car]) -> tuple[GameSolution, int]:
    """Solve the decision game matching the adjacency pattern.

    Returns the solution and a mode code: 0 solo, 1 one opponent,
    2 opponents on both sides.
    """
    left = _adjacent_on(cars, ego_lane - 1, ego_lane) if nb.has_lane(ego_lane - 1) else None
    right = _adjacent_on(cars, ego_lane + 1, ego_lane) if nb.has_lane(ego_lane + 1) else None
    grid = cfg.grid
    gains = cfg.gains
    horizon = cfg.decision.horizon
    if left is not None and right is not None:
        solver = solve_nash_two_ac if strategy == "nash" else solve_stackelberg_two_ac
        sol = solver(ego_kin, ego_lane,
                     KinematicState(s=left.s, v=left.v),
                     KinematicState(s=right.s, v=right.v),
                     nb, grid, grid, ego_style,
                     style_profile(left.style), style_profile(right.style),
                     gains, horizon)
        return sol, 2
    if left is not None or right is not None:
        ac = left if left is not None else right
        ac_lane = ego_lane - 1 if left is not None else ego_lane + 1
        solver = solve_nash_2p if strategy == "nash" else solve_stackelberg_2p
        sol = solver(ego_kin, ego_lane, KinematicState(s=ac.s, v=ac.v),
                     ac_lane, nb, grid, grid, ego_style,
                     style_profile(ac.style), gains, horizon)
        return sol, 1
    return solve_solo(ego_kin, ego_lane, nb, grid, ego_style, gains,
                      horizon, kind=strategy), 0


def _metric_cap(road: RoadGeometry, cfg: ScenarioConfig, lane: int, s: float) -> float:
    """Attainable speed on a lane at station s, end-of-lane profile included."""
    lv = road.lanes[lane]
    rem = road.remaining(lane, s)
    if not math.isfinite(rem):
        return lv.v_max
    run = max(rem - cfg.decision.end_margin, 0.0)
    return min(lv.v_max, math.sqrt(2.0 * cfg.decision.a_end * run))


def _u_box(road: RoadGeometry, cfg: ScenarioConfig, dp: DriverParams,
           s_e: float, v_e: float) -> tuple[float, float]:
    """Global lateral bounds for the preview command over the horizon.

    The preview point ranges over the road cross-sections between the
    current station and the far end of the prediction window; the box is
    the global Y-extent of those sections (exactly the road edges on a
    straight segment).
    """
    far = s_e + v_e * (dp.t_p + cfg.mpc.n_p * cfg.mpc.dt)
    d_max, d_min = road.lateral_extent()
    ys = []
    for ss in (s_e, far):
        for dd in (d_min, d_max):
            _, y = road.to_global(ss, dd)
            ys.append(float(y))
    return min(ys), max(ys)


def _lane_share_clearance(ego_s, ego_d, ego_x, ego_y, cars, road) -> float:
    """Smallest distance among pairs currently sharing a lane laterally."""
    poses = [(ego_s, ego_d, ego_x, ego_y)]
    for c in cars:
        x, y = road.to_global(c.s, c.d)
        poses.append((c.s, c.d, float(x), float(y)))
    best = math.inf
    for i in range(len(poses)):
        for j in range(i + 1, len(poses)):
            if abs(poses[i][1] - poses[j][1]) >= LANE_SHARE_BAND:
                continue
            dist = math.hypot(poses[i][2] - poses[j][2],
                              poses[i][3] - poses[j][3])
            best = min(best, dist)
    return best


def run_simulation(cfg: ScenarioConfig, style: str | None = None,
                   strategy: str | None = None) -> TraceLog:
    """Simulate one run; ego style and strategy may override the scenario."""
    road = cfg.road
    strategy = strategy or cfg.strategy
    ego_spec = cfg.ego()
    style_name = style or ego_spec.style
    ego_style = style_profile(style_name)
    vp = DEFAULT_VEHICLE
    dp = ego_style.driver

    cars = []
    for spec in cfg.vehicles:
        if spec.role == EGO_ROLE:
            continue
        d0 = road.lane_offset(spec.lane) if spec.d is None else spec.d
        cars.append(_Car(role=spec.role, lane=spec.lane, strategic=spec.strategic,
                         style=spec.style, s=spec.s, d=d0, v=spec.v,
                         v_ref=spec.v))
    roles = [c.role for c in cars]
    columns = list(BASE_COLUMNS)
    for r in roles:
        rl = r.lower()
        columns += [f"s_{rl}", f"d_{rl}", f"v_{rl}", f"a_{rl}"]
    trace = TraceLog(scenario=cfg.name, style=style_name, strategy=strategy,
                     dt=cfg.dt, columns=columns, roles=roles)

    # Ego starts aligned with the road on its lane centerline.
    s0 = ego_spec.s
    d0 = road.lane_offset(ego_spec.lane) if ego_spec.d is None else ego_spec.d
    x0, y0 = road.to_global(s0, d0)
    phi0 = float(road.tangent_heading(s0))
    state = np.zeros(8)
    state[IVX] = ego_spec.v
    state[IPHI] = phi0
    state[IX], state[IY] = float(x0), float(y0)
    if road.kind == "arc":
        state[IR] = ego_spec.v / road.radius
    u_prev = float(y0) + dp.t_p * ego_spec.v * phi0

    ego_lane = ego_spec.lane
    target_lane = ego_lane
    latched = False
    sigma_now = 0
    a_cmd = 0.0
    flow_ref = ego_spec.v
    a_y_change = lane_change_lat_accel(road.lane_width)
    last = {"mode": -1.0, "mult": 0.0, "sec": 0.0, "side": 0.0,
            "dec": (0.0, 0.0, 0.0, 0.0)}

    n_steps = int(round(cfg.duration / cfg.dt))
    for k in range(n_steps):
        t = k * cfg.dt
        s_e, d_e = road.to_frenet(state[IX], state[IY])
        s_e, d_e = float(s_e), float(d_e)
        v_e = float(state[IVX])
        ego_kin = KinematicState(s=s_e, v=v_e)

        if latched:
            y2 = d_e - road.lane_offset(target_lane)
            y3 = float(state[IPHI]) - float(road.tangent_heading(s_e))
            if (abs(y2) < cfg.decision.commit_lat_tol
                    and abs(y3) < cfg.decision.commit_yaw_tol):
                ego_lane = target_lane
                latched = False
                sigma_now = 0

        decided = 0.0
        if not latched:
            nb = _neighbor_view(road, cfg, cars, ego_lane, s_e, flow_ref)
            try:
                sol, mode = _decide(cfg, strategy, nb, ego_kin, ego_lane,
                                    ego_style, cars)
            except InfeasibleDecisionError as exc:
                trace.aborted = True
                trace.abort_reason = f"decision infeasible at t={t:.2f}: {exc}"
                break
            decided = 1.0
            sigma_now = sol.ego_action.sigma
            a_cmd = sol.ego_action.a_x
            if sigma_now != 0:
                latched = True
                target_lane = ego_lane + sigma_now
            for c in cars:
                if c.strategic:
                    c.a = sol.ac_actions.get(c.lane, 0.0)
            cb = sol.ego_cost
            last = {"mode": float(mode), "mult": float(sol.multiplicity),
                    "sec": float(sol.security_fallback),
                    "side": 0.0 if sol.side is None else float(sol.side),
                    "dec": (cb.j_ds, cb.j_rc, cb.j_pe, cb.total)}

        # Style-free running cost components (weighted total uses the ego
        # style); safety follows the active interaction partner.
        if sigma_now != 0:
            adj = _adjacent_on(cars, target_lane, ego_lane)
            adj_kin = None if adj is None else KinematicState(s=adj.s, v=adj.v)
            j_ds_m = lateral_safety_cost(ego_kin, adj_kin, cfg.gains)
        else:
            lead = _lead_for(cars, ego_lane, ego_lane, s_e)
            j_ds_m = longitudinal_safety_cost(ego_kin, lead, cfg.gains)
        j_rc_m = cfg.gains.kappa_ax * a_cmd * a_cmd
        if sigma_now != 0:
            j_rc_m += cfg.gains.kappa_ay * a_y_change * a_y_change
        lane_near = road.nearest_lane(d_e)
        cap_here = _metric_cap(road, cfg, lane_near, s_e)
        j_pe_m = (v_e - cap_here) ** 2
        w_ds, w_rc, w_pe = ego_style.weights
        j_total_m = w_ds * j_ds_m + w_rc * j_rc_m + w_pe * j_pe_m

        obstacles = []
        for c in cars:
            ox, oy = road.to_global(c.s, c.d)
            obstacles.append(ObstaclePose(x=float(ox), y=float(oy),
                                          heading=float(road.tangent_heading(c.s)),
                                          v=c.v))
        u_lo, u_hi = _u_box(road, cfg, dp, s_e, v_e)
        mpc_cfg = replace(cfg.mpc, u_min=u_lo, u_max=u_hi)
        plan = solve_plan(state, u_prev, a_cmd, obstacles, road,
                          target_lane if latched else ego_lane,
                          cfg.obstacle_field, cfg.road_field, mpc_cfg, vp, dp)
        u_cmd = plan.u_applied
        box_violation = float(not (u_lo - 1e-9 <= u_cmd <= u_hi + 1e-9)
                              or plan.cost > plan.cost_zero + 1e-9)

        field_here = float(total_field(state[IX], state[IY], obstacles, road,
                                       cfg.obstacle_field, cfg.road_field))
        clearance = _lane_share_clearance(s_e, d_e, float(state[IX]),
                                          float(state[IY]), cars, road)

        row = [t, s_e, d_e, v_e, float(state[IVY]), float(state[IPHI]),
               float(state[IX]), float(state[IY]), float(state[IDELTA]),
               float(ego_lane), float(target_lane), float(sigma_now), a_cmd,
               float(latched), decided, last["mode"], last["mult"],
               last["sec"], last["side"], u_cmd, plan.cost, plan.cost_zero,
               float(plan.iterations), float(plan.degraded), box_violation,
               *last["dec"], j_ds_m, j_rc_m, j_pe_m, j_total_m, field_here,
               clearance, 0.0]
        for c in cars:
            row += [c.s, c.d, c.v, c.a]
        trace.rows.append(row)

        state, clamped = step(state, ControlInput(y_p=u_cmd, a_x=a_cmd),
                              vp, dp, cfg.dt)
        if clamped:
            trace.rows[-1][columns.index("clamped")] = 1.0
        if not np.all(np.isfinite(state)):
            trace.aborted = True
            trace.abort_reason = f"non-finite ego state after t={t:.2f}"
            break
        for c in cars:
            lane = road.lanes[c.lane]
            c.s += c.v * cfg.dt + 0.5 * c.a * cfg.dt * cfg.dt
            c.v = float(np.clip(c.v + c.a * cfg.dt, max(0.0, lane.v_min),
                                lane.v_max))
        u_prev = u_cmd

    return trace


def summarize(trace: TraceLog) -> RunMetrics:
    """Reduce a trace to the quantities the scenario studies compare."""
    col = trace.column
    n = len(trace.rows)
    if n == 0:
        return RunMetrics(scenario=trace.scenario, style=trace.style,
                          strategy=trace.strategy, steps=0,
                          aborted=trace.aborted, abort_reason=trace.abort_reason,
                          t_commit=math.nan, sigma_commit=0, merged=False,
                          t_merge_done=math.nan, final_lane=0,
                          gap_at_commit={}, v_at_commit={},
                          rms_safety=math.nan, rms_comfort=math.nan,
                          rms_efficiency=math.nan, rms_total=math.nan,
                          min_clearance=math.inf, max_field=math.nan,
                          planner_regressions=0, box_violations=0,
                          degraded_steps=0, security_steps=0, clamp_steps=0)
    sigma = col("sigma")
    t = col("t")
    committed = np.flatnonzero(sigma != 0)
    t_commit = float(t[committed[0]]) if committed.size else math.nan
    sigma_commit = int(sigma[committed[0]]) if committed.size else 0
    lane = col("lane_ec")
    changed = np.flatnonzero(lane != lane[0])
    merged = changed.size > 0
    t_merge_done = float(t[changed[0]]) if merged else math.nan

    gap_at_commit: dict[str, float] = {}
    v_at_commit: dict[str, float] = {}
    if committed.size:
        i = committed[0]
        s_e = col("s_ec")[i]
        v_at_commit["EC"] = float(col("v_ec")[i])
        for r in trace.roles:
            rl = r.lower()
            gap_at_commit[r] = float(s_e - col(f"s_{rl}")[i])
            v_at_commit[r] = float(col(f"v_{rl}")[i])

    def rms(name: str) -> float:
        x = col(name)
        return float(np.sqrt(np.mean(x * x)))

    return RunMetrics(
        scenario=trace.scenario, style=trace.style, strategy=trace.strategy,
        steps=n, aborted=trace.aborted, abort_reason=trace.abort_reason,
        t_commit=t_commit, sigma_commit=sigma_commit, merged=merged,
        t_merge_done=t_merge_done, final_lane=int(lane[-1]),
        gap_at_commit=gap_at_commit, v_at_commit=v_at_commit,
        rms_safety=rms("j_ds"), rms_comfort=rms("j_rc"),
        rms_efficiency=rms("j_pe"), rms_total=rms("j_total"),
        min_clearance=float(np.min(col("min_clearance"))),
        max_field=float(np.max(col("field_ec"))),
        planner_regressions=int(np.sum(col("mpc_cost") > col("mpc_cost_zero") + 1e-9)),
        box_violations=int(np.sum(col("box_violation"))),
        degraded_steps=int(np.sum(col("mpc_degraded"))),
        security_steps=int(np.sum(col("security"))),
        clamp_steps=int(np.sum(col("clamped"))),
    )


def write_trace(trace: TraceLog, path: str) -> None:
    """Fixed column order, 9 significant digits per value."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(trace.columns) + "\n")
        for row in trace.rows:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def metrics_lines(m: RunMetrics) -> list[str]:
    """Flat key=value rendering of one run's metrics."""
    out = [f"scenario={m.scenario}", f"style={m.style}",
           f"strategy={m.strategy}", f"steps={m.steps}",
           f"aborted={int(m.aborted)}"]
    if m.abort_reason:
        out.append(f"abort_reason={m.abort_reason}")
    out += [f"t_commit={m.t_commit:.9g}", f"sigma_commit={m.sigma_commit}",
            f"merged={int(m.merged)}", f"t_merge_done={m.t_merge_done:.9g}",
            f"final_lane={m.final_lane}"]
    for r, g in m.gap_at_commit.items():
        out.append(f"gap_at_commit_{r}={g:.9g}")
    for r, v in m.v_at_commit.items():
        out.append(f"v_at_commit_{r}={v:.9g}")
    out += [f"rms_safety={m.rms_safety:.9g}", f"rms_comfort={m.rms_comfort:.9g}",
            f"rms_efficiency={m.rms_efficiency:.9g}",
            f"rms_total={m.rms_total:.9g}",
            f"min_clearance={m.min_clearance:.9g}",
            f"max_field={m.max_field:.9g}",
            f"planner_regressions={m.planner_regressions}",
            f"box_violations={m.box_violations}",
            f"degraded_steps={m.degraded_steps}",
            f"security_steps={m.security_steps}",
            f"clamp_steps={m.clamp_steps}"]
    return out


def write_metrics(m: RunMetrics, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(metrics_lines(m)) + "\n")


STYLES_ALL = ("aggressive", "normal", "conservative")


def batch(cfg: ScenarioConfig, styles=STYLES_ALL,
          strategies=("nash", "stackelberg")) -> list[tuple[TraceLog, RunMetrics]]:
    """Every style x strategy combination for one scenario."""
    out = []
    for strat in strategies:
        for sty in styles:
            trace = run_simulation(cfg, style=sty, strategy=strat)
            out.append((trace, summarize(trace)))
    return out


def comparison_csv(metrics: list[RunMetrics]) -> str:
    """Side-by-side table over runs, one row per run."""
    cols = ["scenario", "style", "strategy", "t_commit", "sigma_commit",
            "merged", "t_merge_done", "final_lane", "rms_safety",
            "rms_comfort", "rms_efficiency", "rms_total", "min_clearance",
            "max_field", "aborted"]
    lines = [",".join(cols)]
    for m in metrics:
        vals = [m.scenario, m.style, m.strategy, f"{m.t_commit:.9g}",
                str(m.sigma_commit), str(int(m.merged)),
                f"{m.t_merge_done:.9g}", str(m.final_lane),
                f"{m.rms_safety:.9g}", f"{m.rms_comfort:.9g}",
                f"{m.rms_efficiency:.9g}", f"{m.rms_total:.9g}",
                f"{m.min_clearance:.9g}", f"{m.max_field:.9g}",
                str(int(m.aborted))]
        lines.append(",".join(vals))
    return "\n".join(lines) + "\n"
