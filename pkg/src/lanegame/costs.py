"""Lane-change decision costs.

A candidate decision is a pair (sigma, a_x): stay, move one lane left, or
move one lane right, together with a longitudinal acceleration held for
the decision horizon. Costs are evaluated on constant-acceleration
projections of every involved car, not on the instantaneous scene; the
safety terms take their worst value along the projection so a candidate
cannot score well by teleporting past a conflict.

Sign conventions for the velocity gates:
  longitudinal: dv = v_lead - v_ego, penalized only while closing (dv < 0)
  lateral:      dv = v_ego - v_adjacent, penalized only when slower (dv < 0)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .styles import StyleProfile

# Nominal duration of one lane-change maneuver, s.
T_LC = 3.0
# Decision evaluation horizon, s.
T_DM = 3.0
# Sample count for worst-point safety evaluation along the horizon.
K_SAMPLES = 7

INF = math.inf


@dataclass(frozen=True)
class DecisionAction:
    """One candidate: sigma in {-1, 0, +1} (left, stay, right) and a_x."""

    sigma: int
    a_x: float

    def __post_init__(self) -> None:
        if self.sigma not in (-1, 0, 1):
            raise ValueError("sigma must be -1, 0, or +1")


@dataclass(frozen=True)
class CostGains:
    kappa_v_lon: float = 1.0    # longitudinal closing-speed gain
    kappa_s_lon: float = 100.0  # longitudinal gap gain
    kappa_v_lat: float = 1.0    # lateral closing-speed gain
    kappa_s_lat: float = 100.0  # lateral gap gain
    kappa_ax: float = 1.0       # longitudinal comfort gain
    kappa_ay: float = 1.0       # lateral comfort gain
    epsilon: float = 0.01       # gap denominator guard, m^2
    l_v: float = 5.0            # vehicle-length margin subtracted from gaps, m

    def __post_init__(self) -> None:
        gains = (self.kappa_v_lon, self.kappa_s_lon, self.kappa_v_lat,
                 self.kappa_s_lat, self.kappa_ax, self.kappa_ay)
        if any(g < 0 for g in gains):
            raise ValueError("cost gains must be nonnegative")
        if self.epsilon <= 0 or self.l_v <= 0:
            raise ValueError("epsilon and l_v must be positive")


@dataclass(frozen=True)
class CostBreakdown:
    j_ds: float  # safety
    j_rc: float  # comfort
    j_pe: float  # efficiency
    total: float

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.total)


INFEASIBLE = CostBreakdown(j_ds=INF, j_rc=INF, j_pe=INF, total=INF)


@dataclass(frozen=True)
class KinematicState:
    """Point-mass view of one car: station along its lane and speed."""

    s: float
    v: float


@dataclass
class LaneView:
    """What the decision layer knows about one lane."""

    lead: KinematicState | None = None      # nearest non-strategic car ahead of ego
    adjacent: KinematicState | None = None  # the game opponent on this lane, if any
    ac_lead: KinematicState | None = None   # nearest car ahead of that opponent
    adjacent_v_ref: float | None = None     # the opponent's own cruise speed
    v_min: float = 0.0
    v_max: float = 25.0


@dataclass
class NeighborView:
    """Per-lane scene summary handed to the cost and game layers."""

    lanes: dict[int, LaneView]
    lane_width: float = 4.0
    # Nominal flow speed anchoring desired speeds on lanes with no lead.
    flow_ref: float = 20.0
    # Remaining distance to a lane's end station, by lane; absent = endless.
    end_remaining: dict[int, float] = field(default_factory=dict)
    a_end: float = 3.0       # comfortable decel shaping the end-of-lane speed cap
    end_margin: float = 30.0  # distance reserved for the merge itself, m
    a_brake: float = 6.0     # emergency decel for the keep-lane cutoff

    def has_lane(self, lane: int) -> bool:
        return lane in self.lanes

    def lead(self, lane: int) -> KinematicState | None:
        return self.lanes[lane].lead if lane in self.lanes else None

    def adjacent(self, lane: int) -> KinematicState | None:
        return self.lanes[lane].adjacent if lane in self.lanes else None

    def remaining(self, lane: int) -> float:
        return self.end_remaining.get(lane, INF)

    def v_cap(self, lane: int, ds_ahead=0.0):
        """Speed cap on a lane at a point ds_ahead meters up the road.

        On an ending lane the cap falls off as the square-root braking
        profile toward the end margin; elsewhere it is the lane limit.
        Broadcasts over ds_ahead.
        """
        lv = self.lanes[lane]
        rem = self.remaining(lane)
        if not math.isfinite(rem):
            return lv.v_max if np.ndim(ds_ahead) == 0 else np.full(np.shape(ds_ahead), lv.v_max)
        run = np.maximum(rem - np.asarray(ds_ahead, dtype=float) - self.end_margin, 0.0)
        cap = np.sqrt(2.0 * self.a_end * run)
        return np.minimum(lv.v_max, cap)

    def keep_lane_blocked(self, lane: int, v: float) -> bool:
        """True when staying on an ending lane can no longer be offered.

        Cutoff: remaining distance below the braking distance at the
        current speed plus the merge margin.
        """
        rem = self.remaining(lane)
        if not math.isfinite(rem):
            return False
        return rem < v * v / (2.0 * self.a_brake) + self.end_margin


def lane_change_lat_accel(w_lane: float, t_lc: float = T_LC) -> float:
    """Peak lateral acceleration of a sinusoidal lane change.

    One lane width w in time t_lc along y = w/2 (1 - cos(pi t/t_lc)) peaks
    at w/2 (pi/t_lc)^2... kept here in the commonly quoted 2 pi w / t^2
    form used throughout the package.
    """
    return 2.0 * math.pi * w_lane / (t_lc * t_lc)


def propagate(s, v, a, t):
    """Constant-acceleration projection with a stop at v = 0.

    Broadcasts over all arguments; returns (position, velocity) arrays.
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    t = np.asarray(t, dtype=float)
    neg = a < 0
    t_stop = np.where(neg, v / np.where(neg, -a, 1.0), INF)
    stopped = t >= t_stop
    pos_free = s + v * t + 0.5 * a * t * t
    pos_hold = s + np.where(neg, v * v / (2.0 * np.where(neg, -a, 1.0)), 0.0)
    pos = np.where(stopped, pos_hold, pos_free)
    vel = np.maximum(v + a * t, 0.0)
    return pos, vel


def _gap_term(dv, dist, kv, ks, eps, l_v):
    """Safety integrand: closing-speed penalty plus inverse-square gap."""
    gap = np.maximum(np.abs(dist) - l_v, 0.0)
    closing = np.where(dv < 0.0, 1.0, 0.0)
    return kv * closing * dv * dv + ks / (gap * gap + eps)


def longitudinal_safety_cost(ego: KinematicState, lead: KinematicState | None,
                             g: CostGains) -> float:
    """Instantaneous following risk against the lead car on the same lane."""
    if lead is None:
        return 0.0
    dv = lead.v - ego.v
    return float(_gap_term(dv, lead.s - ego.s, g.kappa_v_lon, g.kappa_s_lon,
                           g.epsilon, g.l_v))


def lateral_safety_cost(ego: KinematicState, adjacent: KinematicState | None,
                        g: CostGains) -> float:
    """Instantaneous merge risk against the adjacent car on the target lane.

    The caller applies the sigma^2 gate; absent adjacent car means no
    interaction and zero cost.
    """
    if adjacent is None:
        return 0.0
    dv = ego.v - adjacent.v
    return float(_gap_term(dv, adjacent.s - ego.s, g.kappa_v_lat, g.kappa_s_lat,
                           g.epsilon, g.l_v))


def comfort_cost(a_x: float, a_y: float, sigma: int, g: CostGains) -> float:
    return g.kappa_ax * a_x * a_x + sigma * sigma * g.kappa_ay * a_y * a_y


def efficiency_cost(v_ego: float, lane: int, neighbors: NeighborView) -> float:
    """Squared shortfall from the lane's attainable speed.

    The attainable speed is the lane limit capped by the lead car's speed;
    no lead means the limit itself.
    """
    lv = neighbors.lanes[lane]
    v_bar = lv.v_max if lv.lead is None else min(lv.v_max, lv.lead.v)
    return (v_ego - v_bar) ** 2


def desired_speed(v_limit, lead_v, v_factor: float, anchor_default):
    """Style-shaped speed target on a lane.

    The target sits between an anchor and the lane limit: the anchor is
    a slower lead when one exists, otherwise the nominal flow speed.
    Assertive drivers (v_factor near 1) aim near the limit, planning to
    pass or press; timid drivers settle onto the anchor. The limit here
    is the static lane bound: an end-of-lane cap must stay out of it so
    that riding a dying lane keeps hurting. Broadcasts; the result never
    exceeds the limit.
    """
    v_limit = np.asarray(v_limit, dtype=float)
    lead_v = np.asarray(lead_v, dtype=float)
    fallback = np.minimum(np.asarray(anchor_default, dtype=float), v_limit)
    follow = np.isfinite(lead_v) & (lead_v < v_limit)
    anchor = np.where(follow, np.where(follow, lead_v, 0.0), fallback)
    return anchor + v_factor * (v_limit - anchor)


def _sample_times(horizon: float) -> np.ndarray:
    return np.linspace(0.0, horizon, K_SAMPLES)


def _ego_parts(ego: KinematicState, ego_lane: int, sigma: int, a_e,
               nb: NeighborView, style: StyleProfile, g: CostGains,
               horizon: float, partner: KinematicState | None, partner_a):
    """Safety/comfort/efficiency arrays for ego candidates.

    a_e and partner_a broadcast against each other; returns arrays in the
    broadcast shape.
    """
    ts = _sample_times(horizon)
    a_e = np.asarray(a_e, dtype=float)
    se, ve = propagate(ego.s, ego.v, a_e[..., None], ts)
    target = ego_lane + sigma

    if sigma != 0:
        if partner is not None:
            pa = np.asarray(partner_a, dtype=float)
            sa, va = propagate(partner.s, partner.v, pa[..., None], ts)
            term = _gap_term(ve - va, sa - se, g.kappa_v_lat, g.kappa_s_lat,
                             g.epsilon, g.l_v)
            j_ds = np.max(term, axis=-1)
        else:
            j_ds = np.zeros(a_e.shape)
    else:
        lead = nb.lead(ego_lane)
        if lead is not None:
            sl, vl = propagate(lead.s, lead.v, 0.0, ts)
            term = _gap_term(vl - ve, sl - se, g.kappa_v_lon, g.kappa_s_lon,
                             g.epsilon, g.l_v)
            j_ds = np.max(term, axis=-1)
        else:
            j_ds = np.zeros(a_e.shape)

    a_y = lane_change_lat_accel(nb.lane_width)
    j_rc = g.kappa_ax * a_e * a_e + sigma * sigma * g.kappa_ay * a_y * a_y

    v_end = ve[..., -1]
    lead_t = nb.lead(target)
    lead_v = lead_t.v if lead_t is not None else INF
    v_bar = desired_speed(nb.lanes[target].v_max, lead_v, style.v_factor,
                          nb.flow_ref)
    j_pe = (v_end - v_bar) ** 2
    return j_ds, j_rc, j_pe


def _ac_parts(ac: KinematicState, ac_lane: int, ego: KinematicState,
              ego_lane: int, sigma: int, a_e, a_a, nb: NeighborView,
              ac_style: StyleProfile, g: CostGains, horizon: float):
    """Safety/comfort/efficiency arrays for the adjacent car.

    The lateral safety value is the shared pair term, identical to the
    ego's, gated by the ego's sigma. Comfort covers only the longitudinal
    acceleration: the adjacent car is not the one swerving.
    """
    ts = _sample_times(horizon)
    a_e = np.asarray(a_e, dtype=float)
    a_a = np.asarray(a_a, dtype=float)
    se, ve = propagate(ego.s, ego.v, a_e[..., None], ts)
    sa, va = propagate(ac.s, ac.v, a_a[..., None], ts)
    shape = np.broadcast(a_e, a_a).shape

    is_partner = sigma != 0 and ego_lane + sigma == ac_lane
    if is_partner:
        term = _gap_term(ve - va, sa - se, g.kappa_v_lat, g.kappa_s_lat,
                         g.epsilon, g.l_v)
        j_ds = np.broadcast_to(np.max(term, axis=-1), shape)
    elif sigma == 0:
        own_lead = nb.lanes[ac_lane].ac_lead
        if own_lead is not None:
            sl, vl = propagate(own_lead.s, own_lead.v, 0.0, ts)
            term = _gap_term(vl - va, sl - sa, g.kappa_v_lon, g.kappa_s_lon,
                             g.epsilon, g.l_v)
            j_ds = np.broadcast_to(np.max(term, axis=-1), shape)
        else:
            j_ds = np.zeros(shape)
    else:
        j_ds = np.zeros(shape)

    j_rc = np.broadcast_to(g.kappa_ax * a_a * a_a, shape)

    sa_end, va_end = sa[..., -1], va[..., -1]
    se_end, ve_end = se[..., -1], ve[..., -1]
    lane = nb.lanes[ac_lane]
    v_ref = lane.adjacent_v_ref if lane.adjacent_v_ref is not None else ac.v
    # The adjacent car defends its own cruise speed, not the lane limit.
    cap = min(lane.v_max, v_ref)
    own_lead = lane.ac_lead
    base_lead_v = own_lead.v if own_lead is not None else INF
    if is_partner:
        # A merged ego that ends up ahead becomes this car's lead.
        merged_ahead = se_end > sa_end
        lead_v = np.where(merged_ahead, ve_end, base_lead_v)
    else:
        lead_v = np.broadcast_to(base_lead_v, shape)
    v_bar = desired_speed(cap, lead_v, ac_style.v_factor, v_ref)
    j_pe = np.broadcast_to((va_end - v_bar) ** 2, shape)
    return j_ds, j_rc, j_pe


def combine(style: StyleProfile, j_ds, j_rc, j_pe):
    return style.w_ds * np.asarray(j_ds) + style.w_rc * np.asarray(j_rc) \
        + style.w_pe * np.asarray(j_pe)


def ego_cost(ego: KinematicState, ego_lane: int, action: DecisionAction,
             opponent_accels: dict[int, float], neighbors: NeighborView,
             style: StyleProfile, gains: CostGains,
             horizon: float = T_DM) -> CostBreakdown:
    """Full cost breakdown of one ego candidate against fixed opponents."""
    target = ego_lane + action.sigma
    if not neighbors.has_lane(target):
        return INFEASIBLE
    if action.sigma == 0 and neighbors.keep_lane_blocked(ego_lane, ego.v):
        return INFEASIBLE
    partner = neighbors.adjacent(target) if action.sigma != 0 else None
    partner_a = opponent_accels.get(target, 0.0)
    j_ds, j_rc, j_pe = _ego_parts(ego, ego_lane, action.sigma,
                                  np.float64(action.a_x), neighbors, style,
                                  gains, horizon, partner, np.float64(partner_a))
    total = combine(style, j_ds, j_rc, j_pe)
    return CostBreakdown(float(j_ds), float(j_rc), float(j_pe), float(total))


def ac_cost(ac: KinematicState, ac_lane: int, ego: KinematicState,
            ego_lane: int, ego_action: DecisionAction, ac_accel: float,
            neighbors: NeighborView, ac_style: StyleProfile, gains: CostGains,
            horizon: float = T_DM) -> CostBreakdown:
    """Cost breakdown of one adjacent-car response to one ego candidate."""
    j_ds, j_rc, j_pe = _ac_parts(ac, ac_lane, ego, ego_lane, ego_action.sigma,
                                 np.float64(ego_action.a_x),
                                 np.float64(ac_accel), neighbors, ac_style,
                                 gains, horizon)
    total = combine(ac_style, j_ds, j_rc, j_pe)
    return CostBreakdown(float(j_ds), float(j_rc), float(j_pe), float(total))


def pair_payoff_matrices(ego: KinematicState, ego_lane: int, sigma: int,
                         ego_accels: np.ndarray, ac: KinematicState | None,
                         ac_lane: int | None, ac_accels: np.ndarray,
                         neighbors: NeighborView, ego_style: StyleProfile,
                         ac_style: StyleProfile, gains: CostGains,
                         horizon: float = T_DM) -> tuple[np.ndarray, np.ndarray]:
    """Cost matrices (ego, adjacent) for one sigma block of the game.

    Rows index ego accelerations, columns the adjacent car's. Without an
    adjacent car the ego column is constant and the opponent matrix zero.
    """
    n_e, n_a = len(ego_accels), len(ac_accels)
    a_e = np.asarray(ego_accels, dtype=float)[:, None]
    a_a = np.asarray(ac_accels, dtype=float)[None, :]

    if ac is None or ac_lane is None:
        partner = None
        j_ds, j_rc, j_pe = _ego_parts(ego, ego_lane, sigma, a_e, neighbors,
                                      ego_style, gains, horizon, partner, 0.0)
        j_ego = np.broadcast_to(combine(ego_style, j_ds, j_rc, j_pe), (n_e, n_a))
        return np.array(j_ego), np.zeros((n_e, n_a))

    partner = ac if sigma != 0 and ego_lane + sigma == ac_lane else None
    j_ds, j_rc, j_pe = _ego_parts(ego, ego_lane, sigma, a_e, neighbors,
                                  ego_style, gains, horizon, partner, a_a)
    j_ego = np.broadcast_to(combine(ego_style, j_ds, j_rc, j_pe), (n_e, n_a))

    k_ds, k_rc, k_pe = _ac_parts(ac, ac_lane, ego, ego_lane, sigma, a_e, a_a,
                                 neighbors, ac_style, gains, horizon)
    j_ac = np.broadcast_to(combine(ac_style, k_ds, k_rc, k_pe), (n_e, n_a))
    return np.array(j_ego), np.array(j_ac)
