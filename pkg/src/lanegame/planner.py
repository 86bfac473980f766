"""Receding-horizon preview-point planner.

Each planning step linearizes the driver-vehicle model once at the
current state, discretizes it, and predicts the horizon with those frozen
matrices plus the affine remainder of the linearization (which is what
carries the commanded longitudinal acceleration into the prediction).
The optimizer works on the control increments du over the control
horizon, with the preview command held after that; it is a projected
gradient descent with backtracking that only ever accepts improvements,
so the returned sequence never scores worse than leaving the command
alone.

Outputs per predicted step: y1 collision field at the predicted position
(obstacles coasting at constant velocity), y2 lateral offset from the
target lane centerline, y3 yaw error against the road tangent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .field import ObstacleFieldParams, ObstaclePose, RoadFieldParams, total_field
from .road import RoadGeometry
from .vehicle import (ControlInput, DriverParams, IPHI, IX, IY, NX, V_FLOOR,
                      VehicleParams, derivatives, discretize, linearize)


def _default_q() -> np.ndarray:
    return np.diag([1.0, 10.0, 50.0])


@dataclass
class MpcConfig:
    n_p: int = 20
    n_c: int = 5
    dt: float = 0.05
    q: np.ndarray = field(default_factory=_default_q)
    r: float = 1.0
    u_min: float = -10.0
    u_max: float = 10.0
    du_min: float = -0.3
    du_max: float = 0.3
    max_iter: int = 100
    tol: float = 1e-6
    fd_step: float = 1e-4

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=float)
        if self.n_c < 1 or self.n_p < self.n_c:
            raise ValueError("need n_p >= n_c >= 1")
        if self.dt <= 0 or self.r <= 0:
            raise ValueError("dt and r must be positive")
        if self.q.shape != (3, 3) or not np.allclose(self.q, self.q.T, atol=1e-12):
            raise ValueError("q must be a symmetric 3x3 matrix")
        if np.min(np.linalg.eigvalsh(self.q)) < -1e-12:
            raise ValueError("q must be positive semidefinite")
        if self.u_min > self.u_max or self.du_min > self.du_max:
            raise ValueError("bounds out of order")


@dataclass
class PlanResult:
    du_sequence: np.ndarray       # (n_c,)
    u_applied: float
    predicted_states: np.ndarray  # (n_p, 8)
    predicted_outputs: np.ndarray  # (n_p, 3)
    cost: float
    cost_zero: float
    iterations: int
    degraded: bool


class HorizonModel:
    """Frozen linear prediction over one planning step.

    Holds the discretized (A, B, affine) triple and the stacked powers
    needed to map a du sequence to states in one tensor contraction.
    """

    def __init__(self, x0: np.ndarray, u_prev: float, a_x: float,
                 vp: VehicleParams, dp: DriverParams, cfg: MpcConfig):
        if x0[0] <= V_FLOOR:
            raise ValueError("linearization needs forward speed above the floor")
        self.x0 = np.asarray(x0, dtype=float)
        self.u_prev = float(u_prev)
        self.cfg = cfg
        u0 = ControlInput(y_p=u_prev, a_x=a_x)
        a_c, b_c = linearize(self.x0, u0, vp, dp)
        # Affine remainder: the model is not linear through the origin, and
        # a_x enters the prediction only through this term.
        w_c = derivatives(self.x0, u0, vp, dp) - a_c @ self.x0 - b_c[:, 0] * u_prev
        b_aug = np.column_stack([b_c, w_c])
        self.a_d, b_d = discretize(a_c, b_aug, cfg.dt)
        self.b_u = b_d[:, 0]
        self.w_d = b_d[:, 1]

        n_p, n_c = cfg.n_p, cfg.n_c
        # base[i] = state after i+1 steps with u held at u_prev.
        base = np.empty((n_p, NX))
        x = self.x0
        for i in range(n_p):
            x = self.a_d @ x + self.b_u * self.u_prev + self.w_d
            base[i] = x
        self.base = base
        # cum[k] = sum_{m=0}^{k-1} A^m B, so d(state i)/d(du_j) = cum[i-j].
        cum = np.zeros((n_p + 1, NX))
        acc = np.zeros(NX)
        power = self.b_u.copy()
        for k in range(1, n_p + 1):
            acc = acc + power
            cum[k] = acc
            power = self.a_d @ power
        # sens[i, :, j] maps du_j to state i (du frozen after n_c).
        sens = np.zeros((n_p, NX, n_c))
        for i in range(n_p):
            for j in range(min(i + 1, n_c)):
                sens[i, :, j] = cum[i + 1 - j]
        self.sens = sens

    def states(self, du: np.ndarray) -> np.ndarray:
        """Predicted states for du sequences; batches over a leading axis."""
        du = np.asarray(du, dtype=float)
        if du.ndim == 1:
            return self.base + np.tensordot(du, self.sens, axes=([-1], [2]))
        return self.base + np.einsum("bj,ixj->bix", du, self.sens)


def predict_outputs(model: HorizonModel, du: np.ndarray,
                    obstacles: list[ObstaclePose], road: RoadGeometry,
                    target_lane: int, ofp: ObstacleFieldParams,
                    rfp: RoadFieldParams) -> tuple[np.ndarray, np.ndarray]:
    """States and output channels along the horizon for one du sequence."""
    states = model.states(np.asarray(du, dtype=float))
    coasted = _coasted(obstacles, model.cfg)
    y = _outputs(model, states, coasted, road, target_lane, ofp, rfp)
    return states, y


def _coasted(obstacles: list[ObstaclePose], cfg: MpcConfig) -> list[ObstaclePose]:
    """Obstacle poses swept along the horizon, one array-valued pose each.

    Positions become (n_p,) arrays indexed by prediction step, so a field
    query over the whole horizon is a single broadcast instead of a
    per-step loop. Heading and speed stay scalar (constant coasting).
    """
    t = (np.arange(cfg.n_p) + 1) * cfg.dt
    return [ObstaclePose(x=o.x + o.v * t * np.cos(o.heading),
                         y=o.y + o.v * t * np.sin(o.heading),
                         heading=o.heading, v=o.v)
            for o in obstacles]


def _outputs(model: HorizonModel, states: np.ndarray, coasted, road,
             target_lane, ofp, rfp) -> np.ndarray:
    """(..., n_p, 3) outputs for (..., n_p, 8) states.

    `coasted` must come from _coasted so the obstacle positions line up
    with the prediction steps on the last axis.
    """
    xs = states[..., IX]
    ys = states[..., IY]
    y1 = total_field(xs, ys, coasted, road, ofp, rfp)
    s, d = road.to_frenet(xs, ys)
    y2 = d - road.lane_offset(target_lane)
    y3 = states[..., IPHI] - road.tangent_heading(s)
    return np.stack([y1, y2, y3], axis=-1)


def mpc_cost(outputs: np.ndarray, du: np.ndarray, q: np.ndarray, r: float):
    """Sum of output quadratic forms plus weighted increment energy."""
    outputs = np.asarray(outputs, dtype=float)
    du = np.asarray(du, dtype=float)
    quad = np.einsum("...ni,ij,...nj->...", outputs, q, outputs)
    return quad + r * np.sum(du * du, axis=-1)


def _project(du: np.ndarray, u_prev: float, cfg: MpcConfig) -> np.ndarray:
    """Clip a du sequence into the du boxes and the cumulative u box.

    Sequential: each increment is clipped to the intersection of its own
    box with what keeps the running command inside [u_min, u_max]. The
    intersection is never empty while the running command stays in the
    box, which it does by induction.
    """
    out = np.empty_like(du)
    u = u_prev
    for j in range(len(du)):
        lo = max(cfg.du_min, cfg.u_min - u)
        hi = min(cfg.du_max, cfg.u_max - u)
        out[j] = min(max(du[j], lo), hi)
        u += out[j]
    return out


def solve_plan(x0: np.ndarray, u_prev: float, a_x: float,
               obstacles: list[ObstaclePose], road: RoadGeometry,
               target_lane: int, ofp: ObstacleFieldParams,
               rfp: RoadFieldParams, cfg: MpcConfig, vp: VehicleParams,
               dp: DriverParams) -> PlanResult:
    """Minimize the horizon cost over bounded preview increments.

    Projected gradient descent with central finite differences and
    backtracking. Only improving iterates are accepted, so the result
    never exceeds the zero-increment cost; if the very first iterate
    cannot improve on zero while the gradient is clearly nonzero, the
    plan is flagged degraded.
    """
    model = HorizonModel(x0, u_prev, a_x, vp, dp, cfg)
    n_c = cfg.n_c
    coasted = _coasted(obstacles, cfg)

    def cost_of(du_batch: np.ndarray) -> np.ndarray:
        states = model.states(du_batch)
        y = _outputs(model, states, coasted, road, target_lane, ofp, rfp)
        return mpc_cost(y, du_batch, cfg.q, cfg.r)

    du = np.zeros(n_c)
    best = float(cost_of(du))
    cost_zero = best
    h = cfg.fd_step
    eye = np.eye(n_c)
    iterations = 0
    grad0_norm = 0.0
    converged = False

    for _ in range(cfg.max_iter):
        iterations += 1
        probe = np.concatenate([du + h * eye, du - h * eye], axis=0)
        vals = cost_of(probe)
        grad = (vals[:n_c] - vals[n_c:]) / (2.0 * h)
        gnorm = float(np.max(np.abs(grad)))
        if iterations == 1:
            grad0_norm = gnorm
        if gnorm == 0.0:
            break
        alpha = 1.0 / gnorm  # first trial moves the largest component by 1
        accepted = False
        for _ in range(25):
            cand = _project(du - alpha * grad, u_prev, cfg)
            val = float(cost_of(cand))
            if val < best:
                drop = best - val
                du, best = cand, val
                accepted = True
                converged = drop <= cfg.tol * max(1.0, best)
                break
            alpha *= 0.5
        if not accepted or converged:
            break

    states = model.states(du)
    y = _outputs(model, states, coasted, road, target_lane, ofp, rfp)
    final = float(mpc_cost(y, du, cfg.q, cfg.r))
    degraded = final >= cost_zero and grad0_norm > 1e-6 and not np.any(du)
    u_applied = float(u_prev + du[0])
    return PlanResult(du_sequence=du, u_applied=u_applied,
                      predicted_states=states, predicted_outputs=y,
                      cost=final, cost_zero=cost_zero, iterations=iterations,
                      degraded=degraded)


def apply_receding(u_prev: float, plan: PlanResult) -> float:
    """Apply only the first increment; the rest is re-planned next step."""
    return float(u_prev + plan.du_sequence[0])
