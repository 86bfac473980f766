"""Collision-risk potential field over road coordinates.

Two ingredients: a velocity-skewed exponential bump around each obstacle
car, and an exponential barrier along the road edge lines. Both are summed
into a single scalar surface that the planner reads as its first output
channel. All query arguments broadcast, so a whole prediction horizon (or
a batch of candidate horizons) evaluates in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .road import RoadGeometry


@dataclass(frozen=True)
class ObstacleFieldParams:
    a_oc: float = 50.0   # peak value at the obstacle CoG
    rho_x: float = 8.0   # longitudinal convergence length, m
    rho_y: float = 1.2   # lateral convergence length, m
    b: float = 1.0       # shape exponent
    c: float = 0.05      # velocity-skew gain, s/m

    def __post_init__(self) -> None:
        if self.a_oc <= 0 or self.rho_x <= 0 or self.rho_y <= 0:
            raise ValueError("a_oc, rho_x, rho_y must be positive")
        if self.b < 1:
            raise ValueError("shape exponent b must be >= 1")
        if self.c < 0:
            raise ValueError("skew gain c must be >= 0")


@dataclass(frozen=True)
class RoadFieldParams:
    a_r: float = 10.0      # peak value on a lane line
    d_safe: float = 0.2    # safety threshold distance, m
    w: float = 1.8         # vehicle width, m
    # Weight per lane-line kind. Interior (dashed) lines default to zero:
    # crossing them is the whole point of a lane change.
    edge_weight: float = 1.0
    interior_weight: float = 0.0

    def __post_init__(self) -> None:
        if self.a_r <= 0 or self.w <= 0 or self.d_safe < 0:
            raise ValueError("a_r and w must be positive, d_safe nonnegative")


@dataclass(frozen=True)
class ObstaclePose:
    """Obstacle car pose and speed in global coordinates."""

    x: float
    y: float
    heading: float = 0.0
    v: float = 0.0


def gamma_crit(p: ObstacleFieldParams) -> float:
    """Inner-core threshold: the field value one shape unit from the CoG."""
    return p.a_oc * math.exp(-1.0)


def obstacle_field(qx, qy, obs: ObstaclePose, p: ObstacleFieldParams) -> np.ndarray:
    """Field of one obstacle car at query position(s) (qx, qy).

    The query is rotated into the obstacle frame; ahead of a moving
    obstacle the exponent picks up a positive skew so the bump reaches
    farther forward than backward. The skew ratio is 0 at the CoG, which
    keeps the exponent continuous there and pins the peak at a_oc.
    """
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    ch, sh = math.cos(obs.heading), math.sin(obs.heading)
    dx = qx - obs.x
    dy = qy - obs.y
    xh = ch * dx + sh * dy
    yh = -sh * dx + ch * dy

    ax = xh * xh / (2.0 * p.rho_x**2)
    ay = yh * yh / (2.0 * p.rho_y**2)
    r2 = ax + ay
    denom = np.sqrt(np.where(r2 > 0.0, r2, 1.0))
    skew = np.where(xh < 0.0, -1.0, 1.0) * np.where(r2 > 0.0, ax / denom, 0.0)
    theta = -np.power(r2, p.b) + p.c * obs.v * skew
    return p.a_oc * np.exp(theta)


def _lane_line_offsets(road: RoadGeometry, p: RoadFieldParams) -> list[tuple[float, float]]:
    """(lateral offset, weight) for each lane line of the road."""
    d_left, _ = road.lateral_extent()
    lines = []
    n_lines = road.lane_count + 1
    for i in range(n_lines):
        d = d_left - i * road.lane_width
        edge = i == 0 or i == n_lines - 1
        lines.append((d, p.edge_weight if edge else p.interior_weight))
    return lines


def road_field(qx, qy, road: RoadGeometry, p: RoadFieldParams) -> np.ndarray:
    """Summed lane-line barrier at query position(s) (qx, qy).

    Each weighted line contributes a_r * exp(-d + d_safe + 0.5*w) where d
    is the distance from the query to that line. For both straight and arc
    roads the distance to a line at lateral offset d_e is |d - d_e| in
    road coordinates.
    """
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    s, d = road.to_frenet(qx, qy)
    if np.any(s < -1e-9) or np.any(s > road.length + 1e-9):
        raise DomainError("query station outside the road's station range")
    total = np.zeros(np.broadcast(qx, qy).shape)
    for d_line, weight in _lane_line_offsets(road, p):
        if weight == 0.0:
            continue
        dist = np.abs(d - d_line)
        total = total + weight * p.a_r * np.exp(-dist + p.d_safe + 0.5 * p.w)
    return total


def total_field(qx, qy, obstacles, road: RoadGeometry | None,
                ofp: ObstacleFieldParams, rfp: RoadFieldParams) -> np.ndarray:
    """Obstacle fields summed over all OCs plus the road barrier."""
    qx = np.asarray(qx, dtype=float)
    qy = np.asarray(qy, dtype=float)
    total = np.zeros(np.broadcast(qx, qy).shape)
    for obs in obstacles:
        total = total + obstacle_field(qx, qy, obs, ofp)
    if road is not None:
        total = total + road_field(qx, qy, road, rfp)
    return total
