"""Pure-strategy game solvers over finite action grids.

Two layers. The matrix cores work on plain cost matrices (rows = ego
candidates, columns = opponent accelerations) and know nothing about
driving; they carry the equilibrium logic and the documented index
tie-breaks. The scene wrappers enumerate feasible candidates, assemble
the matrices through the cost module, and map the winning cell back to
actions and cost breakdowns.

Tie-break order everywhere: lower ego cost, then lower row index, then
lower column index. Candidate lists are ordered so that the row index
encodes the preference (smaller |a_x| first, then sigma in 0, -1, +1
order), which makes the index tie-break implement the documented one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .costs import (CostBreakdown, CostGains, DecisionAction, KinematicState,
                    NeighborView, T_DM, ac_cost, ego_cost,
                    pair_payoff_matrices, propagate)
from .errors import InfeasibleDecisionError
from .styles import StyleProfile

_SIGMA_ORDER = {0: 0, -1: 1, 1: 2}
_VTOL = 1e-9


def _default_accels() -> tuple[float, ...]:
    return tuple(np.round(np.arange(-4.0, 3.0 + 0.25, 0.5), 6))


@dataclass(frozen=True)
class ActionGrid:
    """Finite action menu: acceleration samples, allowed sigmas, speed envelope."""

    accelerations: tuple[float, ...] = None  # type: ignore[assignment]
    sigmas: tuple[int, ...] = (-1, 0, 1)
    v_min: float = 0.0
    v_max: float = 25.0

    def __post_init__(self) -> None:
        if self.accelerations is None:
            object.__setattr__(self, "accelerations", _default_accels())
        accs = tuple(float(a) for a in self.accelerations)
        object.__setattr__(self, "accelerations", accs)
        if not accs:
            raise ValueError("acceleration grid is empty")
        if any(b <= a for a, b in zip(accs, accs[1:])):
            raise ValueError("acceleration grid must be strictly ascending")
        if not self.sigmas or any(s not in (-1, 0, 1) for s in self.sigmas):
            raise ValueError("sigmas must be a non-empty subset of {-1, 0, +1}")
        if self.v_min > self.v_max:
            raise ValueError("velocity bounds out of order")

    def restrict_sigmas(self, allowed) -> "ActionGrid":
        kept = tuple(s for s in self.sigmas if s in allowed)
        if not kept:
            raise ValueError("sigma restriction leaves an empty set")
        return replace(self, sigmas=kept)


@dataclass
class GameSolution:
    ego_action: DecisionAction
    ac_actions: dict[int, float]
    ego_cost: CostBreakdown
    ac_costs: dict[int, CostBreakdown]
    equilibrium_kind: str
    multiplicity: int
    security_fallback: bool = False
    side: int | None = None  # winning branch of a two-opponent solve


def ego_candidates(ego: KinematicState, ego_lane: int, grid: ActionGrid,
                   nb: NeighborView, horizon: float = T_DM) -> list[DecisionAction]:
    """Feasible (sigma, a_x) pairs in tie-break preference order.

    A candidate survives when its target lane exists, keeping an ending
    lane is still allowed, and the projected end speed stays inside the
    grid envelope intersected with the target lane's bounds (including
    the end-of-lane cap evaluated at the projected position).
    """
    out = []
    for sigma in grid.sigmas:
        target = ego_lane + sigma
        if not nb.has_lane(target):
            continue
        if sigma == 0 and nb.keep_lane_blocked(ego_lane, ego.v):
            continue
        lv = nb.lanes[target]
        lo = max(grid.v_min, lv.v_min)
        for a in grid.accelerations:
            s_end, v_end = propagate(ego.s, ego.v, a, horizon)
            hi = min(grid.v_max, float(nb.v_cap(target, float(s_end) - ego.s)))
            if lo - _VTOL <= float(v_end) <= hi + _VTOL:
                out.append(DecisionAction(sigma=sigma, a_x=a))
    out.sort(key=lambda c: (abs(c.a_x), _SIGMA_ORDER[c.sigma], c.a_x))
    return out


def ac_candidates(ac: KinematicState, ac_lane: int, grid: ActionGrid,
                  nb: NeighborView, horizon: float = T_DM) -> list[float]:
    """Feasible accelerations for an adjacent car, preference-ordered.

    Falls back to the least-violating single action when the envelope
    excludes everything, so the game always has an opponent move.
    """
    lv = nb.lanes[ac_lane]
    lo = max(grid.v_min, lv.v_min)
    feasible, violations = [], []
    for a in grid.accelerations:
        s_end, v_end = propagate(ac.s, ac.v, a, horizon)
        hi = min(grid.v_max, float(nb.v_cap(ac_lane, float(s_end) - ac.s)))
        v_end = float(v_end)
        if lo - _VTOL <= v_end <= hi + _VTOL:
            feasible.append(a)
        else:
            violations.append((max(lo - v_end, v_end - hi), abs(a), a))
    if not feasible:
        violations.sort()
        feasible = [violations[0][2]]
    feasible.sort(key=lambda a: (abs(a), a))
    return feasible


def nash_2p_matrices(j_row: np.ndarray, j_col: np.ndarray) -> tuple[int, int, int, bool]:
    """Pure Nash cell of a bimatrix game; both players minimize.

    Returns (row, col, multiplicity, security_fallback). Among equilibria
    the cell with the lowest row-player cost wins, then lower row index,
    then lower column index. With no pure equilibrium the row player
    falls back to its security strategy (min over rows of the row-wise
    worst case) and the reported column is the worst-case response.
    """
    j_row = np.asarray(j_row, dtype=float)
    j_col = np.asarray(j_col, dtype=float)
    row_br = j_row == j_row.min(axis=0, keepdims=True)
    col_br = j_col == j_col.min(axis=1, keepdims=True)
    eq = row_br & col_br
    cells = np.argwhere(eq)
    if cells.size == 0:
        worst = j_row.max(axis=1)
        r = int(np.argmin(worst))
        c = int(np.argmax(j_row[r]))
        return r, c, 0, True
    vals = j_row[cells[:, 0], cells[:, 1]]
    best = int(np.lexsort((cells[:, 1], cells[:, 0], vals))[0])
    r, c = int(cells[best, 0]), int(cells[best, 1])
    return r, c, int(len(cells)), False


def stackelberg_2p_matrices(j_row: np.ndarray, j_col: np.ndarray,
                            tol: float = 1e-9) -> tuple[int, int, int]:
    """Leader-follower cell: min over rows of the worst cost across the
    follower's best-response set.

    The follower's set per row holds every column within a relative
    tolerance of the row's minimum follower cost. Returns (row, col,
    multiplicity) where multiplicity counts rows achieving the leader
    value and col realizes the worst case on the chosen row.
    """
    j_row = np.asarray(j_row, dtype=float)
    j_col = np.asarray(j_col, dtype=float)
    m = j_col.min(axis=1, keepdims=True)
    br = j_col <= m + tol * np.maximum(1.0, np.abs(m))
    worst = np.where(br, j_row, -np.inf).max(axis=1)
    r = int(np.argmin(worst))
    in_set = br[r] & (j_row[r] == worst[r])
    c = int(np.argmax(in_set))
    mult = int(np.sum(worst == worst[r]))
    return r, c, mult


def _assemble_matrices(ego, ego_lane, ac, ac_lane, nb, cands, ac_accels,
                       ego_style, ac_style, gains, horizon):
    n_e, n_a = len(cands), len(ac_accels)
    j_e = np.empty((n_e, n_a))
    j_a = np.empty((n_e, n_a))
    accel_arr = np.asarray(ac_accels, dtype=float)
    for sigma in sorted({c.sigma for c in cands}):
        rows = [i for i, c in enumerate(cands) if c.sigma == sigma]
        accs = np.asarray([cands[i].a_x for i in rows])
        je, ja = pair_payoff_matrices(ego, ego_lane, sigma, accs, ac, ac_lane,
                                      accel_arr, nb, ego_style, ac_style,
                                      gains, horizon)
        j_e[rows, :] = je
        j_a[rows, :] = ja
    return j_e, j_a


def _finish(ego, ego_lane, ac, ac_lane, nb, cands, ac_accels, r, c, mult,
            security, kind, ego_style, ac_style, gains, horizon, side=None):
    action = cands[r]
    a_ac = float(ac_accels[c])
    eb = ego_cost(ego, ego_lane, action, {ac_lane: a_ac}, nb, ego_style,
                  gains, horizon)
    ab = ac_cost(ac, ac_lane, ego, ego_lane, action, a_ac, nb, ac_style,
                 gains, horizon)
    return GameSolution(ego_action=action, ac_actions={ac_lane: a_ac},
                        ego_cost=eb, ac_costs={ac_lane: ab},
                        equilibrium_kind=kind, multiplicity=mult,
                        security_fallback=security, side=side)


def solve_nash_2p(ego: KinematicState, ego_lane: int, ac: KinematicState,
                  ac_lane: int, nb: NeighborView, ego_grid: ActionGrid,
                  ac_grid: ActionGrid, ego_style: StyleProfile,
                  ac_style: StyleProfile, gains: CostGains,
                  horizon: float = T_DM) -> GameSolution:
    """Mutual best response between the ego and one adjacent car."""
    cands = ego_candidates(ego, ego_lane, ego_grid, nb, horizon)
    if not cands:
        raise InfeasibleDecisionError("no feasible ego action")
    ac_accels = ac_candidates(ac, ac_lane, ac_grid, nb, horizon)
    j_e, j_a = _assemble_matrices(ego, ego_lane, ac, ac_lane, nb, cands,
                                  ac_accels, ego_style, ac_style, gains, horizon)
    r, c, mult, sec = nash_2p_matrices(j_e, j_a)
    return _finish(ego, ego_lane, ac, ac_lane, nb, cands, ac_accels, r, c,
                   mult, sec, "nash", ego_style, ac_style, gains, horizon)


def solve_stackelberg_2p(ego: KinematicState, ego_lane: int, ac: KinematicState,
                         ac_lane: int, nb: NeighborView, ego_grid: ActionGrid,
                         ac_grid: ActionGrid, ego_style: StyleProfile,
                         ac_style: StyleProfile, gains: CostGains,
                         horizon: float = T_DM) -> GameSolution:
    """Ego leads, the adjacent car follows; worst case over follower ties."""
    cands = ego_candidates(ego, ego_lane, ego_grid, nb, horizon)
    if not cands:
        raise InfeasibleDecisionError("no feasible ego action")
    ac_accels = ac_candidates(ac, ac_lane, ac_grid, nb, horizon)
    j_e, j_a = _assemble_matrices(ego, ego_lane, ac, ac_lane, nb, cands,
                                  ac_accels, ego_style, ac_style, gains, horizon)
    r, c, mult = stackelberg_2p_matrices(j_e, j_a)
    return _finish(ego, ego_lane, ac, ac_lane, nb, cands, ac_accels, r, c,
                   mult, False, "stackelberg", ego_style, ac_style, gains, horizon)


def solve_solo(ego: KinematicState, ego_lane: int, nb: NeighborView,
               grid: ActionGrid, style: StyleProfile, gains: CostGains,
               horizon: float = T_DM, kind: str = "nash") -> GameSolution:
    """Degenerate game with no adjacent car: plain argmin for the ego."""
    cands = ego_candidates(ego, ego_lane, grid, nb, horizon)
    if not cands:
        raise InfeasibleDecisionError("no feasible ego action")
    best, best_cb = None, None
    for cand in cands:
        cb = ego_cost(ego, ego_lane, cand, {}, nb, style, gains, horizon)
        if best_cb is None or cb.total < best_cb.total:
            best, best_cb = cand, cb
    return GameSolution(ego_action=best, ac_actions={}, ego_cost=best_cb,
                        ac_costs={}, equilibrium_kind=kind, multiplicity=1)


def _side_solve(solver, ego, ego_lane, ac, ac_lane, nb, ego_grid, ac_grid,
                ego_style, ac_style, gains, horizon, sigmas):
    if ac_lane not in nb.lanes:
        return None
    try:
        grid = ego_grid.restrict_sigmas(sigmas)
    except ValueError:
        return None
    try:
        return solver(ego, ego_lane, ac, ac_lane, nb, grid, ac_grid,
                      ego_style, ac_style, gains, horizon)
    except InfeasibleDecisionError:
        return None


def _merge_two_ac(sub_left, sub_right) -> GameSolution:
    if sub_left is None and sub_right is None:
        raise InfeasibleDecisionError("both side games infeasible")
    if sub_right is None:
        winner, side = sub_left, -1
    elif sub_left is None:
        winner, side = sub_right, +1
    # Exact tie goes to the left branch.
    elif sub_left.ego_cost.total <= sub_right.ego_cost.total:
        winner, side = sub_left, -1
    else:
        winner, side = sub_right, +1
    ac_actions, ac_costs = {}, {}
    for sub in (sub_left, sub_right):
        if sub is not None:
            ac_actions.update(sub.ac_actions)
            ac_costs.update(sub.ac_costs)
    return GameSolution(ego_action=winner.ego_action, ac_actions=ac_actions,
                        ego_cost=winner.ego_cost, ac_costs=ac_costs,
                        equilibrium_kind=winner.equilibrium_kind,
                        multiplicity=winner.multiplicity,
                        security_fallback=winner.security_fallback, side=side)


def solve_nash_two_ac(ego: KinematicState, ego_lane: int,
                      ac_left: KinematicState, ac_right: KinematicState,
                      nb: NeighborView, ego_grid: ActionGrid,
                      ac_grid: ActionGrid, ego_style: StyleProfile,
                      left_style: StyleProfile, right_style: StyleProfile,
                      gains: CostGains, horizon: float = T_DM) -> GameSolution:
    """Two side subgames (left allows sigma in {-1,0}, right in {0,+1});
    the branch with the lower ego equilibrium cost decides the ego action.
    Each adjacent car keeps the acceleration from its own branch."""
    sub_l = _side_solve(solve_nash_2p, ego, ego_lane, ac_left, ego_lane - 1,
                        nb, ego_grid, ac_grid, ego_style, left_style, gains,
                        horizon, (-1, 0))
    sub_r = _side_solve(solve_nash_2p, ego, ego_lane, ac_right, ego_lane + 1,
                        nb, ego_grid, ac_grid, ego_style, right_style, gains,
                        horizon, (0, 1))
    return _merge_two_ac(sub_l, sub_r)


def solve_stackelberg_two_ac(ego: KinematicState, ego_lane: int,
                             ac_left: KinematicState, ac_right: KinematicState,
                             nb: NeighborView, ego_grid: ActionGrid,
                             ac_grid: ActionGrid, ego_style: StyleProfile,
                             left_style: StyleProfile, right_style: StyleProfile,
                             gains: CostGains,
                             horizon: float = T_DM) -> GameSolution:
    sub_l = _side_solve(solve_stackelberg_2p, ego, ego_lane, ac_left,
                        ego_lane - 1, nb, ego_grid, ac_grid, ego_style,
                        left_style, gains, horizon, (-1, 0))
    sub_r = _side_solve(solve_stackelberg_2p, ego, ego_lane, ac_right,
                        ego_lane + 1, nb, ego_grid, ac_grid, ego_style,
                        right_style, gains, horizon, (0, 1))
    return _merge_two_ac(sub_l, sub_r)
