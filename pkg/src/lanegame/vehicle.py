"""Driver-in-the-loop single-track vehicle model.

Eight continuous states: [v_x, v_y, r, phi, X, Y, delta_f, delta_f_dot].
The front steering angle is not an input; it is driven by a second-order
preview-tracking driver whose command is the lateral preview point Y_p.
Longitudinal acceleration a_x enters as an exogenous input chosen by the
decision layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

# State vector indices.
IVX, IVY, IR, IPHI, IX, IY, IDELTA, IDDELTA = range(8)

NX = 8

# Forward speed floor; the slip-angle terms divide by v_x.
V_FLOOR = 0.5


@dataclass(frozen=True)
class VehicleParams:
    """Chassis and tire constants for the single-track model."""

    m: float = 1300.0      # mass, kg
    i_z: float = 2500.0    # yaw inertia, kg m^2
    l_f: float = 1.25      # CoG to front axle, m
    l_r: float = 1.32      # CoG to rear axle, m
    k_f: float = 35000.0   # front cornering stiffness, N/rad
    k_r: float = 38000.0   # rear cornering stiffness, N/rad


@dataclass(frozen=True)
class DriverParams:
    """Steering-driver constants: lag, preview horizon, gain, arm ratio."""

    t_d: float   # steering delay time constant, s
    t_p: float   # preview time, s
    g_s: float   # combined steering gain
    a: float     # delay shaping constant


DEFAULT_VEHICLE = VehicleParams()


@dataclass
class ControlInput:
    """Inputs to the integrated model for one step."""

    y_p: float         # lateral coordinate of the preview point, m
    a_x: float = 0.0   # longitudinal acceleration command, m/s^2


def lateral_forces(state: np.ndarray, vp: VehicleParams) -> tuple[float, float]:
    """Linear-tire lateral forces (front, rear) at the current state."""
    v_x = state[IVX]
    alpha_f = -state[IDELTA] + (state[IVY] + vp.l_f * state[IR]) / v_x
    alpha_r = (state[IVY] - vp.l_r * state[IR]) / v_x
    return -vp.k_f * alpha_f, -vp.k_r * alpha_r


def derivatives(state: np.ndarray, u: ControlInput, vp: VehicleParams,
                dp: DriverParams) -> np.ndarray:
    """Time derivative of the 8-state vector.

    Caller guarantees v_x >= V_FLOOR; the slip angles are singular at
    v_x = 0.
    """
    v_x, v_y, r, phi = state[IVX], state[IVY], state[IR], state[IPHI]
    delta, ddelta = state[IDELTA], state[IDDELTA]

    f_yf, f_yr = lateral_forces(state, vp)
    cos_d = np.cos(delta)

    atd = dp.a * dp.t_d
    atd2 = dp.a * dp.t_d * dp.t_d
    # Preview error: commanded lateral point vs. predicted lateral position.
    err = u.y_p - (state[IY] + dp.t_p * v_x * phi)

    out = np.empty(NX)
    out[IVX] = v_y * r + u.a_x
    out[IVY] = -v_x * r + (f_yf * cos_d + f_yr) / vp.m
    out[IR] = (vp.l_f * f_yf * cos_d - vp.l_r * f_yr) / vp.i_z
    out[IPHI] = r
    out[IX] = v_x * np.cos(phi) - v_y * np.sin(phi)
    out[IY] = v_x * np.sin(phi) + v_y * np.cos(phi)
    out[IDELTA] = ddelta
    out[IDDELTA] = -ddelta / atd - delta / atd2 + (dp.g_s / atd2) * err
    return out


def step(state: np.ndarray, u: ControlInput, vp: VehicleParams,
         dp: DriverParams, dt: float) -> tuple[np.ndarray, bool]:
    """One fixed-step RK4 integration step.

    Returns the new state and a flag that is True when the forward speed
    had to be clamped at V_FLOOR.
    """
    k1 = derivatives(state, u, vp, dp)
    k2 = derivatives(state + 0.5 * dt * k1, u, vp, dp)
    k3 = derivatives(state + 0.5 * dt * k2, u, vp, dp)
    k4 = derivatives(state + dt * k3, u, vp, dp)
    nxt = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    clamped = False
    if nxt[IVX] < V_FLOOR:
        nxt[IVX] = V_FLOOR
        clamped = True
    return nxt, clamped


def linearize(state: np.ndarray, u: ControlInput, vp: VehicleParams,
              dp: DriverParams) -> tuple[np.ndarray, np.ndarray]:
    """Analytic continuous-time Jacobians A = df/dx, B = df/du at (state, u).

    The only control channel is the preview point Y_p, which enters the
    steering-acceleration row; a_x is treated as a held constant.
    """
    v_x, v_y, r, phi = state[IVX], state[IVY], state[IR], state[IPHI]
    delta = state[IDELTA]

    f_yf, _ = lateral_forces(state, vp)
    cos_d, sin_d = np.cos(delta), np.sin(delta)
    cphi, sphi = np.cos(phi), np.sin(phi)

    # Slip-angle partials.
    daf_dvx = -(v_y + vp.l_f * r) / v_x**2
    dar_dvx = -(v_y - vp.l_r * r) / v_x**2

    A = np.zeros((NX, NX))
    B = np.zeros((NX, 1))

    A[IVX, IVY] = r
    A[IVX, IR] = v_y

    # v_y_dot = -v_x r + (F_yf cos(delta) + F_yr) / m
    A[IVY, IVX] = -r + (-vp.k_f * daf_dvx * cos_d - vp.k_r * dar_dvx) / vp.m
    A[IVY, IVY] = (-vp.k_f * cos_d / v_x - vp.k_r / v_x) / vp.m
    A[IVY, IR] = -v_x + (-vp.k_f * vp.l_f * cos_d / v_x + vp.k_r * vp.l_r / v_x) / vp.m
    A[IVY, IDELTA] = (vp.k_f * cos_d - f_yf * sin_d) / vp.m

    # r_dot = (l_f F_yf cos(delta) - l_r F_yr) / I_z
    A[IR, IVX] = (-vp.l_f * vp.k_f * daf_dvx * cos_d + vp.l_r * vp.k_r * dar_dvx) / vp.i_z
    A[IR, IVY] = (-vp.l_f * vp.k_f * cos_d / v_x + vp.l_r * vp.k_r / v_x) / vp.i_z
    A[IR, IR] = (-vp.l_f**2 * vp.k_f * cos_d / v_x - vp.l_r**2 * vp.k_r / v_x) / vp.i_z
    A[IR, IDELTA] = vp.l_f * (vp.k_f * cos_d - f_yf * sin_d) / vp.i_z

    A[IPHI, IR] = 1.0

    A[IX, IVX] = cphi
    A[IX, IVY] = -sphi
    A[IX, IPHI] = -v_x * sphi - v_y * cphi

    A[IY, IVX] = sphi
    A[IY, IVY] = cphi
    A[IY, IPHI] = v_x * cphi - v_y * sphi

    A[IDELTA, IDDELTA] = 1.0

    atd = dp.a * dp.t_d
    atd2 = dp.a * dp.t_d * dp.t_d
    gain = dp.g_s / atd2
    A[IDDELTA, IVX] = -gain * dp.t_p * phi
    A[IDDELTA, IPHI] = -gain * dp.t_p * v_x
    A[IDDELTA, IY] = -gain
    A[IDDELTA, IDELTA] = -1.0 / atd2
    A[IDDELTA, IDDELTA] = -1.0 / atd

    B[IDDELTA, 0] = gain
    return A, B


def discretize(A: np.ndarray, B: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Zero-order-hold discretization via the augmented matrix exponential.

    exp([[A, B], [0, 0]] dt) packs A_k in the top-left block and the input
    integral B_k in the top-right column.
    """
    n, m = A.shape[0], B.shape[1]
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = A
    aug[:n, n:] = B
    phi = expm(aug * dt)
    return phi[:n, :n], phi[:n, n:]
