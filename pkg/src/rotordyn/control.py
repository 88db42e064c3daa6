"""Feedback-linearization PID flight control and the gain-sweep study.

The truth plant for all closed-loop runs is the Newton-Euler model with
wrench-level inputs.  The inner attitude loop cancels the nonlinear
attitude dynamics using either the literature E-L terms (torque command
J_R nu + C eta_dot) or the revised E-L terms (the same command mapped
through W^-T), which is the locus of the comparison; the outer position
loop is identical for both.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fast import _attitude_terms, ne_rates_321
from .integrators import step_rk4
from .kinematics import SINGULARITY_TOL, SingularConfiguration, w_matrix
from .models import QuadParams

MAX_TILT = math.radians(60.0)
ERROR_LIMIT = math.pi / 2  # attitude error beyond this counts as diverged


class InfeasibleAttitude(Exception):
    """Commanded acceleration requires more tilt than allowed."""


@dataclass(frozen=True)
class Gains:
    """Outer position and inner attitude PID gains (scalars applied per axis)."""

    pos_kp: float = 6.0
    pos_ki: float = 0.0
    pos_kd: float = 4.0
    att_kp: float = 900.0
    att_ki: float = 8e3
    att_kd: float = 22.0

    def __post_init__(self):
        for name in ("pos_kp", "pos_ki", "pos_kd", "att_kp", "att_ki", "att_kd"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


@dataclass(frozen=True)
class HelixSpec:
    """Reference trajectory: circle of given radius and angular rate with a
    constant climb rate."""

    radius: float = 2.0
    rate: float = 1.4          # rad/s
    climb: float = 0.1         # m/s
    yaw_mode: str = "constant"  # or "tangent"
    yaw: float = 0.0
    duration: float = 60.0

    def __post_init__(self):
        if self.radius <= 0 or self.duration <= 0:
            raise ValueError("radius and duration must be positive")
        if self.yaw_mode not in ("constant", "tangent"):
            raise ValueError(f"yaw_mode must be constant or tangent: {self.yaw_mode!r}")


def helix_reference(t: float, spec: HelixSpec):
    """Reference position, velocity, acceleration and yaw at time t."""
    w = spec.rate
    r = spec.radius
    c, s = math.cos(w * t), math.sin(w * t)
    p = np.array([r * c, r * s, spec.climb * t])
    pd = np.array([-r * w * s, r * w * c, spec.climb])
    pdd = np.array([-r * w * w * c, -r * w * w * s, 0.0])
    if spec.yaw_mode == "constant":
        psi = spec.yaw
    else:
        psi = math.atan2(pd[1], pd[0])
    return p, pd, pdd, psi


def position_outer_loop(p, p_dot, p_ref, pd_ref, pdd_ref, psi_ref,
                        int_err, gains: Gains, params: QuadParams,
                        max_tilt: float = MAX_TILT):
    """Thrust magnitude and attitude reference from the commanded acceleration.

    The commanded specific force f = a_cmd + g e3 is realized by tilting the
    body z axis onto f; raises InfeasibleAttitude if that needs more than
    ``max_tilt`` or a non-positive vertical component.
    """
    a_cmd = (pdd_ref + gains.pos_kd * (pd_ref - p_dot)
             + gains.pos_kp * (p_ref - p) + gains.pos_ki * int_err)
    f = a_cmd + np.array([0.0, 0.0, params.gravity])
    norm = np.linalg.norm(f)
    if f[2] <= 0.0 or f[2] / norm < math.cos(max_tilt):
        raise InfeasibleAttitude(
            f"commanded specific force {f} exceeds tilt limit "
            f"{math.degrees(max_tilt):.0f} deg")
    u = f / norm
    sp, cp = math.sin(psi_ref), math.cos(psi_ref)
    ux = cp * u[0] + sp * u[1]
    uy = -sp * u[0] + cp * u[1]
    phi_ref = -math.asin(uy)
    theta_ref = math.atan2(ux, u[2])
    thrust = params.mass * norm
    return thrust, np.array([phi_ref, theta_ref, psi_ref])


def attitude_fl_pid(compensator: str, eta, eta_dot, eta_ref, etad_ref,
                    etadd_ref, int_err, gains: Gains,
                    params: QuadParams) -> np.ndarray:
    """Body torque command from feedback linearization plus PID.

    ``compensator`` selects the model used for dynamic compensation:
    'el' applies M = J_R nu + C eta_dot (literature), 'rel' applies
    M = W^-T (J_R nu + C eta_dot), which exactly linearizes the true
    attitude dynamics.
    """
    if compensator not in ("el", "rel"):
        raise ValueError(f"compensator must be 'el' or 'rel': {compensator!r}")
    err = eta_ref - eta
    nu = (etadd_ref + gains.att_kd * (etad_ref - eta_dot)
          + gains.att_kp * err + gains.att_ki * int_err)
    sf, cf = math.sin(eta[0]), math.cos(eta[0])
    st, ct = math.sin(eta[1]), math.cos(eta[1])
    if abs(ct) <= SINGULARITY_TOL:
        raise SingularConfiguration(f"gimbal lock in controller at eta={eta}")
    jr, c_etad = _attitude_terms(sf, cf, st, ct, eta_dot, params)
    tau = jr @ nu + c_etad
    if compensator == "el":
        return tau
    # W^-T for the 321 sequence
    tt = st / ct
    return np.array([
        tau[0],
        sf * tt * tau[0] + cf * tau[1] + (sf / ct) * tau[2],
        cf * tt * tau[0] - sf * tau[1] + (cf / ct) * tau[2],
    ])


@dataclass
class TrackingResult:
    """Closed-loop run record: attitude error series and divergence flag."""

    dt: float
    times: np.ndarray
    states: np.ndarray            # Newton-Euler plant states
    attitude_error: np.ndarray    # eta_ref - eta per sample
    diverged: bool
    diverged_reason: str = ""

    @property
    def max_error(self) -> float:
        if self.attitude_error.size == 0:
            return math.inf
        return float(np.abs(self.attitude_error).max())

    def max_error_after(self, t_transient: float) -> float:
        mask = self.times >= t_transient
        if self.diverged or not mask.any():
            return math.inf
        return float(np.abs(self.attitude_error[mask]).max())


def run_tracking(compensator: str, spec: HelixSpec, gains: Gains,
                 params: QuadParams, dt: float = 1e-3) -> TrackingResult:
    """Simulate the closed loop on the Newton-Euler plant.

    The wrench is recomputed once per control step and held over the RK4
    substages.  The plant sees no rotor-level gyroscopic torque (wrench
    commands are applied directly).
    """
    n_steps = int(math.floor(spec.duration / dt + 1e-9))
    y = _reference_start(spec, gains, params)
    pos_int = np.zeros(3)
    att_int = np.zeros(3)
    zero3 = np.zeros(3)

    times = dt * np.arange(n_steps + 1)
    states = np.empty((n_steps + 1, 12))
    errors = np.empty((n_steps + 1, 3))
    states[0] = y

    def record_fail(i, reason):
        return TrackingResult(dt, times[:i], states[:i], errors[:i],
                              diverged=True, diverged_reason=reason)

    for i in range(n_steps + 1):
        t = times[i]
        p_ref, pd_ref, pdd_ref, psi_ref = helix_reference(t, spec)
        eta = y[3:6]
        p_dot = _inertial_velocity(y)
        try:
            thrust, eta_ref = position_outer_loop(
                y[0:3], p_dot, p_ref, pd_ref, pdd_ref, psi_ref,
                pos_int, gains, params)
            eta_dot = _euler_rates(y)
            torque = attitude_fl_pid(compensator, eta, eta_dot, eta_ref,
                                     zero3, zero3, att_int, gains, params)
        except (InfeasibleAttitude, SingularConfiguration) as exc:
            return record_fail(i, str(exc))

        err = eta_ref - eta
        errors[i] = err
        states[i] = y
        if np.abs(err).max() > ERROR_LIMIT:
            return record_fail(i + 1, "attitude error limit exceeded")
        if i == n_steps:
            break

        pos_int += (p_ref - y[0:3]) * dt
        att_int += err * dt

        def f(_t, yy):
            return ne_rates_321(yy, thrust, torque, params)

        try:
            y = step_rk4(f, y, t, dt)
        except SingularConfiguration as exc:
            return record_fail(i + 1, str(exc))
        if not np.all(np.isfinite(y)) or np.abs(y).max() > 1e9:
            return record_fail(i + 1, "plant state diverged")

    return TrackingResult(dt, times, states, errors, diverged=False)


def _reference_start(spec: HelixSpec, gains: Gains,
                     params: QuadParams) -> np.ndarray:
    """Plant state matched to the reference at t = 0 (feedforward attitude,
    reference velocity, attitude rate from a finite difference of the
    feedforward attitude)."""
    from .kinematics import rotation

    def ff_attitude(t):
        p_ref, pd_ref, pdd_ref, psi_ref = helix_reference(t, spec)
        _, eta_ref = position_outer_loop(p_ref, pd_ref, p_ref, pd_ref,
                                         pdd_ref, psi_ref, np.zeros(3),
                                         gains, params)
        return eta_ref

    p_ref, pd_ref, _, _ = helix_reference(0.0, spec)
    h = 1e-4
    eta0 = ff_attitude(0.0)
    etad0 = (ff_attitude(h) - ff_attitude(-h)) / (2.0 * h)
    y = np.empty(12)
    y[0:3] = p_ref
    y[3:6] = eta0
    y[6:9] = rotation(eta0).T @ pd_ref
    y[9:12] = w_matrix(eta0) @ etad0
    return y


def _euler_rates(y) -> np.ndarray:
    sf, cf = math.sin(y[3]), math.cos(y[3])
    st, ct = math.sin(y[4]), math.cos(y[4])
    if abs(ct) <= SINGULARITY_TOL:
        raise SingularConfiguration(f"gimbal lock at eta={y[3:6]}")
    tt = st / ct
    wx, wy, wz = y[9], y[10], y[11]
    return np.array([wx + sf * tt * wy + cf * tt * wz,
                     cf * wy - sf * wz,
                     (sf * wy + cf * wz) / ct])


def _inertial_velocity(y) -> np.ndarray:
    from .kinematics import rotation
    return rotation(y[3:6]) @ y[6:9]


@dataclass
class SweepRow:
    compensator: str
    ki: float
    stable: bool
    max_error: float


@dataclass
class SweepReport:
    """Stability classification per (compensator, integral gain) cell."""

    rows: list[SweepRow] = field(default_factory=list)

    def min_destabilizing_ki(self, compensator: str) -> float | None:
        kis = [r.ki for r in self.rows
               if r.compensator == compensator and not r.stable]
        return min(kis) if kis else None

    def format_text(self) -> str:
        lines = ["compensator      Ki       stable   max|e_eta|"]
        for r in self.rows:
            lines.append(f"{r.compensator:<12}{r.ki:>10.1f}   "
                         f"{str(r.stable):<8} {r.max_error:.4e}")
        for comp in sorted({r.compensator for r in self.rows}):
            ki = self.min_destabilizing_ki(comp)
            lines.append(f"min destabilizing Ki for {comp}: "
                         f"{'none in grid' if ki is None else f'{ki:g}'}")
        return "\n".join(lines)

    def csv_rows(self):
        yield ["compensator", "ki", "stable", "max_error"]
        for r in self.rows:
            yield [r.compensator, repr(r.ki), str(r.stable), repr(r.max_error)]


DEFAULT_KI_GRID = (8e3, 10e3, 12e3, 14e3, 15.5e3, 16e3, 18e3)


def _thread_count() -> int:
    raw = os.environ.get("ROTORDYN_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return max(1, n) if n > 0 else min(4, os.cpu_count() or 1)


def gain_sweep(compensators, ki_grid, gains: Gains, spec: HelixSpec,
               params: QuadParams, dt: float = 2e-3) -> SweepReport:
    """Classify closed-loop stability over a grid of integral gains."""
    ki_grid = sorted(ki_grid)
    if not ki_grid:
        raise ValueError("ki_grid must be nonempty")
    cells = [(comp, ki) for comp in compensators for ki in ki_grid]

    def run_cell(cell):
        comp, ki = cell
        g = Gains(gains.pos_kp, gains.pos_ki, gains.pos_kd,
                  gains.att_kp, ki, gains.att_kd)
        result = run_tracking(comp, spec, g, params, dt)
        return SweepRow(comp, ki, not result.diverged, result.max_error)

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        rows = list(pool.map(run_cell, cells))
    return SweepReport(rows)
