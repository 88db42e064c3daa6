"""Numerical verification of the seven kinematic relations, the
equivalence proof chain, and the open-loop RMSE model comparisons.

The multibody-simulator comparison is reproduced with a refined-step
Newton-Euler reference (RK4 at dt/100) standing in for a third-party
dynamics engine; outputs label it as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fast
from .integrators import Trajectory, simulate
from .kinematics import (
    skew,
    w_dot,
    w_inverse,
    w_inverse_dot,
    w_matrix,
    w_partials,
    row_jacobians,
    sigma_w_inv,
)
from .models import (
    ETADOT,
    QuadParams,
    body_to_gen,
    coriolis_matrix,
    el_lit_rates,
    rel_rates,
    rotated_inertia,
)

GROUPS = {"p": slice(0, 3), "eta": slice(3, 6),
          "pdot": slice(6, 9), "etadot": slice(9, 12)}

RELATION_NAMES = ("R1", "R2", "R3", "R4", "R5", "R6", "R7")

# Pitch kept away from the 321 gimbal lock when sampling random states
PITCH_SAMPLING_BOUND = 1.3
FD_STEP = 1e-6


def drifting_rotor_input(t: float) -> np.ndarray:
    """The slowly drifting four-rotor input used by the open-loop study."""
    s = 0.1 * math.sin(t)
    return np.array([475.9 + s, 476.2 + s, 476.0, 476.1])


def sample_states(n: int, seed: int):
    """Random (eta, eta_dot) pairs with |pitch| < PITCH_SAMPLING_BOUND."""
    rng = np.random.default_rng(seed)
    etas = rng.uniform(-np.pi, np.pi, (n, 3))
    etas[:, 1] = rng.uniform(-PITCH_SAMPLING_BOUND, PITCH_SAMPLING_BOUND, n)
    eta_dots = rng.uniform(-2.0, 2.0, (n, 3))
    return etas, eta_dots


@dataclass
class RelationReport:
    """Max residual per relation over a sampled batch of states."""

    n_samples: int
    seed: int
    tol: float
    method: str
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())

    def format_text(self) -> str:
        lines = [
            f"relation residuals over {self.n_samples} states "
            f"(seed {self.seed}, {self.method} partials, "
            f"|pitch| < {PITCH_SAMPLING_BOUND}):"
        ]
        for name in RELATION_NAMES:
            r = self.residuals[name]
            verdict = "pass" if r < self.tol else "FAIL"
            lines.append(f"  {name}: max residual {r:.3e}  "
                         f"(tol {self.tol:.1e})  {verdict}")
        return "\n".join(lines)


def _relation_residuals(eta, eta_dot, method: str) -> dict[str, float]:
    w = w_matrix(eta)
    winv = w_inverse(eta)
    omega = w @ eta_dot
    p = row_jacobians(eta)

    if method == "analytic":
        winv_dot = w_inverse_dot(eta, eta_dot)
        wd = w_dot(eta, eta_dot)
    elif method == "fd":
        h = FD_STEP
        winv_dot = (w_inverse(eta + h * eta_dot)
                    - w_inverse(eta - h * eta_dot)) / (2.0 * h)
        wd = (w_matrix(eta + h * eta_dot)
              - w_matrix(eta - h * eta_dot)) / (2.0 * h)
    else:
        raise ValueError(f"unknown method {method!r}")

    res = {}
    # R1: the stacked blocks collapse to skew of the rows of W^-1
    blocks = sigma_w_inv(eta)
    res["R1"] = max(np.abs(blocks[i] - skew(winv[i])).max() for i in range(3))
    # R2: rows of d(W^-1)/dt equal omega^T ((dw_i/deta) W^-1)^T
    rows = np.stack([p[i] @ winv @ omega for i in range(3)])
    res["R2"] = np.abs(winv_dot - rows).max()
    # R3: W^-1 (d omega/d eta_dot) = I
    res["R3"] = np.abs(winv @ w - np.eye(3)).max()
    # R4: (dW^-1/deta) omega rows match the W^-1-factored form times W
    lhs = np.stack([omega @ p[i] for i in range(3)])
    rhs = np.stack([omega @ p[i] @ winv for i in range(3)]) @ w
    res["R4"] = np.abs(lhs - rhs).max()
    # R5: product rule for d/dt(W^-1 W) = 0
    res["R5"] = np.abs(winv_dot @ w + winv @ wd).max()
    # R6: W_dot = d omega/d eta - S(omega) W
    dw = w_partials(eta)
    domega_deta = np.column_stack([dw[k] @ eta_dot for k in range(3)])
    res["R6"] = np.abs(wd - (domega_deta - skew(omega) @ w)).max()
    # R7: d omega/d eta_dot = W exactly (linearity in eta_dot)
    jac = np.column_stack([w_matrix(eta) @ e for e in np.eye(3)])
    res["R7"] = np.abs(jac - w).max()
    return res


def check_relations(n_samples: int = 1000, seed: int = 0, tol: float = 1e-9,
                    method: str = "analytic") -> RelationReport:
    """Evaluate the seven relations over random sampled states."""
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    etas, eta_dots = sample_states(n_samples, seed)
    report = RelationReport(n_samples, seed, tol, method,
                            {name: 0.0 for name in RELATION_NAMES})
    for eta, eta_dot in zip(etas, eta_dots):
        for name, r in _relation_residuals(eta, eta_dot, method).items():
            if r > report.residuals[name]:
                report.residuals[name] = r
    return report


@dataclass
class ProofChainReport:
    """Residuals of the revised-model equivalence proof at one state."""

    generalized_torque_residual: float   # both sides of W^T(S(w)Jw + Jw_dot) = W^T M
    newton_euler_residual: float         # J w_dot + S(w) J w = M, relative
    literature_residual: float           # same check with the literature accel

    def format_text(self) -> str:
        return (
            "equivalence proof chain residuals (relative):\n"
            f"  generalized-torque identity: {self.generalized_torque_residual:.3e}\n"
            f"  Newton-Euler closure (revised model): {self.newton_euler_residual:.3e}\n"
            f"  Newton-Euler closure (literature model): {self.literature_residual:.3e}\n"
        )


def check_proof_chain(eta, eta_dot, torque, params: QuadParams) -> ProofChainReport:
    """Evaluate the proof that the revised model closes the Newton-Euler
    equations while the literature model does not."""
    eta = np.asarray(eta, float)
    eta_dot = np.asarray(eta_dot, float)
    torque = np.asarray(torque, float)
    w = w_matrix(eta)
    w_inverse(eta)  # singularity guard
    wd = w_dot(eta, eta_dot)
    j = params.inertia
    omega = w @ eta_dot
    state = np.concatenate([np.zeros(3), eta, np.zeros(3), eta_dot])
    zero = np.zeros(3)

    scale = max(np.linalg.norm(torque), 1e-12)

    def ne_residual(eta_dd):
        omega_dot = wd @ eta_dot + w @ eta_dd
        return j @ omega_dot + np.cross(omega, j @ omega) - torque

    rel_dd = rel_rates(state, 0.0, torque, zero, params)[ETADOT]
    lit_dd = el_lit_rates(state, 0.0, torque, zero, params)[ETADOT]

    res_ne = ne_residual(rel_dd)
    gen_res = w.T @ ne_residual(rel_dd)  # W^T(Jw_dot + S(w)Jw - M)
    return ProofChainReport(
        generalized_torque_residual=np.linalg.norm(gen_res) / scale,
        newton_euler_residual=np.linalg.norm(res_ne) / scale,
        literature_residual=np.linalg.norm(ne_residual(lit_dd)) / scale,
    )


def rmse(a: Trajectory, b: Trajectory, group: str) -> float:
    """Pooled RMSE of one coordinate group between equal-grid trajectories."""
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}")
    if len(a) != len(b) or a.dt != b.dt:
        raise ValueError(
            f"trajectory grids differ: {len(a)} @ {a.dt} vs {len(b)} @ {b.dt}")
    d = a.states[:, GROUPS[group]] - b.states[:, GROUPS[group]]
    return math.sqrt(float((d * d).mean()))


@dataclass(frozen=True)
class ComparisonConfig:
    """Settings for an open-loop model comparison run."""

    dt: float = 0.01
    duration: float = 60.0
    integrator: str = "rk4"
    params: QuadParams = field(default_factory=QuadParams)
    oracle_refinement: int = 100

    def __post_init__(self):
        if self.dt <= 0 or self.duration <= 0:
            raise ValueError("dt and duration must be positive")
        if self.oracle_refinement < 2:
            raise ValueError("oracle_refinement must be >= 2")


@dataclass
class RmseTable:
    """RMSE per coordinate group (rows) per model (columns)."""

    reference: str
    columns: list[str]
    values: dict[str, list[float]]    # group -> one value per column
    dt: float
    duration: float
    integrator: str
    notes: dict[str, str] = field(default_factory=dict)

    def value(self, group: str, column: str) -> float:
        return self.values[group][self.columns.index(column)]

    def format_text(self) -> str:
        width = 14
        head = "group".ljust(8) + "".join(c.rjust(width) for c in self.columns)
        lines = [
            f"RMSE vs {self.reference} "
            f"(dt={self.dt:g} s, duration={self.duration:g} s, {self.integrator})",
            head,
        ]
        for group in GROUPS:
            row = group.ljust(8)
            row += "".join(f"{v:>{width}.6e}" for v in self.values[group])
            lines.append(row)
        for k, v in self.notes.items():
            lines.append(f"note: {k}: {v}")
        return "\n".join(lines)

    def csv_rows(self):
        yield ["group"] + list(self.columns)
        for group in GROUPS:
            yield [group] + [repr(v) for v in self.values[group]]


_MODEL_FNS = {
    "ne": fast.ne_derivative_321,
    "el": fast.el_lit_derivative_321,
    "rel": fast.rel_derivative_321,
}


def simulate_model(model: str, input_fn, cfg: ComparisonConfig,
                   y0=None) -> Trajectory:
    """Simulate one named model under a rotor-speed input function."""
    if model not in _MODEL_FNS:
        raise ValueError(f"unknown model {model!r}, expected ne, el or rel")
    deriv = _MODEL_FNS[model]
    params = cfg.params

    def f(t, y):
        return deriv(y, input_fn(t), params)

    if y0 is None:
        y0 = np.zeros(12)
    return simulate(f, y0, cfg.duration, cfg.dt, cfg.integrator)


def _as_gen(traj: Trajectory) -> Trajectory:
    states = np.array([body_to_gen(s) for s in traj.states])
    return Trajectory(traj.dt, traj.times, states, traj.diverged,
                      traj.diverged_step, traj.diverged_reason)


def run_model_comparison(cfg: ComparisonConfig,
                         input_fn=drifting_rotor_input) -> RmseTable:
    """RMSE of both E-L variants against the Newton-Euler model."""
    ne = _as_gen(simulate_model("ne", input_fn, cfg))
    el = simulate_model("el", input_fn, cfg)
    rel = simulate_model("rel", input_fn, cfg)
    table = RmseTable("ne", ["el", "rel"], {}, cfg.dt, cfg.duration,
                      cfg.integrator)
    for label, traj in (("el", el), ("rel", rel)):
        if traj.diverged:
            table.notes[label] = f"diverged at step {traj.diverged_step}: " \
                                 f"{traj.diverged_reason}"
    for group in GROUPS:
        table.values[group] = [
            rmse(ne, el, group) if not el.diverged else math.inf,
            rmse(ne, rel, group) if not rel.diverged else math.inf,
        ]
    return table


def _subsample(traj: Trajectory, every: int, dt: float) -> Trajectory:
    return Trajectory(dt, dt * np.arange(len(traj.states[::every])),
                      traj.states[::every])


def run_oracle_comparison(cfg: ComparisonConfig,
                          input_fn=drifting_rotor_input) -> RmseTable:
    """RMSE of all three models against a refined-step reference.

    The reference is the Newton-Euler model integrated with RK4 at
    dt / oracle_refinement, subsampled back onto the run grid.  It stands
    in for an external multibody engine.
    """
    ref_cfg = ComparisonConfig(dt=cfg.dt / cfg.oracle_refinement,
                               duration=cfg.duration, integrator="rk4",
                               params=cfg.params,
                               oracle_refinement=cfg.oracle_refinement)
    oracle = _as_gen(_subsample(simulate_model("ne", input_fn, ref_cfg),
                                cfg.oracle_refinement, cfg.dt))
    ne = _as_gen(simulate_model("ne", input_fn, cfg))
    el = simulate_model("el", input_fn, cfg)
    rel = simulate_model("rel", input_fn, cfg)
    table = RmseTable("refined-step reference (substitute for a multibody engine)",
                      ["ne", "el", "rel"], {}, cfg.dt, cfg.duration,
                      cfg.integrator)
    table.notes["oracle"] = (
        f"Newton-Euler RK4 at dt/{cfg.oracle_refinement}"
    )
    for label, traj in (("ne", ne), ("el", el), ("rel", rel)):
        if traj.diverged:
            table.notes[label] = f"diverged at step {traj.diverged_step}: " \
                                 f"{traj.diverged_reason}"
    for group in GROUPS:
        table.values[group] = [
            rmse(oracle, t, group) if not t.diverged else math.inf
            for t in (ne, el, rel)
        ]
    return table
