"""Numeric integration of the Hamiltonian and solution flows, with monitors.

Two flows are integrated:

* the Hamiltonian flow of the canonical structure, in the time parameter t:
      dx/dt = -4 H_y,  dy/dt = 4 (H_x + f H_p),  dp/dt = -4 f H_y
* the solution flow ("2-graph" of the underlying second-order equation), in
  the independent variable x:
      dy/dx = p,  dp/dx = f(x, y, p)

The default stepper is classical fixed-step RK4; an adaptive Dormand-Prince
5(4) pair is available for references and stiff right-hand sides.  Every
trajectory carries named monitor channels (value of H, geodesic residual,
pullback defects).  Runs abort, keeping the partial trajectory, when a
coordinate exceeds the blow-up bound or the right-hand side leaves its
domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .expr import as_expr, compile_expr
from .connection import covariant_derivative
from .geometry import FrameVector, OdeSurface
from .hamiltonian import hamiltonian_field, hamiltonian_field_coordinates, omega1

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "ConservationReport",
    "BlowUpError",
    "integrate_hamiltonian",
    "integrate_2graph",
    "geodesic_residual",
    "conservation_report",
    "hamiltonian_frame_field",
]

#: runs abort once any coordinate passes this magnitude
BLOWUP_BOUND = 1e12

_DIGITS = ".17g"  # round-trips doubles


class BlowUpError(RuntimeError):
    """A trajectory left the trusted region; the partial data is attached."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class IntegratorConfig:
    """Stepper selection: fixed-step rk4 (dt) or adaptive rk45 (rel/abs)."""

    method: str = "rk4"
    dt: float = 1e-3
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    t_end: float = 1.0

    def __post_init__(self):
        if self.method not in ("rk4", "rk45-adaptive"):
            raise ValueError("method must be 'rk4' or 'rk45-adaptive'")
        if self.dt <= 0 or self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("step size and tolerances must be positive")
        if not math.isfinite(self.t_end):
            raise ValueError("t_end must be finite")


@dataclass
class Trajectory:
    """Samples (t, x, y, p) with aligned monitor channels."""

    t: np.ndarray
    states: np.ndarray  # shape (n, 3)
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    status: str = "completed"  # completed | aborted-blowup | aborted-domain
    note: str = ""
    independent_variable: str = "t"

    def __len__(self) -> int:
        return len(self.t)

    def endpoint(self) -> tuple[float, np.ndarray]:
        return float(self.t[-1]), self.states[-1]

    def add_monitor(self, name: str, values: np.ndarray) -> None:
        if len(values) != len(self.t):
            raise ValueError("monitor length must match the sample count")
        self.monitors[name] = np.asarray(values, dtype=float)

    def to_csv(self) -> str:
        names = list(self.monitors)
        header = [self.independent_variable, "x", "y", "p", *names]
        lines = [",".join(header)]
        for k in range(len(self.t)):
            row = [format(self.t[k], _DIGITS)]
            row += [format(v, _DIGITS) for v in self.states[k]]
            row += [format(self.monitors[name][k], _DIGITS) for name in names]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "independent_variable": self.independent_variable,
            "status": self.status,
            "note": self.note,
            "samples": {
                self.independent_variable: [format(v, _DIGITS) for v in self.t],
                "x": [format(v, _DIGITS) for v in self.states[:, 0]],
                "y": [format(v, _DIGITS) for v in self.states[:, 1]],
                "p": [format(v, _DIGITS) for v in self.states[:, 2]],
            },
            "monitors": {
                name: [format(v, _DIGITS) for v in values]
                for name, values in self.monitors.items()
            },
        }


_DOMAIN_ERRORS = (ValueError, ZeroDivisionError, OverflowError)


def _state_ok(state) -> bool:
    return all(math.isfinite(v) and abs(v) <= BLOWUP_BOUND for v in state)


def _rk4(rhs, t0, state0, t_end, dt):
    """Classical fixed-step RK4 from t0 to t_end; returns (ts, states, status, note)."""
    ts = [t0]
    states = [np.asarray(state0, dtype=float)]
    n_steps = max(1, int(round(abs(t_end - t0) / dt)))
    h_nominal = (t_end - t0) / n_steps
    t = t0
    y = states[0]
    for _ in range(n_steps):
        h = h_nominal
        try:
            k1 = rhs(t, y)
            k2 = rhs(t + h / 2, y + (h / 2) * k1)
            k3 = rhs(t + h / 2, y + (h / 2) * k2)
            k4 = rhs(t + h, y + h * k3)
        except _DOMAIN_ERRORS as err:
            return ts, states, "aborted-domain", str(err)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t + h
        if not _state_ok(y):
            return ts, states, "aborted-blowup", f"state left |coord| <= {BLOWUP_BOUND:g}"
        ts.append(t)
        states.append(y)
    return ts, states, "completed", ""


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_ERR = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


def _rk45(rhs, t0, state0, t_end, rel_tol, abs_tol):
    ts = [t0]
    states = [np.asarray(state0, dtype=float)]
    t = t0
    y = states[0]
    span = t_end - t0
    direction = 1.0 if span >= 0 else -1.0
    h = direction * min(abs(span) / 10 or 1e-3, 1e-1)
    h_min = abs(span) * 1e-14 + 1e-15
    while (t_end - t) * direction > 0:
        if abs(h) < h_min:
            return ts, states, "aborted-domain", "adaptive step size underflow"
        if (t + h - t_end) * direction > 0:
            h = t_end - t
        try:
            k = [rhs(t, y)]
            for row, c in zip(_DP_A[1:], _DP_C[1:]):
                yk = y + h * sum(a * kk for a, kk in zip(row, k))
                k.append(rhs(t + c * h, yk))
        except _DOMAIN_ERRORS as err:
            return ts, states, "aborted-domain", str(err)
        y_new = y + h * sum(b * kk for b, kk in zip(_DP_B5, k))
        err_vec = h * sum(e * kk for e, kk in zip(_DP_ERR, k))
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if err_norm <= 1.0:
            t = t + h
            y = y_new
            if not _state_ok(y):
                return ts, states, "aborted-blowup", f"state left |coord| <= {BLOWUP_BOUND:g}"
            ts.append(t)
            states.append(y)
            factor = 5.0 if err_norm == 0 else min(5.0, max(0.2, 0.9 * err_norm**-0.2))
        else:
            factor = min(1.0, max(0.2, 0.9 * err_norm**-0.2))
        h = h * factor
    return ts, states, "completed", ""


def _run(rhs, t0, state0, cfg: IntegratorConfig) -> Trajectory:
    if cfg.method == "rk4":
        ts, states, status, note = _rk4(rhs, t0, state0, cfg.t_end, cfg.dt)
    else:
        ts, states, status, note = _rk45(rhs, t0, state0, cfg.t_end, cfg.rel_tol, cfg.abs_tol)
    return Trajectory(
        t=np.asarray(ts, dtype=float),
        states=np.vstack(states),
        status=status,
        note=note,
    )


# ---------------------------------------------------------------------------
# the two flows


def hamiltonian_frame_field(s: OdeSurface, H) -> FrameVector:
    """The Hamiltonian field of the canonical structure as a frame field
    (for symbolic post-processing of a numeric run)."""
    return hamiltonian_field(s, omega1(s), H)


def integrate_hamiltonian(s: OdeSurface, H, q0, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the canonical Hamiltonian flow from q0 over [0, t_end].

    The trajectory carries an ``H`` monitor; conservation is summarized by
    :func:`conservation_report`.
    """
    H = as_expr(H)
    exprs = hamiltonian_field_coordinates(s, H)
    fns = [compile_expr(e) for e in exprs]

    def rhs(t, state):
        # builtin floats keep overflow catchable (numpy scalars go inf silently)
        qx, qy, qp = (float(v) for v in state)
        return np.array([fn(qx, qy, qp) for fn in fns])

    q0 = _as_state(q0)
    traj = _run(rhs, 0.0, q0, cfg)
    h_fn = compile_expr(H)
    traj.add_monitor("H", _eval_along(h_fn, traj))
    return traj


def integrate_2graph(s: OdeSurface, x0: float, y0: float, p0: float, cfg: IntegratorConfig) -> Trajectory:
    """Integrate dy/dx = p, dp/dx = f from (x0, y0, p0) up to x = t_end.

    The monitors ``pullback_dy`` and ``pullback_dp`` report the finite
    difference defects |Dy/Dx - p| and |Dp/Dx - f| of the sampled solution
    curve (central differences at interior samples, one-sided at the ends);
    they measure how far the discrete curve is from annihilating the contact
    forms dy - p dx and dp - f dx.
    """
    f_fn = compile_expr(s.f)

    def rhs(t, state):
        qx, qy, qp = (float(v) for v in state)
        return np.array([1.0, qp, f_fn(qx, qy, qp)])

    traj = _run(rhs, x0, np.array([x0, y0, p0], dtype=float), cfg)
    traj.independent_variable = "x"
    n = len(traj)
    res_dy = np.zeros(n)
    res_dp = np.zeros(n)
    if n >= 2:
        xs = traj.t
        ys = traj.states[:, 1]
        ps = traj.states[:, 2]
        dy = np.gradient(ys, xs)
        dp = np.gradient(ps, xs)
        fvals = _eval_along(f_fn, traj)
        res_dy = np.abs(dy - ps)
        res_dp = np.abs(dp - fvals)
    traj.add_monitor("pullback_dy", res_dy)
    traj.add_monitor("pullback_dp", res_dp)
    return traj


def _as_state(q0) -> np.ndarray:
    if hasattr(q0, "as_tuple"):
        q0 = q0.as_tuple()
    out = np.asarray(q0, dtype=float)
    if out.shape != (3,):
        raise ValueError("initial point must have three coordinates (x, y, p)")
    return out


def _eval_along(fn, traj: Trajectory) -> np.ndarray:
    out = np.empty(len(traj))
    for k in range(len(traj)):
        qx, qy, qp = (float(v) for v in traj.states[k])
        try:
            out[k] = fn(qx, qy, qp)
        except _DOMAIN_ERRORS:
            out[k] = np.nan
    return out


def geodesic_residual(s: OdeSurface, v: FrameVector, traj: Trajectory) -> np.ndarray:
    """Per-sample Euclidean norm of the frame components of nabla_v v.

    The covariant self-acceleration is formed symbolically once, then
    evaluated along the samples; a zero series certifies the integral curves
    of v as geodesics up to floating point.
    """
    acc = covariant_derivative(s, v, v)
    fns = [compile_expr(c) for c in acc.components]
    out = np.empty(len(traj))
    for k in range(len(traj)):
        qx, qy, qp = (float(v_) for v_ in traj.states[k])
        try:
            out[k] = math.sqrt(sum(fn(qx, qy, qp) ** 2 for fn in fns))
        except _DOMAIN_ERRORS:
            out[k] = np.nan
    return out


@dataclass(frozen=True)
class ConservationReport:
    max_drift: float
    drift: np.ndarray

    def to_json(self) -> dict:
        return {
            "max_drift": format(self.max_drift, _DIGITS),
            "drift": [format(v, _DIGITS) for v in self.drift],
        }


def conservation_report(traj: Trajectory, H=None) -> ConservationReport:
    """Drift |H(q(t)) - H(q(0))| along the samples.

    Uses the trajectory's ``H`` monitor when present, else evaluates the
    given expression.
    """
    if "H" in traj.monitors:
        values = traj.monitors["H"]
    elif H is not None:
        values = _eval_along(compile_expr(as_expr(H)), traj)
    else:
        raise ValueError("no H monitor on the trajectory and no H given")
    drift = np.abs(values - values[0])
    return ConservationReport(max_drift=float(np.nanmax(drift)), drift=drift)
