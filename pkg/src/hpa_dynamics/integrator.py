"""Time integration of the hormone ODE system.

Two modes: classical fixed-step RK4, and an adaptive embedded Cash-Karp 4(5)
pair with PI step-size control. Both support a burn-in interval that is
integrated and discarded so reported trajectories start on the attractor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IntegrationError, SamplingError
from .model import HormoneState, ParameterSet, _rhs, steady_state_open_loop, daylight

# Cash-Karp tableau; the 5th-order solution is propagated, the 4th-order
# embedded solution provides the local error estimate.
_C2, _C3, _C4, _C5, _C6 = 0.2, 0.3, 0.6, 1.0, 0.875
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 0.3, -0.9, 1.2
_A51, _A52, _A53, _A54 = -11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0
_A61, _A62, _A63, _A64, _A65 = (1631.0 / 55296.0, 175.0 / 512.0,
                                575.0 / 13824.0, 44275.0 / 110592.0,
                                253.0 / 4096.0)
_B1, _B3, _B4, _B6 = 37.0 / 378.0, 250.0 / 621.0, 125.0 / 594.0, 512.0 / 1771.0
_E1 = _B1 - 2825.0 / 27648.0
_E3 = _B3 - 18575.0 / 48384.0
_E4 = _B4 - 13525.0 / 55296.0
_E5 = -277.0 / 14336.0
_E6 = _B6 - 0.25

_SAFETY = 0.9
_MIN_STEP = 1e-6
_MAX_STEP = 60.0
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
# PI controller exponents for an order-5 propagating pair
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


@dataclass(frozen=True)
class IntegrationConfig:
    """How to run one integration: horizon, mode, tolerances, burn-in."""

    t0: float = 0.0
    t_end: float = 1440.0
    dt: float = 0.5
    mode: str = "adaptive"          # "fixed" | "adaptive"
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    burn_in: float = 14400.0        # minutes integrated and discarded
    initial_state: HormoneState | None = None
    output_dt: float = 1.0          # adaptive-mode recording grid
    daylight_const: float | None = None  # freeze forcing (testing/analysis)

    def __post_init__(self):
        if not self.t_end >= self.t0:
            raise IntegrationError(f"t_end ({self.t_end}) < t0 ({self.t0})")
        if not self.dt > 0:
            raise IntegrationError(f"dt must be > 0, got {self.dt}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise IntegrationError("tolerances must be > 0")
        if not self.burn_in >= 0:
            raise IntegrationError(f"burn_in must be >= 0, got {self.burn_in}")
        if not self.output_dt > 0:
            raise IntegrationError(f"output_dt must be > 0, got {self.output_dt}")
        if self.mode not in ("fixed", "adaptive"):
            raise IntegrationError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: time grid, (n, 3) state array and the parameters used."""

    times: np.ndarray
    states: np.ndarray
    params: ParameterSet

    @property
    def crh(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def acth(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def cortisol(self) -> np.ndarray:
        return self.states[:, 2]

    def final_state(self) -> HormoneState:
        return HormoneState(*self.states[-1])


def _check_finite(t, R, A, C):
    if not (math.isfinite(R) and math.isfinite(A) and math.isfinite(C)):
        raise IntegrationError(f"non-finite state at t={t}", t=t)


def step_rk4(t: float, s: HormoneState, dt: float, p: ParameterSet,
             d_const: float | None = None) -> HormoneState:
    """One classical 4th-order Runge-Kutta step of size dt."""
    if not dt > 0:
        raise IntegrationError(f"dt must be > 0, got {dt}")
    y = _rk4_step(t, s.as_tuple(), dt, p, d_const)
    _check_finite(t + dt, *y)
    return HormoneState(*y)


def _rk4_step(t, y, dt, p, d_const):
    R, A, C = y
    k1 = _rhs(t, R, A, C, p, d_const)
    half = 0.5 * dt
    k2 = _rhs(t + half, R + half * k1[0], A + half * k1[1], C + half * k1[2],
              p, d_const)
    k3 = _rhs(t + half, R + half * k2[0], A + half * k2[1], C + half * k2[2],
              p, d_const)
    k4 = _rhs(t + dt, R + dt * k3[0], A + dt * k3[1], C + dt * k3[2],
              p, d_const)
    sixth = dt / 6.0
    return (R + sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
            A + sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
            C + sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]))


def _integrate_fixed(t_start, t_stop, dt, y, p, d_const, record):
    """March RK4 from t_start to t_stop; optionally record every step."""
    times, states = [], []
    if record:
        times.append(t_start)
        states.append(y)
    t = t_start
    # steps counted by index to avoid drift in t
    n_full = int(math.floor((t_stop - t_start) / dt + 1e-9))
    for i in range(n_full):
        t = t_start + i * dt
        y = _rk4_step(t, y, dt, p, d_const)
        _check_finite(t + dt, *y)
        if record:
            times.append(t_start + (i + 1) * dt)
            states.append(y)
    t = t_start + n_full * dt
    if t < t_stop - 1e-9:
        y = _rk4_step(t, y, t_stop - t, p, d_const)
        _check_finite(t_stop, *y)
        if record:
            times.append(t_stop)
            states.append(y)
    return times, states, y


def _ck_step(t, y, h, p, d_const):
    """One Cash-Karp stage evaluation: returns (y5, error_estimate)."""
    R, A, C = y
    k1 = _rhs(t, R, A, C, p, d_const)
    k2 = _rhs(t + _C2 * h,
              R + h * _A21 * k1[0],
              A + h * _A21 * k1[1],
              C + h * _A21 * k1[2], p, d_const)
    k3 = _rhs(t + _C3 * h,
              R + h * (_A31 * k1[0] + _A32 * k2[0]),
              A + h * (_A31 * k1[1] + _A32 * k2[1]),
              C + h * (_A31 * k1[2] + _A32 * k2[2]), p, d_const)
    k4 = _rhs(t + _C4 * h,
              R + h * (_A41 * k1[0] + _A42 * k2[0] + _A43 * k3[0]),
              A + h * (_A41 * k1[1] + _A42 * k2[1] + _A43 * k3[1]),
              C + h * (_A41 * k1[2] + _A42 * k2[2] + _A43 * k3[2]), p, d_const)
    k5 = _rhs(t + _C5 * h,
              R + h * (_A51 * k1[0] + _A52 * k2[0] + _A53 * k3[0] + _A54 * k4[0]),
              A + h * (_A51 * k1[1] + _A52 * k2[1] + _A53 * k3[1] + _A54 * k4[1]),
              C + h * (_A51 * k1[2] + _A52 * k2[2] + _A53 * k3[2] + _A54 * k4[2]),
              p, d_const)
    k6 = _rhs(t + _C6 * h,
              R + h * (_A61 * k1[0] + _A62 * k2[0] + _A63 * k3[0]
                       + _A64 * k4[0] + _A65 * k5[0]),
              A + h * (_A61 * k1[1] + _A62 * k2[1] + _A63 * k3[1]
                       + _A64 * k4[1] + _A65 * k5[1]),
              C + h * (_A61 * k1[2] + _A62 * k2[2] + _A63 * k3[2]
                       + _A64 * k4[2] + _A65 * k5[2]), p, d_const)
    y5 = tuple(y[i] + h * (_B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B6 * k6[i])
               for i in range(3))
    err = tuple(h * (_E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i]
                     + _E5 * k5[i] + _E6 * k6[i])
                for i in range(3))
    return y5, err


def _integrate_adaptive(t_start, t_stop, y, p, abs_tol, rel_tol, d_const,
                        output_times=None):
    """Adaptive Cash-Karp march; lands exactly on each requested output time."""
    times, states = [], []
    out_idx = 0
    if output_times is not None:
        while out_idx < len(output_times) and output_times[out_idx] <= t_start + 1e-12:
            times.append(output_times[out_idx])
            states.append(y)
            out_idx += 1
    if t_stop <= t_start:
        return times, states, y
    t = t_start
    h = min(_MAX_STEP, max(_MIN_STEP, (t_stop - t_start) / 100.0))
    err_prev = 1e-4
    while t < t_stop - 1e-12:
        h = min(h, t_stop - t)
        if output_times is not None and out_idx < len(output_times):
            h = min(h, output_times[out_idx] - t)
        h = max(h, _MIN_STEP)
        y_new, err = _ck_step(t, y, h, p, d_const)
        _check_finite(t + h, *y_new)
        scale = 0.0
        for i in range(3):
            tol = abs_tol + rel_tol * max(abs(y[i]), abs(y_new[i]))
            # clamp the ratio so extreme tolerances cannot overflow the square
            scale += min(abs(err[i] / tol), 1e150) ** 2
        err_norm = math.sqrt(scale / 3.0)
        if err_norm <= 1.0:
            t = t + h
            y = y_new
            if (output_times is not None and out_idx < len(output_times)
                    and abs(t - output_times[out_idx]) <= 1e-9):
                times.append(output_times[out_idx])
                states.append(y)
                out_idx += 1
            e = max(err_norm, 1e-10)
            factor = _SAFETY * e ** (-_PI_ALPHA) * err_prev ** _PI_BETA
            err_prev = e
        else:
            factor = max(_MIN_FACTOR, _SAFETY * err_norm ** (-_PI_ALPHA))
        factor = min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        h = min(_MAX_STEP, h * factor)
        if h < _MIN_STEP:
            raise IntegrationError(f"step size underflow at t={t}", t=t)
    return times, states, y


def default_initial_state(p: ParameterSet, t: float = 0.0) -> HormoneState:
    """Feedback-free open-loop steady state at the daylight level of time t."""
    return steady_state_open_loop(p.feedback_free(), daylight(t))


def _output_grid(t0, t_end, output_dt):
    n = int(math.floor((t_end - t0) / output_dt + 1e-9))
    grid = [t0 + i * output_dt for i in range(n + 1)]
    if grid[-1] < t_end - 1e-9:
        grid.append(t_end)
    return grid


def integrate(config: IntegrationConfig, p: ParameterSet,
              output_times=None) -> Trajectory:
    """Integrate from t0 - burn_in to t_end and return the post-burn-in part.

    Fixed mode records every RK4 step; adaptive mode records on
    ``output_times`` (default: every ``output_dt`` minutes, end inclusive).
    """
    s0 = config.initial_state or default_initial_state(p, config.t0 - config.burn_in)
    y = s0.as_tuple()
    d_const = config.daylight_const
    t_burn_start = config.t0 - config.burn_in

    if config.mode == "fixed":
        if config.burn_in > 0:
            _, _, y = _integrate_fixed(t_burn_start, config.t0, config.dt,
                                       y, p, d_const, record=False)
        times, states, y = _integrate_fixed(config.t0, config.t_end, config.dt,
                                            y, p, d_const, record=True)
    else:
        if config.burn_in > 0:
            _, _, y = _integrate_adaptive(t_burn_start, config.t0, y, p,
                                          config.abs_tol, config.rel_tol, d_const)
        if output_times is None:
            output_times = _output_grid(config.t0, config.t_end, config.output_dt)
        else:
            output_times = sorted(float(t) for t in output_times)
            if output_times and (output_times[0] < config.t0 - 1e-9
                                 or output_times[-1] > config.t_end + 1e-9):
                raise IntegrationError("output times outside [t0, t_end]")
        times, states, y = _integrate_adaptive(config.t0, config.t_end, y, p,
                                               config.abs_tol, config.rel_tol,
                                               d_const, output_times)
    if not times:
        times, states = [config.t0], [y]
    return Trajectory(np.asarray(times, dtype=float),
                      np.asarray(states, dtype=float), p)


def sample(traj: Trajectory, query_times) -> np.ndarray:
    """Piecewise-linear interpolation of the trajectory, shape (n, 3)."""
    q = np.atleast_1d(np.asarray(query_times, dtype=float))
    lo, hi = traj.times[0], traj.times[-1]
    if np.any(q < lo - 1e-9) or np.any(q > hi + 1e-9):
        raise SamplingError(
            f"query times outside trajectory range [{lo}, {hi}]")
    q = np.clip(q, lo, hi)
    out = np.empty((len(q), 3))
    for j in range(3):
        out[:, j] = np.interp(q, traj.times, traj.states[:, j])
    return out
