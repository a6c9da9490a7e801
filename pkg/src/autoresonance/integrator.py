"""Fixed-step classical RK4 with trajectory recording and blow-up detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .model import OdeSystem

DEFAULT_DT = 1e-4

# status codes shared with the jitted loop
_OK, _BLOWUP, _NONFINITE = 0, 1, 2


@dataclass(frozen=True)
class IntegrationConfig:
    t_start: float
    t_end: float
    dt: float = DEFAULT_DT
    record_stride: int = 100
    blowup_threshold: float = 1e6

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.dt > self.t_end - self.t_start:
            raise ValueError("dt larger than the integration interval")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValueError("record_stride must be a positive integer")
        if not self.blowup_threshold > 0:
            raise ValueError("blowup_threshold must be positive")

    def step_plan(self) -> tuple[int, float]:
        """Number of full steps and length of the trailing partial step."""
        span = self.t_end - self.t_start
        n = int(math.floor(span / self.dt))
        # absorb round-off so that e.g. 30/1e-4 is treated as integral
        if span - (n + 1) * self.dt > -1e-9 * self.dt:
            n += 1
        h_last = self.t_end - (self.t_start + n * self.dt)
        if abs(h_last) <= 1e-9 * self.dt:
            h_last = 0.0
        return n, h_last


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), dim)
    terminated_early: bool = False
    reason: str | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def component(self, i: int) -> np.ndarray:
        return self.states[:, i]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@njit(cache=True)
def _rk4_loop(kernel, params, t0, t_end, y0, dt, n_full, h_last, stride, blowup):
    n_total = n_full + (1 if h_last > 0.0 else 0)
    n_rec = n_full // stride + 3
    dim = y0.shape[0]
    times = np.empty(n_rec)
    states = np.empty((n_rec, dim), dtype=y0.dtype)
    times[0] = t0
    states[0, :] = y0
    r = 1
    y = y0.copy()
    status = 0
    t_fail = t0
    for k in range(n_total):
        t = t0 + k * dt
        h = dt if k < n_full else h_last
        k1 = kernel(t, y, params)
        k2 = kernel(t + 0.5 * h, y + (0.5 * h) * k1, params)
        k3 = kernel(t + 0.5 * h, y + (0.5 * h) * k2, params)
        k4 = kernel(t + h, y + h * k3, params)
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t0 + (k + 1) * dt if k < n_full else t_end
        norm = 0.0
        for j in range(dim):
            norm += abs(y_new[j]) ** 2
        norm = math.sqrt(norm)
        if not math.isfinite(norm):
            status = 2
            t_fail = t_new
            break
        y = y_new
        if norm > blowup:
            status = 1
            t_fail = t_new
            times[r] = t_new
            states[r, :] = y
            r += 1
            break
        if (k + 1) % stride == 0 or k == n_total - 1:
            times[r] = t_new
            states[r, :] = y
            r += 1
    return times[:r].copy(), states[:r].copy(), status, t_fail


def _rk4_python(rhs, t0, t_end, y0, dt, n_full, h_last, stride, blowup):
    n_total = n_full + (1 if h_last > 0.0 else 0)
    times = [t0]
    states = [y0.copy()]
    y = y0.copy()
    for k in range(n_total):
        t = t0 + k * dt
        h = dt if k < n_full else h_last
        k1 = np.asarray(rhs(t, y))
        k2 = np.asarray(rhs(t + 0.5 * h, y + (0.5 * h) * k1))
        k3 = np.asarray(rhs(t + 0.5 * h, y + (0.5 * h) * k2))
        k4 = np.asarray(rhs(t + h, y + h * k3))
        y_new = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t0 + (k + 1) * dt if k < n_full else t_end
        norm = float(np.linalg.norm(y_new))
        if not math.isfinite(norm):
            return np.array(times), np.array(states), _NONFINITE, t_new
        y = y_new
        if norm > blowup:
            times.append(t_new)
            states.append(y.copy())
            return np.array(times), np.array(states), _BLOWUP, t_new
        if (k + 1) % stride == 0 or k == n_total - 1:
            times.append(t_new)
            states.append(y.copy())
    return np.array(times), np.array(states), _OK, t0


def integrate(rhs, s0, cfg: IntegrationConfig) -> Trajectory:
    """Integrate ``rhs`` from ``s0`` over ``[cfg.t_start, cfg.t_end]``.

    ``rhs`` is either an :class:`~autoresonance.model.OdeSystem` (runs in a
    compiled loop) or any callable ``rhs(t, y) -> array``. The state is
    recorded every ``record_stride`` steps and always at ``t_end``; the last
    step is shortened when the interval is not a whole number of steps.

    On a non-finite state or a state norm above ``blowup_threshold`` the
    integration stops and the trajectory is flagged ``terminated_early``.
    """
    n_full, h_last = cfg.step_plan()
    stride = int(cfg.record_stride)
    if isinstance(rhs, OdeSystem):
        y0 = np.array(s0, dtype=rhs.dtype).ravel()
        times, states, status, t_fail = _rk4_loop(
            rhs.kernel, rhs.params, float(cfg.t_start), float(cfg.t_end), y0,
            float(cfg.dt), n_full, h_last, stride, float(cfg.blowup_threshold))
    else:
        y0 = np.array(s0).ravel()
        if not np.iscomplexobj(y0):
            y0 = y0.astype(np.float64)
        times, states, status, t_fail = _rk4_python(
            rhs, float(cfg.t_start), float(cfg.t_end), y0, float(cfg.dt),
            n_full, h_last, stride, float(cfg.blowup_threshold))

    reason = None
    if status == _BLOWUP:
        reason = f"state norm exceeded {cfg.blowup_threshold:g} at t={t_fail:.10g}"
    elif status == _NONFINITE:
        reason = f"non-finite state at t={t_fail:.10g}"
    return Trajectory(times=times, states=states,
                      terminated_early=status != _OK, reason=reason)


def _terminal_state(rhs, s0, cfg: IntegrationConfig, dt: float) -> np.ndarray:
    sub = IntegrationConfig(cfg.t_start, cfg.t_end, dt=dt,
                            record_stride=10**12,
                            blowup_threshold=cfg.blowup_threshold)
    traj = integrate(rhs, s0, sub)
    if traj.terminated_early:
        raise RuntimeError(f"convergence run failed: {traj.reason}")
    return traj.final_state


def convergence_order(rhs, s0, cfg: IntegrationConfig, refinements: int = 3) -> float:
    """Empirical order from self-convergence over successive step halvings.

    Solutions at ``dt, dt/2, ..., dt/2**refinements`` give successive
    differences ``d_k``; the order estimate is ``log2(d_k / d_{k+1})`` for the
    finest pair.
    """
    if refinements < 2:
        raise ValueError("need at least two refinements")
    finals = [_terminal_state(rhs, s0, cfg, cfg.dt / 2**k)
              for k in range(refinements + 1)]
    diffs = [float(np.linalg.norm(finals[k] - finals[k + 1]))
             for k in range(refinements)]
    scale = max(float(np.linalg.norm(finals[-1])), 1.0)
    if diffs[-1] < 1e-13 * scale:
        raise ValueError("differences at round-off level; order estimate unreliable")
    return math.log2(diffs[-2] / diffs[-1])


def error_ratios(rhs, s0, cfg: IntegrationConfig, halvings: int = 3) -> list[float]:
    """Terminal-error reduction factors per halving against a ``dt/16``
    reference solution (``dt, dt/2, ...`` each compared to the reference)."""
    ref = _terminal_state(rhs, s0, cfg, cfg.dt / 16)
    errs = [float(np.linalg.norm(_terminal_state(rhs, s0, cfg, cfg.dt / 2**k) - ref))
            for k in range(halvings)]
    return [errs[k] / errs[k + 1] for k in range(halvings - 1)]
