"""Capture classification, threshold search, arrest and error diagnostics."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from .integrator import DEFAULT_DT, IntegrationConfig, Trajectory, integrate
from .model import DissipationDecomposition, ModelParams, main_system

log = logging.getLogger(__name__)

# Start slightly before the resonance at t = 0. From rest at exactly t = 0
# the capture threshold sits at the edge of its plateau (~12.17); anywhere
# in roughly [-0.55, -0.05] it is 12.00 +/- 0.07.
DEFAULT_T_START = -0.25
DEFAULT_T_END = 30.0
CAPTURE_RATIO = 0.5
AMP_FLOOR = 1e-8


def default_config(t_end: float = DEFAULT_T_END, dt: float = DEFAULT_DT,
                   t_start: float = DEFAULT_T_START,
                   record_stride: int = 100) -> IntegrationConfig:
    return IntegrationConfig(t_start=t_start, t_end=t_end, dt=dt,
                             record_stride=record_stride)


def simulate(p: ModelParams, cfg: IntegrationConfig | None = None, s0=None) -> Trajectory:
    """RK4 solution of the main-resonance equations (rest initial data by default)."""
    cfg = cfg or default_config()
    if s0 is None:
        s0 = np.zeros(2, dtype=complex)
    traj = integrate(main_system(p), s0, cfg)
    traj.meta.update(f=p.f, mu1=p.mu1, mu2=p.mu2)
    return traj


def find_peak(times, amps) -> tuple[float, float, bool]:
    """Global maximum of sampled ``amps`` with three-point parabolic refinement.

    Returns ``(t_peak, amp_peak, interior)``; ``interior`` is False when the
    maximum sits on the first or last sample (no refinement possible).
    """
    times = np.asarray(times)
    amps = np.asarray(amps)
    i = int(np.argmax(amps))
    if i == 0 or i == len(amps) - 1:
        return float(times[i]), float(amps[i]), False
    y0, y1, y2 = amps[i - 1], amps[i], amps[i + 1]
    curv = y0 - 2.0 * y1 + y2
    if curv >= 0:
        return float(times[i]), float(y1), True
    h_left = times[i] - times[i - 1]
    h_right = times[i + 1] - times[i]
    h = 0.5 * (h_left + h_right)
    shift = 0.5 * (y0 - y2) / curv
    return (float(times[i] + shift * h),
            float(y1 - 0.125 * (y0 - y2) ** 2 / curv), True)


@dataclass
class CaptureReport:
    captured: bool
    t_end: float
    final_amp: float
    growth_ratio: float
    arrest_time: float | None = None
    peak_amp: float | None = None


def classify_capture(traj: Trajectory, capture_ratio: float = CAPTURE_RATIO) -> CaptureReport:
    """Captured iff ``|A(T)| / (8T) >= capture_ratio``.

    Autoresonant solutions follow ``|A| ~ 8t`` while uncaptured ones stay at
    an amplitude of order ``sqrt(f)``. The decision only uses the final state.
    """
    if traj.terminated_early:
        raise ValueError(f"cannot classify a terminated trajectory: {traj.reason}")
    T = traj.final_time
    if T < 10.0:
        raise ValueError(f"run too short to classify (T={T} < 10)")
    amps = np.abs(traj.states[:, 0])
    final_amp = float(amps[-1])
    ratio = final_amp / (8.0 * T)
    t_peak, peak, interior = find_peak(traj.times, amps)
    return CaptureReport(
        captured=bool(ratio >= capture_ratio),
        t_end=T,
        final_amp=final_amp,
        growth_ratio=ratio,
        arrest_time=t_peak if interior else None,
        peak_amp=peak,
    )


@dataclass
class ThresholdResult:
    f_star: float
    f_lo: float
    f_hi: float
    t_end: float
    dt: float
    t_start: float
    history: list[tuple[float, float, bool]] = field(default_factory=list)

    def __float__(self):
        return self.f_star


def find_threshold(mu1: float, mu2: float, f_lo: float, f_hi: float, tol: float,
                   t_end: float = DEFAULT_T_END, dt: float = DEFAULT_DT,
                   t_start: float = DEFAULT_T_START,
                   capture_ratio: float = CAPTURE_RATIO) -> ThresholdResult:
    """Bisect on ``f`` with :func:`classify_capture` as the oracle.

    Capture is assumed monotone in ``f`` inside the bracket. The estimate
    drifts slightly with ``t_end`` (capture near threshold is slow), so the
    horizon is reported with the result.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not f_hi > f_lo:
        raise ValueError(f"degenerate bracket [{f_lo}, {f_hi}]")
    cfg = IntegrationConfig(t_start=t_start, t_end=t_end, dt=dt,
                            record_stride=10**9)
    history = []

    def captured(f):
        rep = classify_capture(simulate(ModelParams(f, mu1, mu2), cfg), capture_ratio)
        history.append((f, rep.growth_ratio, rep.captured))
        log.debug("f=%.6f ratio=%.4f captured=%s", f, rep.growth_ratio, rep.captured)
        return rep.captured

    if captured(f_lo):
        raise ValueError(f"lower bracket f={f_lo} is already captured")
    if not captured(f_hi):
        raise ValueError(f"upper bracket f={f_hi} is not captured")
    lo, hi = f_lo, f_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if captured(mid):
            hi = mid
        else:
            lo = mid
    return ThresholdResult(f_star=0.5 * (lo + hi), f_lo=lo, f_hi=hi, t_end=t_end,
                           dt=dt, t_start=t_start, history=history)


@dataclass
class ArrestReport:
    t_numeric: float
    t_predicted: float
    rel_dev: float
    peak_numeric: float
    peak_predicted: float
    peak_rel_dev: float


def arrest_prediction_check(p: ModelParams, d: DissipationDecomposition,
                            cfg: IntegrationConfig | None = None) -> ArrestReport:
    """Compare the numeric argmax of ``|A|`` with ``t* = theta*/mu`` and the
    peak ``|A|`` with the outer leading amplitude ``8 theta*/mu``."""
    theta_star = asy.outer_breakdown_theta(p, d)
    if not d.mu > 0:
        raise ValueError("arrest prediction needs mu > 0")
    t_pred = theta_star / d.mu
    peak_pred = 8.0 * theta_star / d.mu
    if cfg is None:
        cfg = default_config(t_end=1.5 * t_pred + 10.0, record_stride=10)
    traj = simulate(p, cfg)
    if traj.terminated_early:
        raise RuntimeError(traj.reason)
    t_num, peak_num, interior = find_peak(traj.times, np.abs(traj.states[:, 0]))
    if not interior:
        raise RuntimeError("no interior maximum of |A|: extend t_end")
    return ArrestReport(
        t_numeric=t_num,
        t_predicted=t_pred,
        rel_dev=abs(t_num - t_pred) / t_pred,
        peak_numeric=peak_num,
        peak_predicted=peak_pred,
        peak_rel_dev=abs(peak_num - peak_pred) / peak_pred,
    )


@dataclass
class ErrorCurve:
    """Pointwise relative differences ``|a_num - a_asym| / |a_num|`` (same for
    ``b``), with the underlying values in unscaled variables ``A = a/mu``."""

    thetas: np.ndarray
    rel_err_a: np.ndarray
    rel_err_b: np.ndarray
    times: np.ndarray
    A_num: np.ndarray
    B_num: np.ndarray
    A_asym: np.ndarray
    B_asym: np.ndarray

    def window_max(self, lo: float, hi: float) -> float:
        sel = (self.thetas >= lo) & (self.thetas <= hi)
        return float(np.max(self.rel_err_a[sel]))


def error_curve(p: ModelParams, d: DissipationDecomposition,
                theta_window: tuple[float, float],
                cfg: IntegrationConfig | None = None, init: str = "outer",
                approach=()) -> ErrorCurve:
    """Outer asymptotics versus RK4 on the recorded grid of ``theta_window``.

    ``init="outer"`` starts the numeric solution on the outer solution at the
    window's left edge, so the curve measures how well the asymptotics track
    one solution. ``init="rest"`` starts from rest at ``cfg.t_start``; such
    solutions keep a slow phase oscillation about the locked state acquired
    during capture, which shows up as an additional error.

    ``approach`` lists extra slow times beyond the window (up to ``theta*``)
    at which the comparison is made exactly, e.g. to follow the breakdown.
    """
    if d.mu <= 0:
        raise ValueError("error curve needs mu > 0")
    lo, hi = theta_window
    if not hi > lo >= 0:
        raise ValueError(f"bad theta window {theta_window}")
    mu = d.mu
    dt = cfg.dt if cfg else DEFAULT_DT
    stride = cfg.record_stride if cfg else 100
    system = main_system(p)
    if init == "outer":
        ev = asy.outer_eval(lo, p, d)
        t0, s0 = lo / mu, np.array([ev.a / mu, ev.b / mu])
    elif init == "rest":
        t0 = cfg.t_start if cfg else DEFAULT_T_START
        s0 = np.zeros(2, dtype=complex)
    else:
        raise ValueError(f"unknown init {init!r}")
    traj = integrate(system, s0, IntegrationConfig(t0, hi / mu, dt=dt, record_stride=stride))
    if traj.terminated_early:
        raise RuntimeError(traj.reason)
    times = list(traj.times)
    states = list(traj.states)

    t_prev, s_prev = traj.times[-1], traj.states[-1]
    for theta in sorted(approach):
        t_next = theta / mu
        if t_next <= t_prev:
            raise ValueError("approach points must lie beyond the window")
        step = min(dt, t_next - t_prev)
        piece = integrate(system, s_prev, IntegrationConfig(t_prev, t_next, dt=step,
                                                            record_stride=10**9))
        t_prev, s_prev = t_next, piece.states[-1]
        times.append(t_next)
        states.append(s_prev)

    times = np.array(times)
    states = np.array(states)
    thetas = mu * times
    keep = (thetas >= lo - 1e-12) & (np.abs(mu * states[:, 0]) > AMP_FLOOR)
    thetas, times, states = thetas[keep], times[keep], states[keep]
    A_asym = np.empty(len(thetas), dtype=complex)
    B_asym = np.empty(len(thetas), dtype=complex)
    for k, theta in enumerate(thetas):
        ev = asy.outer_eval(float(theta), p, d)
        A_asym[k] = ev.a / mu
        B_asym[k] = ev.b / mu
    A_num, B_num = states[:, 0], states[:, 1]
    return ErrorCurve(
        thetas=thetas,
        rel_err_a=np.abs(A_num - A_asym) / np.abs(A_num),
        rel_err_b=np.abs(B_num - B_asym) / np.abs(B_num),
        times=times, A_num=A_num, B_num=B_num, A_asym=A_asym, B_asym=B_asym,
    )


# --- sweeps ----------------------------------------------------------------

@dataclass
class SweepRow:
    index: int
    params: ModelParams
    result: CaptureReport | ArrestReport | None
    error: str | None = None


def _classify_task(p: ModelParams, t_end: float, dt: float, t_start: float):
    cfg = IntegrationConfig(t_start, t_end, dt=dt, record_stride=100)
    return classify_capture(simulate(p, cfg))


def _arrest_task(p: ModelParams, t_end: float, dt: float, t_start: float):
    if p.mu1 == 0 and p.mu2 == 0:
        raise ValueError("no dissipation: growth is never arrested (t* = inf)")
    d = DissipationDecomposition.from_params(p)
    theta_star = asy.outer_breakdown_theta(p, d)
    cfg = IntegrationConfig(t_start, 1.5 * theta_star / d.mu + 10.0, dt=dt,
                            record_stride=10)
    return arrest_prediction_check(p, d, cfg)


_TASKS = {"classify": _classify_task, "arrest": _arrest_task}


def _run_point(args):
    index, p, task, t_end, dt, t_start = args
    try:
        return SweepRow(index, p, _TASKS[task](p, t_end, dt, t_start))
    except (ValueError, RuntimeError) as exc:
        return SweepRow(index, p, None, f"{type(exc).__name__}: {exc}")


def sweep(grid, task: str = "classify", parallelism: int = 1,
          t_end: float = DEFAULT_T_END, dt: float = DEFAULT_DT,
          t_start: float = DEFAULT_T_START) -> list[SweepRow]:
    """Run ``task`` (``"classify"`` or ``"arrest"``) at every grid point.

    Rows come back in grid order whatever the execution order; failures at a
    point are stored in that row's ``error`` instead of aborting the sweep.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty parameter grid")
    if task not in _TASKS:
        raise ValueError(f"unknown task {task!r}; choose from {sorted(_TASKS)}")
    jobs = [(i, p, task, t_end, dt, t_start) for i, p in enumerate(grid)]
    if parallelism <= 1 or len(jobs) == 1:
        rows = [_run_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_run_point, jobs))
    return sorted(rows, key=lambda r: r.index)
