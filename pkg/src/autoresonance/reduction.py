"""Reduction from the fast oscillator system to the envelope equations.

The chain is: fast time ``fast_theta`` -> slow time ``tau = eps*fast_theta``
-> envelope time ``t = tau/chi``, with

    x = calA e^{i omega fast_theta} + c.c.,   calA = a e^{i alpha tau^2},   a = lam A
    y = calB e^{2i omega fast_theta} + c.c.,  calB = b e^{2i alpha tau^2}, b = kappa B

Note ``omega fast_theta + alpha tau^2`` is exactly the drive phase ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .integrator import IntegrationConfig, Trajectory, integrate
from .model import EnvelopeState, FastState, ModelParams, PhysicalParams, fast_system, main_system


@dataclass(frozen=True)
class ScalingConstants:
    kappa: float
    lam: float
    chi: float


def reduce_params(p: PhysicalParams) -> tuple[ModelParams, ScalingConstants]:
    """Map physical constants to ``(f, mu1, mu2)`` and the scalings.

    ``lam`` carries a factor ``omega``; without it the ``A^2`` coefficient of
    the reduced ``B`` equation would be ``1/(4 omega^2)`` instead of ``1/4``.
    """
    if not p.alpha > 0:
        raise ValueError("alpha must be positive")
    if not p.alpha1 * p.alpha2 > 0:
        raise ValueError("alpha1*alpha2 must be positive")
    sqrt_alpha = math.sqrt(p.alpha)
    mp = ModelParams(
        f=p.gamma * math.sqrt(p.alpha1 * p.alpha2) / (2.0 * p.alpha * p.omega**2),
        mu1=p.nu1 / (2.0 * sqrt_alpha),
        mu2=p.nu2 / (2.0 * sqrt_alpha),
    )
    sc = ScalingConstants(
        kappa=p.omega * sqrt_alpha / p.alpha1,
        lam=p.omega * math.sqrt(p.alpha / (p.alpha1 * p.alpha2)),
        chi=1.0 / sqrt_alpha,
    )
    return mp, sc


def drive_phase(fast_theta, p: PhysicalParams):
    """``phi = (omega + eps alpha tau) fast_theta`` with ``tau = eps fast_theta``."""
    tau = p.eps * np.asarray(fast_theta, dtype=float)
    return (p.omega + p.eps * p.alpha * tau) * np.asarray(fast_theta, dtype=float)


def fast_time(t, p: PhysicalParams):
    """Fast time corresponding to envelope time ``t``."""
    _, sc = reduce_params(p)
    return sc.chi * np.asarray(t, dtype=float) / p.eps


def envelope_to_fast(t: float, s, p: PhysicalParams) -> FastState:
    """Leading-order fast state ``(x, x', y, y')`` at envelope time ``t``."""
    _, sc = reduce_params(p)
    A, B = s
    theta = sc.chi * t / p.eps
    phi = float(drive_phase(theta, p))
    za = sc.lam * A * np.exp(1j * phi)
    zb = sc.kappa * B * np.exp(2j * phi)
    return FastState(
        x=float(2.0 * za.real),
        xdot=float(2.0 * (1j * p.omega * za).real),
        y=float(2.0 * zb.real),
        ydot=float(2.0 * (2j * p.omega * zb).real),
    )


def demodulate_fast(traj: Trajectory, p: PhysicalParams, window: float | None = None,
                    hop: int | None = None) -> Trajectory:
    """Recover envelope amplitudes ``(A, B)`` from a fast-system trajectory.

    ``x`` and ``y`` are projected onto ``e^{-i phi}`` and ``e^{-2i phi}``
    under a Hann window (default eight carrier periods), which averages out
    the conjugate carriers and removes the chirp in one step. Outputs are
    placed at window centres every ``hop`` samples and converted to the
    envelope time ``t`` and amplitudes ``A = a/lam``, ``B = b/kappa``.
    """
    times = np.asarray(traj.times, dtype=float)
    if len(times) < 3:
        raise ValueError("trajectory too short to demodulate")
    steps = np.diff(times)
    h = steps[0]
    # a shortened final step breaks uniform sampling; drop that sample
    if abs(steps[-1] - h) > 1e-6 * h:
        times = times[:-1]
        states = traj.states[:-1]
        steps = steps[:-1]
    else:
        states = traj.states
    if np.max(np.abs(steps - h)) > 1e-6 * h:
        raise ValueError("demodulation needs uniformly sampled input")

    period = 2.0 * math.pi / p.omega
    if window is None:
        window = 8.0 * period
    if window < 2.0 * period:
        raise ValueError("window must cover at least two carrier periods")
    # the second carrier has period/2
    if (period / 2.0) / h < 16.0:
        raise ValueError("sampling too coarse: fewer than 16 samples per carrier period")
    n_w = int(round(window / h))
    if n_w % 2 == 0:
        n_w += 1
    if n_w > len(times):
        raise ValueError("trajectory shorter than the demodulation window")
    if hop is None:
        hop = max(1, n_w // 4)

    w = np.hanning(n_w + 2)[1:-1]
    w /= w.sum()
    phi = drive_phase(times, p)
    za = states[:, 0] * np.exp(-1j * phi)
    zb = states[:, 2] * np.exp(-2j * phi)
    a = sliding_window_view(za, n_w)[::hop] @ w
    b = sliding_window_view(zb, n_w)[::hop] @ w
    centres = times[n_w // 2::hop][:len(a)]

    _, sc = reduce_params(p)
    t = p.eps * centres / sc.chi
    env = np.column_stack([a / sc.lam, b / sc.kappa])
    return Trajectory(times=t, states=env, meta={"fast_theta": centres})


def synthesize_fast(t_env, A, B, p: PhysicalParams) -> Trajectory:
    """Fast-state samples built from envelope values at envelope times."""
    t_env = np.asarray(t_env, dtype=float)
    A = np.broadcast_to(np.asarray(A, dtype=complex), t_env.shape)
    B = np.broadcast_to(np.asarray(B, dtype=complex), t_env.shape)
    states = np.array([envelope_to_fast(t, (a, b), p) for t, a, b in zip(t_env, A, B)])
    return Trajectory(times=np.asarray(fast_time(t_env, p)), states=states)


@dataclass
class ReductionReport:
    eps: float
    times: np.ndarray
    A_fast: np.ndarray
    B_fast: np.ndarray
    A_ref: np.ndarray
    B_ref: np.ndarray

    @property
    def rel_err_A(self) -> float:
        return float(np.max(np.abs(self.A_fast - self.A_ref)) / np.max(np.abs(self.A_ref)))

    @property
    def rel_err_B(self) -> float:
        return float(np.max(np.abs(self.B_fast - self.B_ref)) / np.max(np.abs(self.B_ref)))


def validate_reduction(p: PhysicalParams, tau_end: float = 1.0,
                       steps_per_period: int = 512, samples_per_period: int = 64,
                       envelope_dt: float = 1e-4) -> ReductionReport:
    """Integrate the fast system from rest and compare its demodulated
    envelopes against the main-resonance equations started from rest."""
    if steps_per_period % samples_per_period:
        raise ValueError("steps_per_period must be a multiple of samples_per_period")
    mp, sc = reduce_params(p)
    period = 2.0 * math.pi / p.omega
    dt_fast = period / steps_per_period
    theta_end = tau_end / p.eps
    n = int(math.ceil(theta_end / dt_fast))
    fast_cfg = IntegrationConfig(0.0, n * dt_fast, dt=dt_fast,
                                 record_stride=steps_per_period // samples_per_period)
    fast = integrate(fast_system(p), np.zeros(4), fast_cfg)
    if fast.terminated_early:
        raise RuntimeError(f"fast integration failed: {fast.reason}")
    env = demodulate_fast(fast, p)

    t_end = float(env.times[-1])
    ref_cfg = IntegrationConfig(0.0, t_end, dt=envelope_dt, record_stride=1)
    ref = integrate(main_system(mp), np.zeros(2, dtype=complex), ref_cfg)
    if ref.terminated_early:
        raise RuntimeError(f"envelope integration failed: {ref.reason}")

    def interp(k):
        z = ref.states[:, k]
        return (np.interp(env.times, ref.times, z.real)
                + 1j * np.interp(env.times, ref.times, z.imag))

    return ReductionReport(eps=p.eps, times=env.times, A_fast=env.states[:, 0],
                           B_fast=env.states[:, 1], A_ref=interp(0), B_ref=interp(1))


__all__ = [
    "EnvelopeState", "ScalingConstants", "reduce_params", "envelope_to_fast",
    "demodulate_fast", "synthesize_fast", "validate_reduction", "ReductionReport",
    "drive_phase", "fast_time",
]
