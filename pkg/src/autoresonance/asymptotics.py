"""Closed-form outer and inner asymptotics of the dissipative autoresonance.

Outer (growth stage), in the slow variable ``theta = mu t``::

    a ~ (8 theta + mu^2 alpha2(theta)) e^{i Psi0(theta)}
    b ~ (-4 theta + mu^2 beta2(theta)) e^{2i Psi0(theta)}

with ``sin Psi0 = -4(3 + D theta)/f`` and ``D = 2 delta1 + delta2``. The
representation degenerates where the gauge ``S = sqrt(f^2 - 16(3 + D theta)^2)``
vanishes, at ``theta* = (f/4 - 3)/D``. Near that point the inner variable
``sigma = S/mu`` takes over with constant leading amplitudes.

The phase corrections of order ``mu^2`` are not available in closed form and
are taken as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _quad

from .model import DissipationDecomposition, ModelParams

OUTER_VALIDITY_FACTOR = 10.0
INNER_VALIDITY_FACTOR = 0.3


@dataclass(frozen=True)
class OuterEval:
    theta: float
    amp_a: float
    amp_b: float
    psi0: float
    psi0_prime: float
    alpha2_corr: float
    beta2_corr: float
    S: float
    valid: bool

    @property
    def sin_psi0(self) -> float:
        return math.sin(self.psi0)

    @property
    def a(self) -> complex:
        return self.amp_a * complex(math.cos(self.psi0), math.sin(self.psi0))

    @property
    def b(self) -> complex:
        return self.amp_b * complex(math.cos(2 * self.psi0), math.sin(2 * self.psi0))


@dataclass(frozen=True)
class InnerEval:
    sigma: float
    a0: float
    b0: float
    psi0_inner: float
    psi00: float
    valid: bool
    # first corrections; b1 is a free constant (a1 = 2 b1)
    a1: float = 0.0
    b1: float = 0.0
    psi1: float = 0.0
    mu: float = 0.0

    @property
    def a(self) -> complex:
        return self.a0 * np.exp(1j * self.psi0_inner)

    @property
    def b(self) -> complex:
        return self.b0 * np.exp(2j * self.psi0_inner)

    @property
    def a_corrected(self) -> complex:
        phase = self.psi0_inner + self.mu * self.psi1
        return (self.a0 + self.mu * self.a1) * np.exp(1j * phase)

    @property
    def b_corrected(self) -> complex:
        phase = self.psi0_inner + self.mu * self.psi1
        return (self.b0 + self.mu * self.b1) * np.exp(2j * phase)


def _prepare(p: ModelParams, d: DissipationDecomposition) -> float:
    d.check_consistent(p)
    return d.rate


def gauge(theta, p: ModelParams, d: DissipationDecomposition):
    """Squared validity gauge ``S^2 = f^2 - 16(3 + D theta)^2`` (vectorised)."""
    g = 3.0 + d.rate * np.asarray(theta, dtype=float)
    return p.f**2 - 16.0 * g**2


def outer_eval(theta: float, p: ModelParams, d: DissipationDecomposition,
               validity_factor: float = OUTER_VALIDITY_FACTOR) -> OuterEval:
    """Outer amplitudes, phase and second corrections at slow time ``theta``.

    Raises ``ValueError`` outside the outer domain (``S^2 <= 0``). The phase
    is the principal arcsine, which keeps ``cos Psi0 > 0`` and makes ``Psi0``
    decrease towards ``-pi/2`` as ``theta -> theta*``.
    """
    D = _prepare(p, d)
    if theta < 0:
        raise ValueError(f"theta must be non-negative, got {theta}")
    g = 3.0 + D * theta
    S2 = p.f**2 - 16.0 * g**2
    if not S2 > 0:
        raise ValueError(f"theta={theta} outside the outer domain (S^2={S2:g} <= 0)")
    S = math.sqrt(S2)
    psi0 = math.asin(-4.0 * g / p.f)
    alpha2 = (S2 - 48.0 * D) / (4.0 * S)
    beta2 = (-S2 + 32.0 * D) / (4.0 * S)
    mu2 = d.mu**2
    return OuterEval(
        theta=theta,
        amp_a=8.0 * theta + mu2 * alpha2,
        amp_b=-4.0 * theta + mu2 * beta2,
        psi0=psi0,
        psi0_prime=-4.0 * D / S,
        alpha2_corr=alpha2,
        beta2_corr=beta2,
        S=S,
        valid=bool(d.mu == 0 or S / d.mu >= validity_factor),
    )


def outer_breakdown_theta(p: ModelParams, d: DissipationDecomposition) -> float:
    """Slow time ``theta* = (f/4 - 3)/(2 delta1 + delta2)`` where ``S`` vanishes."""
    D = _prepare(p, d)
    if p.f < 12.0:
        raise ValueError(f"no outer growth stage for f={p.f} < 12")
    if not D > 0:
        raise ValueError("2*delta1 + delta2 must be positive")
    return (p.f / 4.0 - 3.0) / D


def outer_trajectory(p: ModelParams, d: DissipationDecomposition, theta_grid
                     ) -> list[tuple[float, complex, complex]]:
    """Outer solution ``(theta, a, b)`` on a grid; ``A = a/mu`` for comparison
    with the unscaled equations."""
    out = []
    for theta in theta_grid:
        ev = outer_eval(float(theta), p, d)
        out.append((float(theta), ev.a, ev.b))
    return out


def phase_psi0_integral(theta: float, p: ModelParams, d: DissipationDecomposition) -> float:
    """``Psi0(theta) = Psi0(0) + integral of Psi0'`` in closed form."""
    D = _prepare(p, d)
    g0, g = 3.0, 3.0 + D * theta
    if not p.f**2 - 16.0 * g**2 > 0 or theta < 0:
        raise ValueError(f"[0, {theta}] leaves the outer domain")
    # the antiderivative of -4D/sqrt(f^2 - 16 g^2) in theta is -asin(4g/f)
    return math.asin(-4.0 * g0 / p.f) - (math.asin(4.0 * g / p.f) - math.asin(4.0 * g0 / p.f))


def phase_psi0_quadrature(theta: float, p: ModelParams, d: DissipationDecomposition) -> float:
    """Same phase by adaptive quadrature of ``Psi0'`` (independent route)."""
    D = _prepare(p, d)
    if not p.f**2 - 16.0 * (3.0 + D * theta) ** 2 > 0:
        raise ValueError(f"[0, {theta}] leaves the outer domain")

    def dpsi(s):
        return -4.0 * D / math.sqrt(p.f**2 - 16.0 * (3.0 + D * s) ** 2)

    val, _ = _quad.quad(dpsi, 0.0, theta, epsabs=1e-13, epsrel=1e-13, limit=200)
    return math.asin(-12.0 / p.f) + val


def inner_constants(p: ModelParams, d: DissipationDecomposition) -> tuple[float, float]:
    """Matching constants ``(b0, psi00) = ((f - 12)/D, -pi/2)``."""
    D = _prepare(p, d)
    if not p.f > 12.0:
        raise ValueError(f"inner solution undefined for f={p.f} <= 12")
    if not D > 0:
        raise ValueError("2*delta1 + delta2 must be positive")
    return (p.f - 12.0) / D, -math.pi / 2


def inner_phase_coefficient(p: ModelParams, d: DissipationDecomposition) -> float:
    """Coefficient ``c`` in ``psi0(sigma) = psi00 + c sigma^2``."""
    b0, _ = inner_constants(p, d)
    D = d.rate
    return (p.f - 12.0 + b0 * D) / (32.0 * p.f * D**2)


def sigma_of_theta(theta, p: ModelParams, d: DissipationDecomposition):
    """Inner variable ``sigma = S/mu`` (only for ``theta <= theta*``)."""
    S2 = gauge(theta, p, d)
    if np.any(S2 < 0):
        raise ValueError("sigma is defined only before the arrest point")
    return np.sqrt(S2) / d.mu


def inner_eval(sigma: float, p: ModelParams, d: DissipationDecomposition,
               b1: float = 0.0,
               validity_factor: float = INNER_VALIDITY_FACTOR) -> InnerEval:
    """Leading inner solution near the arrest of growth.

    ``b1`` (hence ``a1 = 2 b1``) is not fixed by matching and defaults to 0;
    ``psi1`` follows from ``psi1' = b1 sigma / (16 f D)`` with ``psi1(0) = 0``.
    """
    if sigma < 0:
        raise ValueError("inner solution is evaluated for sigma >= 0 only")
    b0, psi00 = inner_constants(p, d)
    D = d.rate
    c = inner_phase_coefficient(p, d)
    return InnerEval(
        sigma=sigma,
        a0=2.0 * b0,
        b0=b0,
        psi0_inner=psi00 + c * sigma**2,
        psi00=psi00,
        valid=bool(sigma * math.sqrt(d.mu) <= validity_factor),
        a1=2.0 * b1,
        b1=b1,
        psi1=b1 * sigma**2 / (32.0 * p.f * D),
        mu=d.mu,
    )
