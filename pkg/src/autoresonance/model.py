"""Parameter records and right-hand sides of the three oscillator models.

Three ODE systems are provided:

* the fast system of two weakly coupled oscillators with a chirped drive
  (real state ``x, x', y, y'`` in the fast time ``fast_theta``);
* the main-resonance envelope equations for the complex amplitudes
  ``A(t), B(t)``;
* the same envelope equations rewritten in the slow variable
  ``theta = mu * t`` with ``a = mu * A``, ``b = mu * B``.

Each system has a jitted kernel ``kernel(t, y, params) -> dy`` operating on
flat numpy arrays; :class:`OdeSystem` bundles a kernel with its packed
parameter vector so the integrator can run it without Python overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit


class EnvelopeState(NamedTuple):
    A: complex
    B: complex


class FastState(NamedTuple):
    x: float
    xdot: float
    y: float
    ydot: float


@dataclass(frozen=True)
class PhysicalParams:
    """Constants of the fast two-oscillator system.

    ``alpha`` is the chirp rate of the drive frequency with respect to the
    slow time ``tau = eps * fast_theta``.
    """

    eps: float
    omega: float
    alpha1: float
    alpha2: float
    nu1: float
    nu2: float
    gamma: float
    alpha: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.alpha1 * self.alpha2 > 0:
            raise ValueError("alpha1*alpha2 must be positive")
        if self.nu1 < 0 or self.nu2 < 0:
            raise ValueError("dissipation coefficients must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array([self.eps, self.omega, self.alpha1, self.alpha2,
                         self.nu1, self.nu2, self.gamma, self.alpha])


@dataclass(frozen=True)
class ModelParams:
    """Reduced forcing ``f`` and dissipation rates ``mu1``, ``mu2``."""

    f: float
    mu1: float = 0.0
    mu2: float = 0.0

    def __post_init__(self):
        # f = 0 is allowed: it is the unforced control case
        if not (math.isfinite(self.f) and self.f >= 0):
            raise ValueError(f"f must be finite and non-negative, got {self.f}")
        if not (self.mu1 >= 0 and self.mu2 >= 0):
            raise ValueError("mu1 and mu2 must be non-negative")

    @classmethod
    def from_decomposition(cls, f: float, mu: float, delta1: float,
                           delta2: float) -> "ModelParams":
        return cls(f=f, mu1=delta1 * mu, mu2=delta2 * mu)

    def as_array(self) -> np.ndarray:
        return np.array([self.f, self.mu1, self.mu2])


@dataclass(frozen=True)
class DissipationDecomposition:
    """Split ``mu1 = delta1*mu``, ``mu2 = delta2*mu`` into a common scale.

    ``delta1 = delta2 = 0`` with ``mu > 0`` is accepted: it is the
    undissipated problem viewed on the slow scale ``mu``.
    """

    mu: float
    delta1: float
    delta2: float

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mu must be non-negative, got {self.mu}")
        if self.delta1 < 0 or self.delta2 < 0:
            raise ValueError("delta1 and delta2 must be non-negative")

    @property
    def rate(self) -> float:
        """The combination ``2*delta1 + delta2`` that sets the phase drift."""
        return 2.0 * self.delta1 + self.delta2

    @classmethod
    def from_params(cls, p: ModelParams, mu: float | None = None
                    ) -> "DissipationDecomposition":
        """Decompose ``p`` on the scale ``mu`` (default ``max(mu1, mu2)``)."""
        if mu is None:
            mu = max(p.mu1, p.mu2)
        if mu <= 0:
            raise ValueError("cannot decompose: no dissipation scale (mu = 0)")
        return cls(mu=mu, delta1=p.mu1 / mu, delta2=p.mu2 / mu)

    def check_consistent(self, p: ModelParams, rtol: float = 1e-12) -> None:
        for name, mu_i, delta in (("mu1", p.mu1, self.delta1),
                                  ("mu2", p.mu2, self.delta2)):
            if not math.isclose(mu_i, delta * self.mu, rel_tol=rtol, abs_tol=1e-300):
                raise ValueError(f"{name}={mu_i} inconsistent with "
                                 f"delta*mu={delta * self.mu}")


# --- jitted kernels --------------------------------------------------------

@njit(cache=True)
def main_kernel(t, y, params):
    f = params[0]
    mu1 = params[1]
    mu2 = params[2]
    A = y[0]
    B = y[1]
    out = np.empty(2, dtype=np.complex128)
    out[0] = -1j * (2.0 * t * A + 0.5 * np.conj(A) * B + f) - mu1 * A
    out[1] = -1j * (4.0 * t * B + 0.25 * A * A) - mu2 * B
    return out


@njit(cache=True)
def scaled_kernel(theta, y, params):
    # params = (f, mu, delta1, delta2)
    f = params[0]
    mu2 = params[1] * params[1]
    d1 = params[2]
    d2 = params[3]
    a = y[0]
    b = y[1]
    out = np.empty(2, dtype=np.complex128)
    out[0] = (-1j * (2.0 * theta * a + 0.5 * np.conj(a) * b + mu2 * f) - mu2 * d1 * a) / mu2
    out[1] = (-1j * (4.0 * theta * b + 0.25 * a * a) - mu2 * d2 * b) / mu2
    return out


@njit(cache=True)
def fast_kernel(theta, y, params):
    eps = params[0]
    omega = params[1]
    alpha1 = params[2]
    alpha2 = params[3]
    nu1 = params[4]
    nu2 = params[5]
    gamma = params[6]
    alpha = params[7]
    tau = eps * theta
    phi = (omega + eps * alpha * tau) * theta
    x = y[0]
    xd = y[1]
    yy = y[2]
    yd = y[3]
    out = np.empty(4)
    out[0] = xd
    out[1] = (-eps * nu1 * xd - omega * omega * x + eps * alpha1 * x * yy
              + eps * 2.0 * gamma * math.cos(phi))
    out[2] = yd
    out[3] = -eps * nu2 * yd - 4.0 * omega * omega * yy + eps * alpha2 * x * x
    return out


@dataclass(frozen=True, eq=False)
class OdeSystem:
    """A jitted kernel together with its packed parameters.

    Calling the object evaluates the right-hand side, so it can be used
    anywhere a plain ``rhs(t, y)`` callable is expected.
    """

    kernel: object
    params: np.ndarray
    dtype: type

    def __call__(self, t, y):
        return self.kernel(float(t), np.asarray(y, dtype=self.dtype), self.params)


def main_system(p: ModelParams) -> OdeSystem:
    return OdeSystem(main_kernel, p.as_array(), np.complex128)


def scaled_system(p: ModelParams, d: DissipationDecomposition) -> OdeSystem:
    if d.mu <= 0:
        raise ValueError("scaled form needs mu > 0")
    d.check_consistent(p)
    return OdeSystem(scaled_kernel, np.array([p.f, d.mu, d.delta1, d.delta2]),
                     np.complex128)


def fast_system(p: PhysicalParams) -> OdeSystem:
    return OdeSystem(fast_kernel, p.as_array(), np.float64)


# --- public right-hand sides -----------------------------------------------

def rhs_main(t: float, s, p: ModelParams) -> EnvelopeState:
    """Main-resonance envelope equations evaluated at ``(t, A, B)``.

    Returns ``(A', B')`` with
    ``A' = -i(2tA + A*B/2 + f) - mu1 A`` and ``B' = -i(4tB + A^2/4) - mu2 B``.
    """
    y = np.asarray(s, dtype=np.complex128)
    dA, dB = main_kernel(float(t), y, p.as_array())
    return EnvelopeState(complex(dA), complex(dB))


def rhs_scaled(theta: float, s, p: ModelParams,
               d: DissipationDecomposition) -> EnvelopeState:
    """Envelope equations in the slow variable ``theta = mu t``."""
    system = scaled_system(p, d)
    da, db = system(theta, s)
    return EnvelopeState(complex(da), complex(db))


def rhs_fast(fast_theta: float, s, p: PhysicalParams) -> FastState:
    """Fast two-oscillator system; the drive ``gamma e^{i phi} + c.c.`` is
    applied as ``2 gamma cos(phi)``."""
    y = np.asarray(s, dtype=np.float64)
    out = fast_kernel(float(fast_theta), y, p.as_array())
    return FastState(*(float(v) for v in out))


def conserved_quantity(A, B):
    """``|A|^2 + 2|B|^2``, invariant of the unforced, undamped envelope flow."""
    return np.abs(A) ** 2 + 2.0 * np.abs(B) ** 2
