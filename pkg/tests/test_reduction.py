import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from autoresonance.integrator import Trajectory
from autoresonance.model import PhysicalParams
from autoresonance.reduction import (
    demodulate_fast,
    envelope_to_fast,
    reduce_params,
    synthesize_fast,
    validate_reduction,
)


def phys(**kw):
    base = dict(eps=1e-3, omega=1.0, alpha1=1.0, alpha2=1.0, nu1=0.0, nu2=0.0,
                gamma=2.0, alpha=1.0)
    base.update(kw)
    return PhysicalParams(**base)


def uniform_env_times(p, theta_end, samples_per_period=64):
    _, sc = reduce_params(p)
    h = 2 * math.pi / p.omega / samples_per_period
    theta = np.arange(0.0, theta_end, h)
    return p.eps * theta / sc.chi


def test_all_ones():
    mp, sc = reduce_params(phys())
    assert (mp.f, mp.mu1, mp.mu2) == (1.0, 0.0, 0.0)
    assert (sc.kappa, sc.lam, sc.chi) == (1.0, 1.0, 1.0)


def test_threshold_forcing():
    mp, _ = reduce_params(phys(gamma=24.0))
    assert mp.f == pytest.approx(12.0)


def test_reference_dissipation():
    mp, _ = reduce_params(phys(nu1=0.01, nu2=0.01))
    assert mp.mu1 == pytest.approx(0.005)
    assert mp.mu2 == pytest.approx(0.005)


@given(alpha=st.floats(0.01, 100))
def test_chi_squared_alpha(alpha):
    _, sc = reduce_params(phys(alpha=alpha))
    assert sc.chi**2 * alpha == pytest.approx(1.0, rel=1e-14)
    assert sc.kappa > 0 and sc.lam > 0


@given(c=st.floats(0.01, 100), gamma=st.floats(0.1, 50), nu=st.floats(0.0, 1.0),
       omega=st.floats(0.2, 5), alpha=st.floats(0.1, 10))
@settings(max_examples=50)
def test_reduce_params_linear(c, gamma, nu, omega, alpha):
    mp, _ = reduce_params(phys(gamma=gamma, nu1=nu, nu2=2 * nu, omega=omega, alpha=alpha))
    mpc, _ = reduce_params(phys(gamma=c * gamma, nu1=c * nu, nu2=2 * c * nu,
                                omega=omega, alpha=alpha))
    assert mpc.f == pytest.approx(c * mp.f, rel=1e-12)
    assert mpc.mu1 == pytest.approx(c * mp.mu1, rel=1e-12, abs=1e-300)
    assert mpc.mu2 == pytest.approx(c * mp.mu2, rel=1e-12, abs=1e-300)


def test_scaling_constants_normalise_envelope_equations():
    # substitute tau = chi t, a = lam A, b = kappa B into the averaged equations
    # and read off the coefficients of the reduced system symbolically
    om, al, a1, a2, ga = sp.symbols("omega alpha alpha1 alpha2 gamma", positive=True)
    kappa = om * sp.sqrt(al) / a1
    lam = om * sp.sqrt(al / (a1 * a2))
    chi = 1 / sp.sqrt(al)
    coupling_a = sp.simplify(a1 * kappa * chi / (2 * om))
    coupling_b = sp.simplify(a2 * lam**2 * chi / (4 * om * kappa))
    forcing = sp.simplify(ga * chi / (2 * om * lam))
    chirp = sp.simplify(al * chi**2)
    assert coupling_a == sp.Rational(1, 2)
    assert coupling_b == sp.Rational(1, 4)
    assert chirp == 1
    assert sp.simplify(forcing - ga * sp.sqrt(a1 * a2) / (2 * al * om**2)) == 0
    mp, sc = reduce_params(phys(omega=1.7, alpha=2.3, alpha1=0.4, alpha2=3.1, gamma=5.0))
    subs = {om: 1.7, al: 2.3, a1: 0.4, a2: 3.1, ga: 5.0}
    assert float(lam.subs(subs)) == pytest.approx(sc.lam)
    assert float(kappa.subs(subs)) == pytest.approx(sc.kappa)
    assert float(forcing.subs(subs)) == pytest.approx(mp.f)


def test_reduce_params_errors():
    p = phys()
    object.__setattr__(p, "alpha", -1.0)
    with pytest.raises(ValueError):
        reduce_params(p)
    q = phys()
    object.__setattr__(q, "alpha2", -1.0)
    with pytest.raises(ValueError):
        reduce_params(q)


def test_envelope_to_fast_zero():
    assert envelope_to_fast(0.7, (0, 0), phys()) == (0.0, 0.0, 0.0, 0.0)


def test_envelope_to_fast_cc_doubling():
    p = phys(omega=1.0, alpha=4.0, alpha1=1.0, alpha2=0.25)
    _, sc = reduce_params(p)
    x, xd, y, yd = envelope_to_fast(0.0, (1.5, 0), p)
    assert x == pytest.approx(2 * sc.lam * 1.5)
    assert y == 0.0 and yd == 0.0
    assert xd == pytest.approx(0.0, abs=1e-15)


def test_demodulate_constant_first_mode():
    p = phys(eps=1e-3)
    t = uniform_env_times(p, 600.0)
    env = demodulate_fast(synthesize_fast(t, 1.0, 0.0, p), p)
    assert np.max(np.abs(env.states[:, 0] - 1.0)) < 1e-3
    assert np.max(np.abs(env.states[:, 1])) < 1e-3


def test_demodulate_pure_second_harmonic():
    p = phys(eps=1e-3, alpha1=2.0, alpha2=0.5, omega=1.3)
    t = uniform_env_times(p, 600.0)
    B = 0.8 - 0.6j
    env = demodulate_fast(synthesize_fast(t, 0.0, B, p), p)
    assert np.max(np.abs(env.states[:, 0])) < 1e-3
    assert np.max(np.abs(np.abs(env.states[:, 1]) - abs(B))) < 1e-3


@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_roundtrip_varying_envelope(eps):
    p = phys(eps=eps)
    t = uniform_env_times(p, 1.0 / eps)
    A = (1 + 0.5 * t) * np.exp(1j * 2 * t)
    B = 0.3 * t * np.exp(-1j * t)
    env = demodulate_fast(synthesize_fast(t, A, B, p), p)
    tc = env.times
    A_c = (1 + 0.5 * tc) * np.exp(1j * 2 * tc)
    B_c = 0.3 * tc * np.exp(-1j * tc)
    assert np.max(np.abs(env.states[:, 0] - A_c)) < 5 * eps
    assert np.max(np.abs(env.states[:, 1] - B_c)) < 5 * eps


def test_demodulation_window_convergence():
    # longer windows average the conjugate carrier better until the slow
    # variation of the envelope takes over
    p = phys(eps=1e-4)
    t = uniform_env_times(p, 2000.0)
    A = np.exp(1j * 3 * t)
    errs = []
    for periods in (2, 4, 8):
        env = demodulate_fast(synthesize_fast(t, A, 0.0, p), p,
                              window=periods * 2 * math.pi)
        errs.append(np.max(np.abs(env.states[:, 0] - np.exp(1j * 3 * env.times))))
    assert errs[0] > errs[1] > errs[2]


def test_demodulate_rejects_short_window_and_coarse_sampling():
    p = phys()
    t = uniform_env_times(p, 200.0)
    traj = synthesize_fast(t, 1.0, 0.0, p)
    with pytest.raises(ValueError, match="two carrier periods"):
        demodulate_fast(traj, p, window=1.5 * 2 * math.pi)
    coarse = Trajectory(times=traj.times[::8], states=traj.states[::8])
    with pytest.raises(ValueError, match="coarse"):
        demodulate_fast(coarse, p)


def test_fast_system_matches_envelope_equations():
    errs = {}
    for eps in (1e-2, 1e-3, 1e-4):
        rep = validate_reduction(phys(eps=eps, gamma=24.2), tau_end=1.0)
        errs[eps] = max(rep.rel_err_A, rep.rel_err_B)
    assert errs[1e-3] < 5e-2
    assert errs[1e-2] > errs[1e-3] > errs[1e-4]
    # roughly first order in eps
    assert errs[1e-3] / errs[1e-4] > 5


def test_fast_system_general_parameters():
    p = PhysicalParams(eps=1e-3, omega=2.0, alpha1=0.5, alpha2=3.0, nu1=0.02, nu2=0.01,
                       gamma=60.0, alpha=2.0)
    rep = validate_reduction(p, tau_end=1.0)
    assert rep.rel_err_A < 2e-2
    assert rep.rel_err_B < 2e-2
