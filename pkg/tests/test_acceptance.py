"""End-to-end acceptance checks; each prints one PASS/FAIL line in the summary."""

import math
import time

import numpy as np
import pytest

from autoresonance import asymptotics as asy
from autoresonance.analysis import (
    arrest_prediction_check,
    classify_capture,
    default_config,
    error_curve,
    find_threshold,
    simulate,
)
from autoresonance.cli import main
from autoresonance.integrator import IntegrationConfig, convergence_order, integrate
from autoresonance.model import (
    DissipationDecomposition,
    ModelParams,
    PhysicalParams,
    conserved_quantity,
    main_system,
)
from autoresonance.reduction import validate_reduction


def setup(f, mu, d1, d2):
    return ModelParams.from_decomposition(f, mu, d1, d2), DissipationDecomposition(mu, d1, d2)


def test_01_threshold(acceptance):
    t0 = time.perf_counter()
    res = find_threshold(0.0, 0.0, 10.0, 14.0, 0.05, t_end=30.0, dt=1e-4)
    elapsed = time.perf_counter() - t0
    acceptance.check(1, "capture threshold without dissipation",
                     11.8 <= res.f_star <= 12.2 and elapsed < 120,
                     f"f*={res.f_star:.4f} in [11.8, 12.2], {elapsed:.1f}s")


def test_02_capture_endpoints(acceptance):
    t0 = time.perf_counter()
    below = classify_capture(simulate(ModelParams(11.9), default_config(30.0, 1e-4)))
    above = classify_capture(simulate(ModelParams(12.1), default_config(30.0, 1e-4)))
    elapsed = time.perf_counter() - t0
    acceptance.check(2, "capture at f=12.1, none at f=11.9",
                     not below.captured and above.captured and elapsed < 30,
                     f"ratios {below.growth_ratio:.3f} / {above.growth_ratio:.3f}, "
                     f"{elapsed:.1f}s")


def test_03_arrest(acceptance):
    rep = arrest_prediction_check(*setup(18.0, 0.005, 1.0, 1.0))
    acceptance.check(3, "arrest time and peak amplitude",
                     rep.t_predicted == pytest.approx(100.0) and rep.rel_dev < 0.15
                     and rep.peak_predicted == pytest.approx(800.0) and rep.peak_rel_dev < 0.15,
                     f"t={rep.t_numeric:.2f} vs 100 ({rep.rel_dev:.1%}), "
                     f"peak={rep.peak_numeric:.1f} vs 800 ({rep.peak_rel_dev:.1%})")


def test_04_outer_accuracy(acceptance):
    p, d = setup(18.0, 0.005, 1.0, 1.0)
    ts = asy.outer_breakdown_theta(p, d)
    approach = [ts - g for g in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)]
    curve = error_curve(p, d, (0.1, 0.4), approach=approach)
    window = curve.window_max(0.1, 0.4)
    tail = curve.rel_err_a[-len(approach):]
    acceptance.check(4, "outer asymptotics vs RK4",
                     window < 0.05 and tail[-1] > 0.2,
                     f"max err on [0.1, 0.4] = {window:.3%}, "
                     f"err at theta*-1e-10 = {tail[-1]:.3g}")


def test_05_degeneration(acceptance):
    worst, worst_prime = 0.0, 0.0
    for f in (12.5, 18.0, 25.0):
        p, d = setup(f, 0.005, 0.0, 0.0)
        for theta in np.linspace(0.0, 50.0, 101):
            ev = asy.outer_eval(float(theta), p, d)
            worst = max(worst, abs(ev.sin_psi0 + 12.0 / f), abs(math.sin(ev.psi0) + 12.0 / f))
            worst_prime = max(worst_prime, abs(ev.psi0_prime))
    acceptance.check(5, "undissipated phase is constant",
                     worst <= 1e-12 and worst_prime == 0.0,
                     f"max |sin psi0 + 12/f| = {worst:.1e}, max |psi0'| = {worst_prime}")


def test_06_matching(acceptance):
    rng = np.random.default_rng(20261015)
    worst = 0.0
    psi_exact = True
    for _ in range(100):
        f = 30.0 - rng.uniform(0.0, 18.0)       # (12, 30]
        d1 = 2.0 - rng.uniform(0.0, 2.0)        # (0, 2]
        d2 = 2.0 - rng.uniform(0.0, 2.0)
        p, d = setup(f, 0.005, d1, d2)
        ts = asy.outer_breakdown_theta(p, d)
        b0, psi00 = asy.inner_constants(p, d)
        worst = max(worst, abs(8 * ts - 2 * b0), abs(4 * ts - b0))
        psi_exact &= psi00 == -math.pi / 2
    acceptance.check(6, "outer/inner matching identities",
                     worst <= 1e-12 and psi_exact,
                     f"max identity residual {worst:.1e}, psi00 exact: {psi_exact}")


def test_07_integrator_order(acceptance):
    order = convergence_order(main_system(ModelParams(5.0)), np.zeros(2, complex),
                              IntegrationConfig(0.0, 5.0, dt=0.02), refinements=3)
    acceptance.check(7, "RK4 convergence order", 3.5 <= order <= 4.5,
                     f"order {order:.3f} in [3.5, 4.5]")


def test_08_conservation(acceptance):
    s0 = np.array([1.0 + 0.5j, -0.3 + 0.2j])
    traj = integrate(main_system(ModelParams(0.0)), s0,
                     IntegrationConfig(0.0, 10.0, dt=1e-4, record_stride=100))
    q = conserved_quantity(traj.states[:, 0], traj.states[:, 1])
    drift = float(np.max(np.abs(q - q[0])) / q[0])
    acceptance.check(8, "|A|^2 + 2|B|^2 conserved", drift < 1e-8,
                     f"relative drift {drift:.1e} < 1e-8")


@pytest.mark.extended
def test_09_reduction(acceptance):
    base = dict(omega=1.0, alpha1=1.0, alpha2=1.0, nu1=0.0, nu2=0.0, gamma=24.2, alpha=1.0)
    errs = {}
    for eps in (1e-3, 1e-4):
        rep = validate_reduction(PhysicalParams(eps=eps, **base), tau_end=1.0)
        errs[eps] = max(rep.rel_err_A, rep.rel_err_B)
    acceptance.check(9, "fast system reduces to the envelope equations",
                     errs[1e-3] < 5e-2 and errs[1e-4] < errs[1e-3],
                     f"rel err {errs[1e-3]:.2e} at eps=1e-3, {errs[1e-4]:.2e} at eps=1e-4")


COMMANDS = [
    ["simulate", "--f", "12.1", "--t-end", "30", "--stride", "1000"],
    ["asymptotic", "--f", "18", "--mu", "0.005"],
    ["asymptotic", "--f", "18", "--mu", "0.005", "--inner"],
    ["compare", "--f", "18", "--mu", "0.005", "--theta-max", "0.4"],
    ["threshold", "--f-lo", "10", "--f-hi", "14", "--tol", "0.5"],
    ["arrest", "--f", "18", "--mu", "0.005"],
    ["sweep", "--f-values", "11.9,12.1", "--jobs", "2"],
    ["validate-reduction", "--eps", "1e-2"],
]


def test_10_determinism(acceptance, tmp_path, capsys):
    differing = []
    for k, argv in enumerate(COMMANDS):
        outputs = []
        for rep in range(2):
            path = tmp_path / f"{k}_{rep}.csv"
            assert main(argv + ["-o", str(path)]) == 0
            outputs.append(path.read_bytes())
        if outputs[0] != outputs[1] or not outputs[0]:
            differing.append(argv[0])
    capsys.readouterr()
    acceptance.check(10, "byte-identical CSV on repeated runs", not differing,
                     f"{len(COMMANDS)} commands checked"
                     + (f", differing: {differing}" if differing else ""))
