"""Acceptance criteria 1-11, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines. Two
criteria quote reference values that the independent oracles contradict;
they are marked ``xfail(strict=True)`` so they report FAIL without hiding
the discrepancy, and would turn the suite red if they ever started passing.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from exacthydro.chapman_enskog import simple_ce_coefficients, truncated_sum
from exacthydro.invariance import (
    grad13_solve,
    lateral_residual,
    lateral_solve,
    simple_exact,
    simple_exact_x,
    simple_newton,
)
from exacthydro.models import build_model
from exacthydro.projector import entropic_product, random_context, thermodynamic_project
from exacthydro.spectra import (
    NON_HYDRODYNAMIC,
    kinetic_spectrum,
    nonlocal_closure_dispersion,
    simple_exact_dispersion,
    truncated_dispersion,
)
from exacthydro.verification import (
    DEFAULT_TIMES,
    as_lifting_matrix,
    commutative_diagram_error,
    energy_balance_residual,
    energy_ledger,
    invariance_defect,
    lift,
    propagate,
)
from exacthydro.viscosity import r_burnett, r_maxwell, r_ode_solve

GRAD3 = build_model("grad3_1d")


def report(n, checks):
    """Print one line for criterion ``n`` and fail on the first bad check."""
    bad = [name for name, ok in checks if not ok]
    status = "PASS" if not bad else "FAIL (" + ", ".join(bad) + ")"
    print(f"\ncriterion {n:2d}: {status}")
    assert not bad, f"criterion {n} failed: {bad}"


def test_criterion_01_exact_limits():
    t0 = time.perf_counter()
    x = simple_exact_x(1e8)
    wp, wm = simple_exact_dispersion(1e3)
    dt = time.perf_counter() - t0
    report(1, [
        ("X(1e8) -> -0.8", abs(x + 0.8) < 1e-6),
        ("Re w -> -2/9", max(abs(wp.real + 2 / 9), abs(wm.real + 2 / 9)) < 1e-4),
        ("Im w+/k -> sqrt3", abs(wp.imag / 1e3 - math.sqrt(3)) < 1e-4),
        ("Im w-/k -> -sqrt3", abs(wm.imag / 1e3 + math.sqrt(3)) < 1e-4),
        ("runtime < 1 s", dt < 1.0),
    ])


def _printed_newton(y, n):
    if n == 1:
        a = -4 / (3 + 5 * y)
        return a, a
    den = (3 + 5 * y) * (9 + 9 * y + 67 * y**2 + 75 * y**3)
    A2 = -4 * (27 + 63 * y + 153 * y**2 + 125 * y**3) / (3 * den)
    B2 = -4 * (9 + 33 * y + 115 * y**2 + 75 * y**3) / den
    return A2, B2


@pytest.mark.xfail(
    strict=True,
    raises=AssertionError,
    reason="printed B2 numerator 115 y^2; exact rational Newton steps give 91 y^2 (see test_invariance)",
)
def test_criterion_02_newton_closed_forms():
    checks = []
    for y in (0.1, 1.0, 10.0):
        for n in (1, 2):
            c = simple_newton(y, n)
            A, B = _printed_newton(y, n)
            checks.append((f"A{n}({y})", abs(c["A"] - A) / abs(A) < 1e-12))
            checks.append((f"B{n}({y})", abs(c["B"] - B) / abs(B) < 1e-12))
    report(2, checks)


def test_criterion_03_chapman_enskog():
    s = simple_ce_coefficients(19)
    A, B = truncated_sum(s, 0.01, 19)
    ex = simple_exact(0.01)
    report(3, [
        ("20-term sum A", abs(A - ex["A"]) < 1e-10),
        ("20-term sum B", abs(B - ex["B"]) < 1e-10),
        ("a0 = b0 = -4/3", s.a[0] == s.b[0] == Fraction(-4, 3)),
        ("a1 = 4/9", s.a[1] == Fraction(4, 9)),
    ])


def test_criterion_04_critical_wave_vector():
    t0 = time.perf_counter()
    res = grad13_solve(np.arange(0.01, 0.4001, 0.01))
    dt = time.perf_counter() - t0
    lo, hi = res.bracket
    report(4, [
        ("critical point found", res.termination == "critical_point_found"),
        ("bracket < 1e-4", hi - lo < 1e-4),
        ("k_c near 0.3023", abs(res.critical_k - 0.3023) <= 0.005),
        ("runtime < 10 s", dt < 10.0),
    ])


def test_criterion_05_lateral():
    worst = 0.0
    for y in np.concatenate([[0.0], np.geomspace(1e-6, 1e4, 400)]):
        c = lateral_solve(y)
        cubic, rel = lateral_residual(c["D"], c["U"], y)
        # residuals relative to the largest term of each equation
        D, U = c["D"], c["U"]
        s1 = max(abs(15 * y * y * D**3), abs(25 * y * D * D), abs((10 + 21 * y) * D), 10.0)
        s2 = max(abs(U * 2), abs(3 * y * U * D), abs(3 * D))
        worst = max(worst, abs(cubic) / s1, abs(rel) / s2)
    far = lateral_solve(1e8)
    report(5, [
        ("D(0) = -1", lateral_solve(0.0)["D"] == -1.0),
        ("residual < 1e-12", worst < 1e-12),
        ("k^2 D -> -10/21", abs(1e8 * far["D"] + 10 / 21) / (10 / 21) < 1e-5),
    ])


def test_criterion_06_stability_dichotomy():
    k = np.linspace(0.0, 5.0, 200)
    exact_ok = all(w.real <= 0 for kj in k for w in simple_exact_dispersion(kj))
    beyond = k[k > math.sqrt(3)]
    sb_unstable = all(max(w.real for w in truncated_dispersion("super_burnett", kj)) > 0 for kj in beyond)
    at = max(abs(w.real) for w in truncated_dispersion("super_burnett", math.sqrt(3)))
    report(6, [
        ("exact Re w <= 0", exact_ok),
        ("super-Burnett Re w > 0 beyond sqrt3", sb_unstable),
        ("super-Burnett Re w(sqrt3) = 0", at < 1e-12),
    ])


@pytest.mark.xfail(
    strict=True,
    raises=AssertionError,
    reason="the characteristic cubic gives w_nh -> -5/9 (-0.5556 at k=100); -0.5 is a rounding",
)
def test_criterion_07_mode_structure():
    s3 = kinetic_spectrum(GRAD3, np.linspace(0.0, 100.0, 2001))
    s13 = kinetic_spectrum(build_model("grad13_1d"), [0.0]).omega[0]
    w0 = s3.omega[0]
    w_nh = s3.omega[-1, s3.labels.index(NON_HYDRODYNAMIC)]
    report(7, [
        ("grad3 k=0 {0,0,-1}", sorted(w0.real.tolist()) == [-1.0, 0.0, 0.0] and np.all(w0.imag == 0)),
        ("grad13 k=0 {0,0,0,-1,-2/3}", np.allclose(np.sort(s13.real), [-1, -2 / 3, 0, 0, 0], rtol=0, atol=1e-15)
         and np.all(s13.imag == 0)),
        ("w_nh(100) within 1e-2 of -0.5", abs(w_nh.real + 0.5) < 1e-2 and abs(w_nh.imag) < 1e-8),
    ])


def test_criterion_08_viscosity():
    g = np.linspace(-1e3, 1e3, 200001)
    R = r_maxwell(g)
    res = np.abs(g * g * R * R + (1.5 + g) * R - 2).max()
    prof = r_ode_solve(1.0)
    report(8, [
        ("Maxwell residual < 1e-12", res < 1e-12),
        ("R(0) = 4/3", r_maxwell(0.0) == 4 / 3),
        ("Burnett(2) < 0 < R_MM(2)", r_burnett(2.0) < 0 < r_maxwell(2.0)),
        ("ODE gamma=1 = closed form", np.abs(prof.r_values - r_maxwell(prof.g_values)).max() < 1e-9),
    ])


def test_criterion_09_projector():
    rng = np.random.default_rng(20240601)
    ent = idem = 0.0
    for _ in range(1000):
        ctx = random_context(rng, int(rng.integers(3, 9)))
        J = rng.normal(size=ctx.dim)
        PJ = thermodynamic_project(ctx, J)
        g = ctx.entropy_gradient
        lhs, rhs = entropic_product(ctx, g, PJ), entropic_product(ctx, g, J)
        ent = max(ent, abs(lhs - rhs) / max(1.0, abs(rhs)))
        idem = max(idem, np.abs(thermodynamic_project(ctx, PJ) - PJ).max() / max(1.0, np.abs(PJ).max()))
    report(9, [("entropy production", ent < 1e-12), ("idempotence", idem < 1e-12)])


def test_criterion_10_invariance_oracle():
    macro = np.array([1.0, 0.5j])
    checks = []
    for k in (0.1, 1.0, 10.0):
        c = simple_exact(k * k)
        X = as_lifting_matrix(GRAD3, c, k)
        traj = propagate(GRAD3, k, lift(GRAD3, X, macro, k), DEFAULT_TIMES)
        E = np.array([energy_ledger(k, c["A"], c["B"], *s.macro).total for s in traj.states])
        checks += [
            (f"defect k={k}", invariance_defect(GRAD3, c, k, macro).max() < 1e-9),
            (f"diagram k={k}", commutative_diagram_error(GRAD3, c, k, macro).max() < 1e-9),
            (f"energy balance k={k}", energy_balance_residual(traj, c["A"], c["B"]) < 1e-8),
            (f"energy non-increasing k={k}", np.all(np.diff(E) <= 1e-12 * E.max())),
        ]
    report(10, checks)


def test_criterion_11_nonlocal_saturation():
    a = np.abs(nonlocal_closure_dispersion(100.0).real).max()
    b = np.abs(nonlocal_closure_dispersion(1000.0).real).max()
    k = np.geomspace(10.0, 1000.0, 30)
    ns = [max(abs(w.real) for w in truncated_dispersion("navier_stokes", kj)) for kj in k]
    slope = np.polyfit(np.log(k), np.log(ns), 1)[0]
    report(11, [
        ("nonlocal saturates", abs(a - b) / b < 0.05),
        ("Navier-Stokes exponent 2", abs(slope - 2.0) <= 0.05),
    ])
