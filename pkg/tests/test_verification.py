import math

import numpy as np
import pytest

from exacthydro.errors import PreconditionError
from exacthydro.invariance import (
    grad13_sweep,
    lateral_solve,
    simple_closure,
    simple_exact,
    simple_matched,
    simple_newton,
)
from exacthydro.models import FourierState, build_model, full_generator
from exacthydro.verification import (
    DEFAULT_TIMES,
    as_lifting_matrix,
    commutative_diagram_error,
    defect_rate,
    energy_balance_residual,
    energy_balance_series,
    energy_ledger,
    invariance_defect,
    lift,
    propagate,
    propagator,
)

GRAD3 = build_model("grad3_1d")
MACRO = np.array([1.0, 0.5j])


def test_default_times():
    assert DEFAULT_TIMES.size == 101 and DEFAULT_TIMES[-1] == 10.0


def test_propagator_matches_expm():
    from scipy.linalg import expm

    G = full_generator(GRAD3, 1.3)
    P = propagator(G, [0.0, 0.7, 3.0])
    np.testing.assert_allclose(P[0], np.eye(3), atol=1e-14)
    np.testing.assert_allclose(P[2], expm(3.0 * G), atol=1e-12)


def test_propagator_defective_fallback():
    J = np.array([[0.0, 1.0], [0.0, 0.0]])
    P = propagator(J, [2.0])
    np.testing.assert_allclose(P[0], [[1.0, 2.0], [0.0, 1.0]], atol=1e-12)


def test_relaxation_at_k0():
    traj = propagate(GRAD3, 0.0, FourierState(np.zeros(2), np.ones(1), 0.0), [0.0, 1.0, 2.0])
    np.testing.assert_allclose(traj.micro()[:, 0], np.exp(-np.array([0.0, 1.0, 2.0])), atol=1e-14)


@pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
def test_exact_manifold_invariant(k):
    c = simple_exact(k * k)
    assert invariance_defect(GRAD3, c, k, MACRO).max() < 1e-9
    assert commutative_diagram_error(GRAD3, c, k, MACRO).max() < 1e-9
    assert defect_rate(GRAD3, c, k, MACRO) < 1e-12


def test_grad13_and_lateral_invariant():
    m13 = build_model("grad13_1d")
    c = grad13_sweep([0.2]).samples[-1]
    assert invariance_defect(m13, c, 0.2, [1.0, 0.3, -0.2]).max() < 1e-8
    ml = build_model("grad13_lateral")
    c = lateral_solve(4.0)
    assert invariance_defect(ml, c, 2.0, [1.0]).max() < 1e-9


def test_approximate_closures_are_not_invariant():
    k = 0.1
    assert invariance_defect(GRAD3, simple_matched(k * k), k, MACRO).max() > 1e-6
    rates = [defect_rate(GRAD3, simple_newton(k * k, n), k, MACRO) for n in (0, 1, 2)]
    assert rates[0] > rates[1] > rates[2]
    euler = simple_closure("euler", k * k)
    # for Euler the defect rate is |d sigma/dt| = (4/3)|ik u|
    assert defect_rate(GRAD3, euler, k, [0.0, 1.0]) == pytest.approx(4 / 3 * k)


@pytest.mark.parametrize("k", [0.1, 1.0, 10.0])
def test_energy_balance_exact(k):
    c = simple_exact(k * k)
    X = as_lifting_matrix(GRAD3, c, k)
    traj = propagate(GRAD3, k, lift(GRAD3, X, MACRO, k), DEFAULT_TIMES)
    assert energy_balance_residual(traj, c["A"], c["B"]) < 1e-9
    E = [energy_ledger(k, c["A"], c["B"], *s.macro).total for s in traj.states]
    assert np.all(np.diff(E) <= 1e-12 * max(E))
    assert c["A"] < 0 and 1 - k * k * c["B"] > 0


def test_energy_balance_against_finite_difference():
    k = 1.0
    c = simple_exact(k * k)
    X = as_lifting_matrix(GRAD3, c, k)
    t = np.linspace(0.0, 1.0, 2001)
    traj = propagate(GRAD3, k, lift(GRAD3, X, MACRO, k), t)
    E = np.array([energy_ledger(k, c["A"], c["B"], *s.macro).total for s in traj.states])
    rate = np.array([energy_ledger(k, c["A"], c["B"], *s.macro).dissipation_rate for s in traj.states])
    dE = np.gradient(E, t, edge_order=2)
    assert np.abs(dE - 2 * rate).max() < 1e-6


def test_energy_balance_requires_manifold():
    k = 1.0
    c = simple_exact(k * k)
    traj = propagate(GRAD3, k, FourierState(MACRO, np.array([1.0 + 0j]), k), [0.0, 1.0])
    with pytest.raises(PreconditionError):
        energy_balance_series(traj, c["A"], c["B"])


def test_shape_checks():
    with pytest.raises(PreconditionError):
        as_lifting_matrix(GRAD3, np.zeros((2, 2)), 1.0)
    with pytest.raises(PreconditionError):
        as_lifting_matrix(GRAD3, lateral_solve(1.0), 1.0)
    with pytest.raises(PreconditionError):
        propagate(GRAD3, 1.0, FourierState(MACRO, np.zeros(1), 1.0), [1.0, 0.5])
    assert math.isfinite(defect_rate(GRAD3, np.zeros((1, 2)), 1.0, MACRO))
