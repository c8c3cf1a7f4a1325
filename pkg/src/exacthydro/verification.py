"""Oracles: exact linear propagation, defect of invariance, energy balance.

A lifting ``X(k)`` defines the manifold ``mu = X(k) M``. It is invariant when
trajectories of the full kinetic system started on it stay on it; the
propagator ``exp(t G(k))`` is the reference for all checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import PreconditionError
from .invariance import GeneralLifting, LiftingCoefficients, lifting_matrix
from .models import FourierState, build_model, full_generator

__all__ = [
    "Trajectory",
    "EnergyLedger",
    "DEFAULT_TIMES",
    "propagator",
    "propagate",
    "as_lifting_matrix",
    "lift",
    "defect_rate",
    "invariance_defect",
    "commutative_diagram_error",
    "energy_ledger",
    "energy_balance_series",
    "energy_balance_residual",
]

#: 101 points on [0, 10]
DEFAULT_TIMES = np.linspace(0.0, 10.0, 101)

_COND_LIMIT = 1e8


@dataclass(frozen=True)
class Trajectory:
    model_name: str
    k: float
    times: np.ndarray
    states: tuple

    def macro(self):
        return np.array([s.macro for s in self.states])

    def micro(self):
        return np.array([s.micro for s in self.states])


@dataclass(frozen=True)
class EnergyLedger:
    """Energy of one three-moment mode on a manifold with coefficients ``(A, B)``."""

    mechanical: float
    capillarity: float
    dissipation_rate: float

    @property
    def total(self) -> float:
        return self.mechanical + self.capillarity


def _times(times):
    t = np.asarray(times, dtype=float).ravel()
    if t.size == 0 or not np.all(np.isfinite(t)):
        raise PreconditionError("times must be finite and nonempty")
    if t.size > 1 and not np.all(np.diff(t) > 0):
        raise PreconditionError("times must be strictly increasing")
    return t


def propagator(G, times):
    """``exp(t G)`` for each ``t``, stacked along the first axis.

    Uses the eigendecomposition when the eigenvector matrix is well
    conditioned, otherwise Pade scaling-and-squaring.
    """
    G = np.asarray(G, dtype=complex)
    t = np.asarray(times, dtype=float).ravel()
    lam, V = np.linalg.eig(G)
    if np.linalg.cond(V) <= _COND_LIMIT:
        Vi = np.linalg.inv(V)
        return np.einsum("ij,tj,jk->tik", V, np.exp(np.outer(t, lam)), Vi)
    return np.array([expm(ti * G) for ti in t])


def propagate(model, k, state0, times) -> Trajectory:
    """Exact trajectory of the full kinetic system at wave number ``k``."""
    if not isinstance(state0, FourierState):
        state0 = FourierState.from_vector(model, state0, k)
    state0.check(model)
    t = _times(times)
    x0 = state0.vector()
    xs = propagator(full_generator(model, k), t) @ x0
    states = tuple(FourierState.from_vector(model, x, k) for x in xs)
    return Trajectory(model.name, float(k), t, states)


def as_lifting_matrix(model, lifting, k):
    """Lifting matrix for a coefficient set, a :class:`GeneralLifting` or an array."""
    if isinstance(lifting, LiftingCoefficients):
        if lifting.model_name != model.name:
            raise PreconditionError(
                f"lifting for {lifting.model_name} used with model {model.name}"
            )
        X = lifting_matrix(lifting, k)
    elif isinstance(lifting, GeneralLifting):
        X = lifting.X
    else:
        X = np.asarray(lifting, dtype=complex)
    if X.shape != (model.dim_micro, model.dim_macro):
        raise PreconditionError(
            f"lifting has shape {X.shape}, expected {(model.dim_micro, model.dim_macro)}"
        )
    return X


def lift(model, X, macro, k=0.0) -> FourierState:
    macro = np.asarray(macro, dtype=complex)
    if macro.shape != (model.dim_macro,):
        raise PreconditionError(f"macro state must have length {model.dim_macro}")
    return FourierState(macro, X @ macro, k)


def defect_rate(model, lifting, k, macro):
    """``|| d mu/dt - X dM/dt ||`` at the lifted state: the defect of invariance."""
    X = as_lifting_matrix(model, lifting, k)
    x = lift(model, X, macro, k).vector()
    dx = full_generator(model, k) @ x
    nM = model.dim_macro
    return float(np.linalg.norm(dx[nM:] - X @ dx[:nM]))


def invariance_defect(model, lifting, k, macro0, times=DEFAULT_TIMES):
    """Distance ``||mu(t) - X M(t)||`` of the exact trajectory from the manifold."""
    X = as_lifting_matrix(model, lifting, k)
    traj = propagate(model, k, lift(model, X, macro0, k), times)
    M, mu = traj.macro(), traj.micro()
    return np.linalg.norm(mu - M @ X.T, axis=1)


def commutative_diagram_error(model, lifting, k, macro0, times=DEFAULT_TIMES):
    """``||P exp(tG) lift(M0) - exp(tH) M0||`` at each time.

    ``H = ik (L_MM + L_Mmu X)`` is the reduced (hydrodynamic) generator.
    """
    X = as_lifting_matrix(model, lifting, k)
    t = _times(times)
    macro0 = np.asarray(macro0, dtype=complex)
    traj = propagate(model, k, lift(model, X, macro0, k), t)
    H = 1j * float(k) * (model.L_MM + model.L_Mmu @ X)
    reduced = propagator(H, t) @ macro0
    return np.linalg.norm(traj.macro() - reduced, axis=1)


def energy_ledger(k, A, B, p, u) -> EnergyLedger:
    """Mechanical ``3/5|p|^2 + |u|^2``, capillarity ``-3/5 k^2 B |p|^2``, rate ``k^2 A |u|^2``."""
    k2 = float(k) ** 2
    p2 = abs(complex(p)) ** 2
    u2 = abs(complex(u)) ** 2
    return EnergyLedger(0.6 * p2 + u2, -0.6 * k2 * B * p2, k2 * A * u2)


def energy_balance_series(trajectory: Trajectory, A, B, tol=1e-9, model=None):
    """``| dE/dt - 2 k^2 A |u|^2 |`` at each trajectory time.

    ``E`` is the mechanical plus capillarity energy and ``dE/dt`` is evaluated
    from the generator, not by differencing. The trajectory must belong to
    ``grad3_1d`` and start on the manifold ``sigma = ik A u - k^2 B p``
    (initial distance below ``tol``).
    """
    if trajectory.model_name != "grad3_1d":
        raise PreconditionError("energy balance applies to grad3_1d trajectories only")
    if model is None:
        model = build_model("grad3_1d")
    k = trajectory.k
    k2 = k * k
    p0, u0 = trajectory.states[0].macro
    s0 = trajectory.states[0].micro[0]
    off = abs(s0 - (1j * k * A * u0 - k2 * B * p0))
    if off > tol * max(1.0, abs(p0), abs(u0)):
        raise PreconditionError(f"trajectory does not start on the manifold (distance {off:.3e})")
    G = full_generator(model, k)
    W = np.array([0.6 * (1.0 - k2 * B), 1.0, 0.0])
    x = np.array([s.vector() for s in trajectory.states])
    dx = x @ G.T
    dE = 2.0 * np.real(np.sum(W * np.conj(x) * dx, axis=1))
    return np.abs(dE - 2.0 * k2 * A * np.abs(x[:, 1]) ** 2)


def energy_balance_residual(trajectory: Trajectory, A, B, tol=1e-9, model=None):
    """Maximum over time of :func:`energy_balance_series`."""
    return float(energy_balance_series(trajectory, A, B, tol, model).max())
