"""Nonlinear viscosity factor ``R(g)`` of the one-dimensional Grad reduction.

The stress is ``sigma = -mu R(g) du/dx`` with ``g = mu (du/dx) / p`` and the
viscosity ``mu ~ T^gamma``. ``R`` solves::

    (1 - gamma) g^2 (1 - g R) R' + gamma g^2 R^2 + (3/2 + (2 - gamma) g) R - 2 = 0

with ``R(0) = 4/3``. ``gamma = 1`` (Maxwell molecules) makes it algebraic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, PreconditionError, SingularityError, SolverError

__all__ = [
    "ViscosityProfile",
    "METHODS",
    "DEFAULT_G_GRID",
    "viscosity_residual",
    "r_maxwell",
    "dr_maxwell",
    "r_burnett",
    "r_series",
    "r_beta_first_correction",
    "r_beta_expansion",
    "r_ode_solve",
    "local_singular_sigma",
]

METHODS = ("closed_form", "ode", "beta_expansion")

#: 401 points on [-2, 10]
DEFAULT_G_GRID = np.linspace(-2.0, 10.0, 401)

_G_START = 1e-3
_G_FAR = -1e6


@dataclass(frozen=True)
class ViscosityProfile:
    gamma: float
    g_values: np.ndarray
    r_values: np.ndarray
    method: str

    def __post_init__(self):
        g = np.asarray(self.g_values, dtype=float)
        r = np.asarray(self.r_values, dtype=float)
        if g.shape != r.shape:
            raise ValueError("g_values and r_values differ in length")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        object.__setattr__(self, "g_values", g)
        object.__setattr__(self, "r_values", r)


def _check_gamma(gamma):
    gamma = float(gamma)
    if not 0.5 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [1/2, 1], got {gamma}")
    return gamma


def viscosity_residual(gamma, g, R, dRdg):
    """Left-hand side of the invariance equation for ``R``."""
    g = np.asarray(g, dtype=float)
    R = np.asarray(R, dtype=float)
    return (
        (1.0 - gamma) * g * g * (1.0 - g * R) * dRdg
        + gamma * g * g * R * R
        + (1.5 + (2.0 - gamma) * g) * R
        - 2.0
    )


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def r_maxwell(g):
    """Positive root of ``g^2 R^2 + (3/2 + g) R - 2 = 0``.

    Written as ``4 / (3/2 + g + (3/2) sqrt(1 + 4g/3 + 4g^2))``, which equals the
    usual ``(-3 - 2g + 3 sqrt(...)) / (4 g^2)`` and is exact at ``g = 0``.
    """
    ga = np.asarray(g, dtype=float)
    s = np.sqrt(1.0 + (4.0 / 3.0) * ga + 4.0 * ga * ga)
    return _scalar_or_array(g, 4.0 / (1.5 + ga + 1.5 * s))


def dr_maxwell(g):
    """``dR/dg`` of :func:`r_maxwell` by implicit differentiation."""
    ga = np.asarray(g, dtype=float)
    R = r_maxwell(ga)
    out = -(2.0 * ga * R * R + R) / (2.0 * ga * ga * R + ga + 1.5)
    return _scalar_or_array(g, out)


def r_burnett(g, gamma=1.0):
    """Two-term truncation ``4/3 - 8(2 - gamma) g / 9``."""
    ga = np.asarray(g, dtype=float)
    return _scalar_or_array(g, 4.0 / 3.0 - 8.0 * (2.0 - gamma) / 9.0 * ga)


def r_series(g, gamma):
    """Quadratic Taylor polynomial of ``R`` at ``g = 0``."""
    r1 = -8.0 * (2.0 - gamma) / 9.0
    r2 = (-(3.0 - 2.0 * gamma) * r1 - 16.0 * gamma / 9.0) / 1.5
    ga = np.asarray(g, dtype=float)
    return _scalar_or_array(g, 4.0 / 3.0 + ga * (r1 + ga * r2))


def r_beta_first_correction(g):
    """First-order term ``R_1`` of ``R = R_MM + beta R_1 + ...``, ``beta = 1 - gamma``."""
    ga = np.asarray(g, dtype=float)
    R0 = r_maxwell(ga)
    den = 2.0 * ga * ga * R0 + ga + 1.5
    if np.any(np.abs(den) < 1e-14):
        bad = np.atleast_1d(ga)[np.abs(np.atleast_1d(den)) < 1e-14][0]
        raise SingularityError(f"denominator of R_1 vanishes at g={bad}", location=float(bad))
    out = -ga * (1.0 - ga * R0) * (R0 + ga * dr_maxwell(ga)) / den
    return _scalar_or_array(g, out)


def r_beta_expansion(g, gamma):
    """``R_MM + (1 - gamma) R_1``."""
    gamma = _check_gamma(gamma)
    ga = np.asarray(g, dtype=float)
    return _scalar_or_array(g, r_maxwell(ga) + (1.0 - gamma) * r_beta_first_correction(ga))


def _rhs(gamma):
    beta = 1.0 - gamma

    def f(g, y):
        R = y[0]
        num = gamma * g * g * R * R + (1.5 + (2.0 - gamma) * g) * R - 2.0
        return [-num / (beta * g * g * (1.0 - g * R))]

    def jac(g, y):
        R = y[0]
        num = gamma * g * g * R * R + (1.5 + (2.0 - gamma) * g) * R - 2.0
        dnum = 2.0 * gamma * g * g * R + 1.5 + (2.0 - gamma) * g
        den = beta * g * g * (1.0 - g * R)
        dden = -beta * g**3
        return [[-(dnum * den - num * dden) / (den * den)]]

    return f, jac


def _singular_event(g, y):
    return 1.0 - g * y[0]


_singular_event.terminal = True


def _integrate(gamma, g0, R0, g_end, g_eval, rtol, atol):
    f, jac = _rhs(gamma)
    sol = solve_ivp(
        f,
        (g0, g_end),
        [R0],
        method="Radau",
        t_eval=g_eval,
        jac=jac,
        rtol=rtol,
        atol=atol,
        events=_singular_event,
    )
    if sol.status == 1:
        loc = float(sol.t_events[0][0])
        raise SingularityError(
            f"coefficient (1 - gamma) g^2 (1 - gR) vanishes at g={loc:.6g}", location=loc
        )
    if sol.status != 0:
        g_last, r_last = float(sol.t[-1]), float(sol.y[0, -1])
        if abs(1.0 - g_last * r_last) < 1e-3:
            # step size collapsed against the singular line before the event fired
            raise SingularityError(
                f"coefficient (1 - gamma) g^2 (1 - gR) vanishes near g={g_last:.6g}",
                location=g_last,
            )
        raise SolverError(f"viscosity ODE failed: {sol.message}")
    return sol.y[0]


def r_ode_solve(gamma, g_values=None, rtol=1e-10, atol=1e-10) -> ViscosityProfile:
    """Solve for ``R`` on ``g_values`` (default :data:`DEFAULT_G_GRID`).

    For ``g > 0`` the solution is integrated outward from the Taylor polynomial
    at small ``g``; for ``g < 0`` it is the solution decaying like ``-2/g`` as
    ``g -> -inf``, integrated toward ``g = 0``. At ``gamma = 1`` the closed
    form is returned.
    """
    gamma = _check_gamma(gamma)
    g = DEFAULT_G_GRID if g_values is None else np.asarray(g_values, dtype=float).ravel()
    if g.size == 0 or not np.all(np.isfinite(g)):
        raise PreconditionError("g_values must be finite and nonempty")
    if g.size > 1 and not np.all(np.diff(g) > 0):
        raise PreconditionError("g_values must be strictly increasing")
    if gamma == 1.0:
        return ViscosityProfile(gamma, g, r_maxwell(g), "closed_form")
    if g[0] < _G_FAR:
        raise PreconditionError(f"g_values must be above {_G_FAR}")
    R = np.empty_like(g)
    near = np.abs(g) < _G_START
    R[near] = r_series(g[near], gamma)
    pos = g >= _G_START
    if pos.any():
        g0 = _G_START
        R[pos] = _integrate(gamma, g0, r_series(g0, gamma), g[pos][-1], g[pos], rtol, atol)
    neg = g <= -_G_START
    if neg.any():
        # R ~ -2/g far out; the forward flow contracts onto the selected solution
        R[neg] = _integrate(
            gamma, _G_FAR, -2.0 / _G_FAR, g[neg][-1], g[neg], rtol, atol
        )
    return ViscosityProfile(gamma, g, R, "ode")


def local_singular_sigma(du, mu0=1.0, n=1.0, ux_star=3.0 / 7.0):
    """Stress ``-mu0 n du / (1 + du/ux_star)`` of the local singular closure."""
    if not ux_star > 0:
        raise PreconditionError("ux_star must be positive")
    du = float(du)
    if not du > -ux_star:
        raise DomainError(
            f"du={du} at or below -ux_star={-ux_star}: infinite viscosity (solid jet)"
        )
    return -mu0 * n * du / (1.0 + du / ux_star)
