"""Chapman-Enskog coefficients.

For the three-moment model the closure is ``sigma_k = ik A(k^2) u_k - k^2 B(k^2) p_k``
and the Chapman-Enskog series is the Taylor series of ``A`` and ``B`` in
``y = k^2``. The coefficients follow order by order from the algebraic
invariance equations ``F = G = 0`` (see :func:`exacthydro.invariance.simple_residual`)::

    a[n+1] = -(5/3 b[n] + sum_m a[n-m] a[m])
    b[n+1] = a[n+1] - sum_m a[n-m] b[m]

and are kept as exact fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError, RelaxationSingularError

__all__ = [
    "CoefficientSeries",
    "GeneralCETerms",
    "simple_ce_coefficients",
    "general_ce_terms",
    "lifting_taylor_terms",
    "truncated_sum",
]


@dataclass(frozen=True)
class CoefficientSeries:
    a: tuple
    b: tuple

    @property
    def order(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class GeneralCETerms:
    """Matrices multiplying ``ik``, ``k^2`` and ``ik^3`` in the projected equation."""

    euler_op: np.ndarray
    navier_stokes_op: np.ndarray
    burnett_op: np.ndarray

    def generator(self, k, level="burnett"):
        """Reduced generator for the truncation ``level`` at wave number ``k``."""
        levels = ("euler", "navier_stokes", "burnett")
        if level not in levels:
            raise ValueError(f"level must be one of {levels}, got {level!r}")
        H = 1j * k * self.euler_op
        if level != "euler":
            H = H + k**2 * self.navier_stokes_op
        if level == "burnett":
            H = H + 1j * k**3 * self.burnett_op
        return H


def simple_ce_coefficients(n_max: int) -> CoefficientSeries:
    """Exact coefficients ``a_0..a_n_max`` and ``b_0..b_n_max``."""
    if n_max < 0:
        raise PreconditionError(f"n_max must be nonnegative, got {n_max}")
    five_thirds = Fraction(5, 3)
    a = [Fraction(-4, 3)]
    b = [Fraction(-4, 3)]
    for n in range(n_max):
        aa = sum((a[n - m] * a[m] for m in range(n + 1)), Fraction(0))
        ab = sum((a[n - m] * b[m] for m in range(n + 1)), Fraction(0))
        a_next = -(five_thirds * b[n] + aa)
        a.append(a_next)
        b.append(a_next - ab)
    return CoefficientSeries(tuple(a), tuple(b))


def _inv_relaxation(C):
    C = np.asarray(C, dtype=float)
    scale = max(1.0, np.abs(C).max())
    if abs(np.linalg.det(C / scale)) < 1e-12:
        raise RelaxationSingularError("relaxation block C is singular")
    return np.linalg.inv(C)


def general_ce_terms(model) -> GeneralCETerms:
    Ci = _inv_relaxation(model.C)
    ns = model.L_Mmu @ Ci @ model.L_muM
    burnett = model.L_Mmu @ Ci @ (
        Ci @ model.L_muM @ model.L_MM - model.L_mumu @ Ci @ model.L_muM
    )
    return GeneralCETerms(np.array(model.L_MM), ns, burnett)


def lifting_taylor_terms(model):
    """First Taylor terms of the lifting, ``X(k) = k X1 + k^2 X2 + O(k^3)``.

    ``X1 = X'(0)`` and ``X2 = X''(0) / 2``.
    """
    Ci = _inv_relaxation(model.C)
    X1 = -1j * Ci @ model.L_muM
    X2 = Ci @ (Ci @ model.L_muM @ model.L_MM - model.L_mumu @ Ci @ model.L_muM)
    return X1, X2.astype(complex)


def truncated_sum(series: CoefficientSeries, k2: float, order: int):
    """Partial sums of ``A`` and ``B`` through ``y**order``."""
    if not 0 <= order < series.order:
        raise PreconditionError(
            f"order {order} out of range for a series with {series.order} terms"
        )
    y = float(k2)
    A = B = 0.0
    # Horner from the top coefficient
    for n in range(order, -1, -1):
        A = A * y + float(series.a[n])
        B = B * y + float(series.b[n])
    return A, B
