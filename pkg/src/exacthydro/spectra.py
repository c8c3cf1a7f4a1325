"""Dispersion relations, mode classification and hyperbolicity bounds.

Frequencies ``omega`` belong to modes ``exp(omega t + ikx)``; ``Re omega`` is the
attenuation rate. Branches are continued along a k grid by optimal
assignment of nearest frequencies between neighbouring grid points.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import linear_sum_assignment

from .errors import CriticalPointError, PreconditionError, SolverError
from .invariance import (
    BURNETT_13,
    LiftingCoefficients,
    SIMPLE_CLOSURES,
    grad13_sweep,
    lateral_solve,
    lifting_matrix,
    simple_closure,
    simple_exact_x,
)
from .models import build_model, full_generator

__all__ = [
    "DispersionSpectrum",
    "HYDRODYNAMIC",
    "NON_HYDRODYNAMIC",
    "simple_exact_dispersion",
    "truncated_dispersion",
    "simple_closure_dispersion",
    "track_branches",
    "kinetic_spectrum",
    "reduced_generator",
    "closure_spectrum",
    "grad13_hydro_dispersion",
    "nonlocal_generator",
    "nonlocal_closure_dispersion",
    "closure_lifting",
    "hyperbolicity_bound",
]

HYDRODYNAMIC = "hydrodynamic"
NON_HYDRODYNAMIC = "non_hydrodynamic"


@dataclass(frozen=True)
class DispersionSpectrum:
    """Frequencies on a k grid, one column per tracked branch."""

    k_values: np.ndarray
    omega: np.ndarray
    labels: tuple

    def __post_init__(self):
        k = np.asarray(self.k_values, dtype=float)
        w = np.asarray(self.omega, dtype=complex)
        if w.ndim != 2 or w.shape[0] != k.size:
            raise ValueError(f"omega has shape {w.shape}, expected ({k.size}, n_modes)")
        if len(self.labels) != w.shape[1]:
            raise ValueError("one label per branch is required")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n_branches(self) -> int:
        return self.omega.shape[1]

    def branch(self, i):
        return self.omega[:, i]

    def hydrodynamic(self):
        """Columns of the hydrodynamic branches."""
        idx = [i for i, lab in enumerate(self.labels) if lab == HYDRODYNAMIC]
        return self.omega[:, idx]

    def rows(self):
        """``(k, branch_id, label, omega)`` in grid order, then branch order."""
        for j, k in enumerate(self.k_values):
            for i, lab in enumerate(self.labels):
                yield float(k), i, lab, complex(self.omega[j, i])


# --------------------------------------------------------------------------
# three-moment model, closed forms


def simple_exact_dispersion(k: float):
    """``(omega_plus, omega_minus)`` of the exactly summed three-moment hydrodynamics."""
    k = float(k)
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    X = simple_exact_x(k * k)
    re = X / (2.0 * (1.0 - X))
    # 5X^2 - 16X + 20 has no real roots, so the root is real
    im = 0.5 * abs(k) * math.sqrt((5.0 * X * X - 16.0 * X + 20.0) / 3.0)
    return complex(re, im), complex(re, -im)


def truncated_dispersion(level: str, k: float):
    """``(omega_plus, omega_minus)`` of the truncated Chapman-Enskog hydrodynamics."""
    k = float(k)
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    k2 = k * k
    ak = abs(k)
    if level == "navier_stokes":
        re, rad, scale = -2.0 / 3.0 * k2, 15.0 - 4.0 * k2, ak / 3.0
    elif level == "burnett":
        re, rad, scale = -2.0 / 3.0 * k2, 15.0 + 16.0 * k2, ak / 3.0
    elif level == "super_burnett":
        re = 2.0 / 9.0 * k2 * (k2 - 3.0)
        rad = 135.0 + 144.0 * k2 + 24.0 * k2 * k2 - 4.0 * k2**3
        scale = ak / 9.0
    else:
        raise PreconditionError(
            f"level must be navier_stokes, burnett or super_burnett, got {level!r}"
        )
    s = 1j * scale * cmath.sqrt(rad)
    return complex(re + s), complex(re - s)


def simple_closure_dispersion(A: float, B: float, k: float):
    """Roots of ``omega^2 - k^2 A omega + 5/3 k^2 (1 - k^2 B) = 0``."""
    k2 = float(k) ** 2
    half = 0.5 * k2 * A
    s = cmath.sqrt(half * half - 5.0 / 3.0 * k2 * (1.0 - k2 * B))
    wp, wm = half + s, half - s
    if wp.imag < wm.imag:
        wp, wm = wm, wp
    return complex(wp), complex(wm)


# --------------------------------------------------------------------------
# branch tracking


def track_branches(rows):
    """Reorder each row so that column ``i`` follows one continuous branch.

    ``rows`` is a sequence of equally sized frequency sets; the first row fixes
    the branch order.
    """
    W = np.array([np.asarray(r, dtype=complex) for r in rows])
    if W.ndim != 2:
        raise PreconditionError("all frequency sets must have the same size")
    out = W.copy()
    for j in range(1, W.shape[0]):
        cost = np.abs(out[j - 1][:, None] - W[j][None, :])
        _, cols = linear_sum_assignment(cost)
        out[j] = W[j][cols]
    return out


def _grid(k_grid):
    k = np.asarray(k_grid, dtype=float).ravel()
    if k.size == 0:
        raise PreconditionError("k grid is empty")
    if not np.all(np.isfinite(k)):
        raise PreconditionError("k grid must be finite")
    if k.size > 1 and not np.all(np.diff(k) > 0):
        raise PreconditionError("k grid must be strictly increasing")
    return k


def _labels(first_row, k_min, label_tol):
    tol = 10.0 * abs(k_min) + 1e-10 if label_tol is None else label_tol
    return tuple(HYDRODYNAMIC if abs(w) < tol else NON_HYDRODYNAMIC for w in first_row)


def _sorted(w):
    # deterministic seed order for the first grid point
    return np.array(sorted(w, key=lambda z: (round(z.real, 12), round(z.imag, 12))))


def kinetic_spectrum(model, k_grid, label_tol=None) -> DispersionSpectrum:
    """All eigenvalues of the full generator along ``k_grid``, tracked by branch."""
    k = _grid(k_grid)
    rows = []
    for kj in k:
        try:
            w = np.linalg.eigvals(full_generator(model, kj))
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"eigenvalue solver failed at k={kj}: {exc}") from exc
        rows.append(w)
    rows[0] = _sorted(rows[0])
    W = track_branches(rows)
    return DispersionSpectrum(k, W, _labels(W[0], k[0], label_tol))


# --------------------------------------------------------------------------
# closures and reduced generators


def reduced_generator(model, X, k):
    """``H(k) = ik [L_MM + L_Mmu X(k)]`` of the hydrodynamics lifted by ``X``."""
    return 1j * float(k) * (model.L_MM + model.L_Mmu @ np.asarray(X, dtype=complex))


def grad13_hydro_dispersion(c, k):
    """Roots of the cubic dispersion equation of the Grad-13 hydrodynamics."""
    v = c.values if isinstance(c, LiftingCoefficients) else c
    A, B, C, X, Y, Z = (v[n] for n in ("A", "B", "C", "X", "Y", "Z"))
    k2 = float(k) ** 2
    k4 = k2 * k2
    coeffs = [
        1.0,
        -k2 * (2.0 / 3.0 * Y + A),
        k2
        * (
            5.0 / 3.0
            - 2.0 / 3.0 * k2 * Z
            - 2.0 / 3.0 * k2 * C
            - k2 * B
            + 2.0 / 3.0 * k2 * A * Y
            + 2.0 / 3.0 * k4 * C * Z
        ),
        2.0 / 3.0 * k2 * (k2 * X - k2 * Y + k4 * B * Y - k4 * X * C),
    ]
    if k2 == 0.0:
        return np.zeros(3, complex)
    return np.roots(coeffs).astype(complex)


def nonlocal_generator(k):
    """3x3 generator for ``(rho, u, T)`` with the frequency-response closure."""
    return reduced_generator(build_model("grad13_1d"), _nonlocal_X(k), k)


def nonlocal_closure_dispersion(k):
    """Frequencies of the frequency-response nonlocal closure at ``k``."""
    k = float(k)
    if k < 0:
        raise PreconditionError("k must be nonnegative")
    return np.linalg.eigvals(nonlocal_generator(k))


def closure_lifting(model_name: str, closure: str):
    """Callable ``k -> X(k)`` for a named closure of a catalog model.

    Solver-based closures of the Grad-13 model are solved once per call of
    the returned function on a grid; use :func:`closure_spectrum` for sweeps.
    """
    if model_name == "grad3_1d":
        if closure not in SIMPLE_CLOSURES:
            raise PreconditionError(
                f"closure {closure!r} not available for grad3_1d; "
                f"valid: {', '.join(SIMPLE_CLOSURES)}"
            )
        return lambda k: lifting_matrix(simple_closure(closure, float(k) ** 2), k)
    if model_name == "grad13_1d":
        if closure == "euler":
            return lambda k: np.zeros((2, 3), complex)
        if closure == "navier-stokes":
            vals = {"A": -4 / 3, "B": 0.0, "C": 0.0, "X": 0.0, "Y": -15 / 4, "Z": 0.0}
        elif closure == "burnett":
            vals = dict(BURNETT_13)
        elif closure == "nonlocal":
            return _nonlocal_X
        elif closure == "exact":
            return _grad13_exact_lifting
        else:
            raise PreconditionError(
                f"closure {closure!r} not available for grad13_1d; valid: "
                "euler, navier-stokes, burnett, nonlocal, exact"
            )
        return lambda k: lifting_matrix(LiftingCoefficients("grad13_1d", float(k) ** 2, vals), k)
    if model_name == "grad13_lateral":
        if closure == "euler":
            return lambda k: np.zeros((2, 1), complex)
        if closure == "exact":
            return lambda k: lifting_matrix(lateral_solve(float(k) ** 2), k)
        raise PreconditionError(
            f"closure {closure!r} not available for grad13_lateral; valid: euler, exact"
        )
    raise PreconditionError(f"unknown model {model_name!r}")


def _nonlocal_X(k):
    # sigma = -(2/3)(2ik u + 3k^2 T)/d, q = -(5/4)(3ik T + (8/5) k^2 u)/d
    k2 = float(k) ** 2
    d = 1.0 + 0.4 * k2
    ik = 1j * float(k)
    return np.array(
        [
            [0.0, -4.0 / 3.0 * ik / d, -2.0 * k2 / d],
            [0.0, -2.0 * k2 / d, -15.0 / 4.0 * ik / d],
        ]
    )


def _grad13_exact_lifting(k):
    k = abs(float(k))
    if k == 0.0:
        return np.zeros((2, 3), complex)
    res = grad13_sweep([k])
    if res.termination != "completed":
        raise CriticalPointError(
            f"k={k} lies beyond the critical wave number {res.critical_k:.6g}",
            critical_k=res.critical_k,
        )
    return lifting_matrix(res.samples[-1], k)


def closure_spectrum(model_name: str, closure: str, k_grid, label_tol=None) -> DispersionSpectrum:
    """Hydrodynamic frequencies of a closure along ``k_grid``.

    ``closure="kinetic"`` returns the full kinetic spectrum instead.
    """
    model = build_model(model_name)
    k = _grid(k_grid)
    if closure == "kinetic":
        return kinetic_spectrum(model, k, label_tol)
    if model_name == "grad13_1d" and closure == "exact":
        Xs = _grad13_exact_sweep(k)
    else:
        lift = closure_lifting(model_name, closure)
        Xs = [lift(kj) for kj in k]
    rows = [np.linalg.eigvals(reduced_generator(model, X, kj)) for kj, X in zip(k, Xs)]
    rows[0] = _sorted(rows[0])
    W = track_branches(rows)
    return DispersionSpectrum(k, W, (HYDRODYNAMIC,) * W.shape[1])


def _grad13_exact_sweep(k):
    pos = k[k > 0]
    res = grad13_sweep(pos) if pos.size else None
    if res is not None and res.termination != "completed":
        raise CriticalPointError(
            f"grid reaches k={pos[-1]:.6g} beyond the critical wave number "
            f"{res.critical_k:.6g}",
            critical_k=res.critical_k,
        )
    by_k = {} if res is None else {s.k2: s for s in res.samples}
    out = []
    for kj in k:
        if kj == 0:
            out.append(np.zeros((2, 3), complex))
        else:
            out.append(lifting_matrix(by_k[float(kj) ** 2], kj))
    return out


# --------------------------------------------------------------------------
# hyperbolicity


def _expm_norm(H, t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            E = expm(t * H)
        except (OverflowError, ValueError, np.linalg.LinAlgError):
            return math.inf
        if not np.all(np.isfinite(E)):
            return math.inf
        return float(np.linalg.norm(E, 2))


def hyperbolicity_bound(model, lifting_source, k_grid, t: float):
    """``(sup_k ||exp(t H(k))||_2, sup_k ||X(k)||_2)`` over ``k_grid``.

    ``lifting_source`` is a closure name understood by :func:`closure_lifting`
    (for ``grad3_1d``: ``exact``, ``matched``, ``newton1``, ``super-burnett``...)
    or a callable ``k -> X(k)``.
    """
    if not t > 0:
        raise PreconditionError("t must be positive")
    k = _grid(k_grid)
    if callable(lifting_source):
        Xs = [lifting_source(kj) for kj in k]
    elif model.name == "grad13_1d" and lifting_source == "exact":
        Xs = _grad13_exact_sweep(k)
    else:
        lift = closure_lifting(model.name, lifting_source)
        Xs = [lift(kj) for kj in k]
    sup_exp = 0.0
    sup_x = 0.0
    for kj, X in zip(k, Xs):
        sup_x = max(sup_x, float(np.linalg.norm(X, 2)))
        sup_exp = max(sup_exp, _expm_norm(reduced_generator(model, X, kj), t))
    return sup_exp, sup_x
