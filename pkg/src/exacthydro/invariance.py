"""Solvers for the algebraic invariance equations.

Three-moment model (``grad3_1d``): closure ``sigma = ik A u - k^2 B p``.
Grad-13 1D (``grad13_1d``)::

    sigma = ik A u - k^2 B rho - k^2 C T
    q     = ik X rho + ik Y T - k^2 Z u

Lateral modes (``grad13_lateral``): ``sigma = ik D u``, ``q = -k^2 U u``.

The general form works on the lifting matrix ``X(k)`` with ``mu = X(k) M``.
Throughout, the Chapman-Enskog branch is the one continuous from the
``k = 0`` solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chapman_enskog import _inv_relaxation
from .errors import (
    BranchError,
    DivergenceError,
    EntanglementError,
    IterationFailure,
    PreconditionError,
    SolverError,
)

__all__ = [
    "LiftingCoefficients",
    "ContinuationResult",
    "GeneralLifting",
    "COEFFICIENT_NAMES",
    "BURNETT_13",
    "simple_residual",
    "simple_jacobian",
    "simple_exact",
    "simple_newton",
    "simple_matched",
    "simple_infinity_series",
    "SIMPLE_CLOSURES",
    "simple_closure",
    "grad13_residual",
    "grad13_jacobian",
    "grad13_newton",
    "grad13_newton_first",
    "grad13_solve",
    "grad13_sweep",
    "lateral_residual",
    "lateral_solve",
    "general_residual",
    "general_newton_step",
    "general_invariance_newton",
    "general_real_residual",
    "lifting_matrix",
    "coefficients_from_lifting",
]

COEFFICIENT_NAMES = {
    "grad3_1d": ("A", "B"),
    "grad13_1d": ("A", "B", "C", "X", "Y", "Z"),
    "grad13_lateral": ("D", "U"),
}

#: Zeroth-order (Burnett) solution of the Grad-13 invariance system.
#: With ``q = ... - k^2 Z u`` the Burnett heat flux ``+7/4 k^2 u`` means ``Z = -7/4``.
BURNETT_13 = {"A": -4 / 3, "B": -4 / 3, "C": 2 / 3, "X": 0.0, "Y": -15 / 4, "Z": -7 / 4}


@dataclass(frozen=True)
class LiftingCoefficients:
    model_name: str
    k2: float
    values: dict
    residual_norm: float = 0.0

    def __getitem__(self, name):
        return self.values[name]

    def as_array(self):
        return np.array([self.values[n] for n in COEFFICIENT_NAMES[self.model_name]])

    @property
    def k(self):
        return math.sqrt(self.k2)


@dataclass(frozen=True)
class ContinuationResult:
    samples: tuple
    critical_k: float | None = None
    termination: str = "completed"
    bracket: tuple | None = None

    def __post_init__(self):
        if self.termination not in ("completed", "critical_point_found"):
            raise ValueError(f"bad termination {self.termination!r}")
        if (self.critical_k is None) != (self.termination == "completed"):
            raise ValueError("critical_k must be present iff a critical point was found")

    @property
    def k_values(self):
        return np.array([s.k for s in self.samples])


@dataclass(frozen=True)
class GeneralLifting:
    model_name: str
    k: float
    X: np.ndarray
    residual_norm: float = 0.0
    iterations: int = 0


# --------------------------------------------------------------------------
# three-moment model


def simple_residual(A, B, k2):
    F = -A - 4.0 / 3.0 - k2 * (5.0 / 3.0 * B + A * A)
    G = -B + A * (1.0 - k2 * B)
    return F, G


def simple_jacobian(A, B, k2):
    return np.array(
        [
            [-(1.0 + 2.0 * k2 * A), -5.0 / 3.0 * k2],
            [1.0 - k2 * B, -(1.0 + k2 * A)],
        ]
    )


def _simple_coeffs(A, B, k2):
    F, G = simple_residual(A, B, k2)
    return LiftingCoefficients(
        "grad3_1d", float(k2), {"A": float(A), "B": float(B)}, float(max(abs(F), abs(G)))
    )


def _check_k2(k2):
    k2 = float(k2)
    if not (k2 >= 0.0 and math.isfinite(k2)):
        raise PreconditionError(f"k2 must be finite and nonnegative, got {k2}")
    return k2


def _cubic_x(X, k2):
    # k2 times the cubic: -5/3 k2 (X-1)^2 (X+4/5) - X
    return -5.0 / 3.0 * k2 * (X - 1.0) ** 2 * (X + 0.8) - X


def simple_exact(k2: float) -> LiftingCoefficients:
    """Exact closure on the Chapman-Enskog branch.

    ``X = k^2 B`` is the unique real root of the cubic in ``(-4/5, 0)``,
    found by bisection; ``B = X/k^2`` and ``A = B/(1 - X)``.
    """
    k2 = _check_k2(k2)
    if k2 == 0.0:
        return _simple_coeffs(-4.0 / 3.0, -4.0 / 3.0, 0.0)
    lo, hi = -0.8, 0.0  # f(lo) > 0 > f(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi) or hi - lo <= 1e-14 * max(abs(mid), 1e-300):
            break
        if _cubic_x(mid, k2) > 0.0:
            lo = mid
        else:
            hi = mid
    X = 0.5 * (lo + hi)
    B = X / k2
    A = B / (1.0 - X)
    return _simple_coeffs(A, B, k2)


def simple_exact_x(k2: float) -> float:
    """The root ``X(k^2) = k^2 B(k^2)``."""
    c = simple_exact(k2)
    return c.k2 * c["B"]


def simple_newton(k2: float, iterations: int) -> LiftingCoefficients:
    """Newton iterate number ``iterations`` started from the Euler closure ``A = B = 0``."""
    k2 = _check_k2(k2)
    if iterations < 0:
        raise PreconditionError("iterations must be nonnegative")
    A = B = 0.0
    for it in range(iterations):
        J = simple_jacobian(A, B, k2)
        F, G = simple_residual(A, B, k2)
        det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
        if det == 0.0 or not math.isfinite(det):
            raise IterationFailure(
                f"singular Newton matrix at k2={k2}, iteration {it}", k2=k2, iterate=(A, B)
            )
        # Cramer's rule for J d = -(F, G)
        dA = (-F * J[1, 1] + G * J[0, 1]) / det
        dB = (-G * J[0, 0] + F * J[1, 0]) / det
        A += dA
        B += dB
    return _simple_coeffs(A, B, k2)


def simple_matched(k2: float) -> LiftingCoefficients:
    """Navier-Stokes limit matched to the leading short-wave term."""
    k2 = _check_k2(k2)
    return _simple_coeffs(-4.0 / (3.0 + 9.0 * k2), -4.0 / (3.0 + 5.0 * k2), k2)


def simple_infinity_series(order: int):
    """Coefficients of ``A = sum alpha_l s^l``, ``B = sum beta_l s^l`` in ``s = 1/k^2``.

    Returns two tuples of fractions, ``alpha[0]`` being ``alpha_1``.
    """
    if order < 1:
        raise PreconditionError("order must be at least 1")
    alpha = [Fraction(0)]  # alpha_0 = 0 keeps the lifting bounded
    beta = [Fraction(0)]
    for n in range(1, order + 1):
        conv = sum((alpha[i] * alpha[n - i] for i in range(1, n)), Fraction(0))
        src = Fraction(-4, 3) if n == 1 else Fraction(0)
        beta.append(Fraction(3, 5) * (src - alpha[n - 1] - conv))
        rest = sum((alpha[i] * beta[n + 1 - i] for i in range(1, n)), Fraction(0))
        alpha.append((-beta[n] - rest) / (beta[1] - 1))
    return tuple(alpha[1:]), tuple(beta[1:])


SIMPLE_CLOSURES = (
    "euler",
    "navier-stokes",
    "burnett",
    "super-burnett",
    "newton1",
    "newton2",
    "matched",
    "exact",
)


def simple_closure(name: str, k2: float) -> LiftingCoefficients:
    """Coefficients ``(A, B)`` of a named three-moment closure at ``k2``."""
    k2 = _check_k2(k2)
    if name == "exact":
        return simple_exact(k2)
    if name == "matched":
        return simple_matched(k2)
    if name in ("newton1", "newton2"):
        return simple_newton(k2, int(name[-1]))
    # truncated Chapman-Enskog closures
    table = {
        "euler": (0.0, 0.0),
        "navier-stokes": (-4.0 / 3.0, 0.0),
        "burnett": (-4.0 / 3.0, -4.0 / 3.0),
        "super-burnett": (-4.0 / 3.0 + 4.0 / 9.0 * k2, -4.0 / 3.0),
    }
    if name not in table:
        raise PreconditionError(
            f"unknown closure {name!r}; valid: {', '.join(SIMPLE_CLOSURES)}"
        )
    return _simple_coeffs(*table[name], k2)


# --------------------------------------------------------------------------
# Grad-13, longitudinal


def _unpack13(c):
    if isinstance(c, LiftingCoefficients):
        c = c.values
    if isinstance(c, dict):
        missing = set(COEFFICIENT_NAMES["grad13_1d"]) - set(c)
        if missing:
            raise PreconditionError(f"missing Grad-13 coefficients {sorted(missing)}")
        return tuple(c[n] for n in COEFFICIENT_NAMES["grad13_1d"])
    return tuple(c)


def grad13_residual(c, k2):
    """The six invariance residuals ``F1..F6`` for coefficients ``A..Z``."""
    A, B, C, X, Y, Z = _unpack13(c)
    k4 = k2 * k2
    return np.array(
        [
            -4 / 3 - A - k2 * (A * A + B - 8 * Z / 15 + 2 * C / 3) + 2 / 3 * k4 * C * Z,
            8 / 15 * X + B - A + k2 * A * B + 2 / 3 * k2 * C * X,
            8 / 15 * Y + C - A + k2 * A * C + 2 / 3 * k2 * C * Y,
            A + 2 / 3 * Z + k2 * Z * A - X - 2 / 3 * Y + 2 / 3 * k2 * Y * Z,
            k2 * B - 2 / 3 * X - k2 * Z + k4 * Z * B - 2 / 3 * k2 * Y * X,
            -5 / 2 - 2 / 3 * Y + k2 * (C - Z) + k4 * Z * C - 2 / 3 * k2 * Y * Y,
        ]
    )


def grad13_jacobian(c, k2):
    """Jacobian of :func:`grad13_residual` by complex-step differentiation."""
    x = np.asarray(_unpack13(c), dtype=float)
    h = 1e-30
    J = np.empty((6, 6))
    for j in range(6):
        xc = x.astype(complex)
        xc[j] += 1j * h
        J[:, j] = grad13_residual(xc, k2).imag / h
    return J


def _coeffs13(x, k2, res=None):
    if res is None:
        res = np.abs(grad13_residual(x, k2)).max()
    vals = {n: float(v) for n, v in zip(COEFFICIENT_NAMES["grad13_1d"], x)}
    return LiftingCoefficients("grad13_1d", float(k2), vals, float(res))


def grad13_newton_first(k2: float, printed: bool = False) -> LiftingCoefficients:
    """First Newton iterate from zero, as closed-form rational functions.

    The published ``Y_1`` numerator reads ``394 k^4``; one Newton step from
    zero gives ``359 k^4``. ``printed=True`` evaluates the published form.
    """
    k2 = _check_k2(k2)
    y, y2, y3 = k2, k2 * k2, k2**3
    d2 = 867 * y2 + 2105 * y + 300
    d3 = 3468 * y3 + 12755 * y2 + 11725 * y + 1500
    y_quartic = 394 if printed else 359
    x = [
        -20 * (141 * y + 20) / d2,
        -20 * (459 * y2 + 810 * y + 100) / d3,
        -10 * (51 * y2 - 485 * y - 100) / d3,
        -375 * y * (21 * y - 5) / (2 * d3),
        -225 * (y_quartic * y2 + 685 * y + 100) / (4 * d3),
        -15 * (153 * y + 35) / d2,
    ]
    return _coeffs13(x, k2)


def grad13_newton(k2, start=None, tol=1e-12, max_iter=50, max_step=None):
    """Newton iteration on the six-equation system.

    ``start`` defaults to the Burnett values. Raises :class:`DivergenceError`
    when the residual does not fall below ``tol`` and
    :class:`EntanglementError` when the Newton matrix is singular.
    ``max_step`` bounds the accumulated distance from ``start``; exceeding it
    counts as leaving the branch.
    """
    k2 = _check_k2(k2)
    x0 = np.array(_unpack13(start if start is not None else BURNETT_13), dtype=float)
    x = x0.copy()
    res = grad13_residual(x, k2)
    rnorm = np.abs(res).max()
    for it in range(max_iter):
        if rnorm < tol:
            return _coeffs13(x, k2, rnorm)
        J = grad13_jacobian(x, k2)
        if np.linalg.cond(J) > 1e14:
            raise EntanglementError(f"singular Grad-13 Newton matrix at k2={k2}")
        x = x - np.linalg.solve(J, res)
        if not np.all(np.isfinite(x)):
            break
        if max_step is not None and np.abs(x - x0).max() > max_step:
            raise BranchError(f"Newton left the branch at k2={k2}")
        res = grad13_residual(x, k2)
        rnorm = np.abs(res).max()
    if rnorm < tol:
        return _coeffs13(x, k2, rnorm)
    raise DivergenceError(
        f"Grad-13 Newton did not converge at k2={k2} (residual {rnorm:.3e})", residual=rnorm
    )


def grad13_solve(k_grid, tol=1e-12, bracket_tol=1e-5, max_iter=50) -> ContinuationResult:
    """Continuation of the Chapman-Enskog branch along an increasing ``k`` grid.

    Starts from the Burnett values at the smallest ``k``. At the first
    ``k`` where no real solution is reached, the interval between the last
    good and first bad ``k`` is bisected to ``bracket_tol``.
    """
    ks = np.asarray(k_grid, dtype=float)
    if ks.ndim != 1 or ks.size == 0:
        raise PreconditionError("k_grid must be a nonempty 1D sequence")
    if np.any(ks <= 0) or np.any(np.diff(ks) <= 0):
        raise PreconditionError("k_grid must be positive and strictly increasing")
    if ks[0] >= 0.25:
        raise PreconditionError("k_grid must start below 0.25")

    def step(k, prev):
        scale = 0.5 * (1.0 + np.abs(prev).max())
        return grad13_newton(k * k, prev, tol=tol, max_iter=max_iter, max_step=scale)

    samples = []
    prev = np.array(_unpack13(BURNETT_13))
    for k in ks:
        try:
            sol = step(k, prev)
        except SolverError:
            if k < 0.25:
                raise
            break
        samples.append(sol)
        prev = sol.as_array()
    else:
        return ContinuationResult(tuple(samples))

    if not samples:
        raise SolverError("no converged point on the grid")
    good_k, bad_k = samples[-1].k, k
    good_x = samples[-1].as_array()
    while bad_k - good_k > bracket_tol:
        mid = 0.5 * (good_k + bad_k)
        try:
            good_x = step(mid, good_x).as_array()
            good_k = mid
        except SolverError:
            bad_k = mid
    return ContinuationResult(
        tuple(samples),
        critical_k=0.5 * (good_k + bad_k),
        termination="critical_point_found",
        bracket=(good_k, bad_k),
    )


def grad13_sweep(k_values, tol=1e-12) -> ContinuationResult:
    """Chapman-Enskog branch at arbitrary positive increasing ``k_values``.

    Like :func:`grad13_solve` but pads the continuation with points below
    the first requested ``k`` when needed; only requested points are
    returned.
    """
    ks = np.asarray(k_values, dtype=float).ravel()
    if ks.size == 0 or np.any(ks <= 0) or np.any(np.diff(ks) <= 0):
        raise PreconditionError("k_values must be positive and strictly increasing")
    pad = np.arange(0.01, min(ks[0], 0.25), 0.01) if ks[0] >= 0.01 else np.array([])
    pad = pad[pad < ks[0]]
    grid = np.concatenate([pad, ks])
    res = grad13_solve(grid, tol=tol)
    wanted = set(ks.tolist())
    kept = tuple(smp for smp, kk in zip(res.samples, grid) if kk in wanted)
    return ContinuationResult(kept, res.critical_k, res.termination, res.bracket)


# --------------------------------------------------------------------------
# Grad-13, lateral


def lateral_residual(D, U, k2):
    """Residuals of the cubic for ``D`` and of the relation for ``U``."""
    cubic = 15 * k2 * k2 * D**3 + 25 * k2 * D * D + (10 + 21 * k2) * D + 10
    rel = U * (2 + 3 * k2 * D) + 3 * D
    return cubic, rel


def lateral_solve(k2: float) -> LiftingCoefficients:
    """Real root ``D`` with ``D(0) = -1`` and ``U = -3D/(2 + 3 k^2 D)``.

    The cubic is solved for ``d = k^2 D``, whose branch starting at ``d = 0``
    is the largest real root; it is then polished by Newton in ``D``.
    """
    k2 = _check_k2(k2)
    if k2 == 0.0:
        D = -1.0
    else:
        roots = np.roots([15.0, 25.0, 10.0 + 21.0 * k2, 10.0 * k2])
        real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots))].real
        if real.size == 0:
            raise BranchError(f"no real root for the lateral cubic at k2={k2}")
        D = real.max() / k2
        for _ in range(8):
            f = 15 * k2 * k2 * D**3 + 25 * k2 * D * D + (10 + 21 * k2) * D + 10
            df = 45 * k2 * k2 * D * D + 50 * k2 * D + 10 + 21 * k2
            D -= f / df
    den = 2.0 + 3.0 * k2 * D
    if den == 0.0:
        raise BranchError(f"U is singular at k2={k2}")
    U = -3.0 * D / den
    res = max(abs(r) for r in lateral_residual(D, U, k2))
    return LiftingCoefficients("grad13_lateral", k2, {"D": float(D), "U": float(U)}, float(res))


# --------------------------------------------------------------------------
# general linear model


def general_residual(model, k, X):
    """``X - ik C^-1 [-L_muM + X L_MM - L_mumu X + X L_Mmu X]``."""
    Ci = _inv_relaxation(model.C)
    X = np.asarray(X, dtype=complex)
    inner = -model.L_muM + X @ model.L_MM - model.L_mumu @ X + X @ model.L_Mmu @ X
    return X - 1j * k * (Ci @ inner)


def _general_jacobian(model, k, X, Ci):
    # column-major vec: vec(P H Q) = (Q^T kron P) vec(H)
    nm, nM = X.shape
    Im, IM = np.eye(nm), np.eye(nM)
    T = (
        np.kron(model.L_MM.T, Ci)
        - np.kron(IM, Ci @ model.L_mumu)
        + np.kron((model.L_Mmu @ X).T, Ci)
        + np.kron(IM, Ci @ X @ model.L_Mmu)
    )
    return np.eye(nm * nM) - 1j * k * T


def general_newton_step(model, k, X):
    """One Newton step for the lifting matrix."""
    Ci = _inv_relaxation(model.C)
    X = np.asarray(X, dtype=complex)
    k = float(k)
    J = _general_jacobian(model, k, X, Ci)
    if np.linalg.cond(J) > 1e14:
        raise EntanglementError(
            f"singular Newton system for {model.name} at k={k} (branch lost)"
        )
    R = general_residual(model, k, X)
    dx = np.linalg.solve(J, R.reshape(-1, order="F"))
    return X - dx.reshape(X.shape, order="F")


def general_invariance_newton(model, k, X0=None, max_iter=50, tol=1e-12) -> GeneralLifting:
    """Newton iteration for the lifting matrix, to residual below ``tol``."""
    if tol <= 0:
        raise PreconditionError("tol must be positive")
    shape = (model.dim_micro, model.dim_macro)
    X = np.zeros(shape, complex) if X0 is None else np.array(X0, dtype=complex)
    if X.shape != shape:
        raise PreconditionError(f"X0 has shape {X.shape}, expected {shape}")
    k = float(k)
    rnorm = np.abs(general_residual(model, k, X)).max()
    it = 0
    while it < max_iter and rnorm >= tol:
        X = general_newton_step(model, k, X)
        rnorm = np.abs(general_residual(model, k, X)).max()
        it += 1
        if not math.isfinite(rnorm):
            break
    if not rnorm < tol:
        raise DivergenceError(
            f"{model.name}: no convergence at k={k} after {it} steps "
            f"(residual {rnorm:.3e})",
            residual=rnorm,
        )
    return GeneralLifting(model.name, k, X, float(rnorm), it)


def general_real_residual(model, k, X):
    """Residuals of the real-form equations for ``X = ik A + k^2 B``.

    Returns ``(res_A, res_B)``; both vanish when ``X`` solves the complex
    invariance equation and has the odd/even structure.
    """
    X = np.asarray(X, dtype=complex)
    k = float(k)
    if k == 0.0:
        raise PreconditionError("real form needs k != 0")
    k2 = k * k
    # ik A carries the imaginary part, k^2 B the real part
    A = X.imag / k
    B = X.real / k2
    Ci = _inv_relaxation(model.C)
    LMM, LMm, LmM, Lmm = model.L_MM, model.L_Mmu, model.L_muM, model.L_mumu
    rhs_A = Ci @ (
        -LmM + k2 * (B @ LMM - Lmm @ B) - k2 * A @ LMm @ A + k2 * k2 * B @ LMm @ B
    )
    rhs_B = -Ci @ ((A @ LMM - Lmm @ A) + k2 * A @ LMm @ B + k2 * B @ LMm @ A)
    return A - rhs_A, B - rhs_B


# --------------------------------------------------------------------------
# coefficients <-> lifting matrix


def lifting_matrix(c: LiftingCoefficients, k=None) -> np.ndarray:
    """Lifting matrix ``X(k)`` built from named coefficients.

    ``k`` defaults to ``+sqrt(k2)``; pass a negative value for the mirror mode.
    """
    k = c.k if k is None else float(k)
    k2 = k * k
    ik = 1j * k
    v = c.values
    if c.model_name == "grad3_1d":
        return np.array([[-k2 * v["B"], ik * v["A"]]])
    if c.model_name == "grad13_1d":
        return np.array(
            [
                [-k2 * v["B"], ik * v["A"], -k2 * v["C"]],
                [ik * v["X"], -k2 * v["Z"], ik * v["Y"]],
            ]
        )
    if c.model_name == "grad13_lateral":
        return np.array([[ik * v["D"]], [-k2 * v["U"]]])
    raise PreconditionError(f"no coefficient layout for model {c.model_name!r}")


def coefficients_from_lifting(model_name, k, X, residual_norm=0.0) -> LiftingCoefficients:
    """Inverse of :func:`lifting_matrix` for ``k != 0``."""
    k = float(k)
    if k == 0.0:
        raise PreconditionError("coefficients cannot be read off the lifting at k=0")
    X = np.asarray(X, dtype=complex)
    ik, k2 = 1j * k, k * k
    if model_name == "grad3_1d":
        vals = {"A": X[0, 1] / ik, "B": -X[0, 0] / k2}
    elif model_name == "grad13_1d":
        vals = {
            "A": X[0, 1] / ik,
            "B": -X[0, 0] / k2,
            "C": -X[0, 2] / k2,
            "X": X[1, 0] / ik,
            "Y": X[1, 2] / ik,
            "Z": -X[1, 1] / k2,
        }
    elif model_name == "grad13_lateral":
        vals = {"D": X[0, 0] / ik, "U": -X[1, 0] / k2}
    else:
        raise PreconditionError(f"no coefficient layout for model {model_name!r}")
    imag = max(abs(v.imag) for v in vals.values())
    scale = max(1.0, max(abs(v) for v in vals.values()))
    if imag > 1e-8 * scale:
        raise BranchError(
            f"lifting for {model_name} at k={k} is not on a real branch "
            f"(imaginary part {imag:.2e})"
        )
    return LiftingCoefficients(
        model_name, k2, {n: float(v.real) for n, v in vals.items()}, residual_norm
    )
