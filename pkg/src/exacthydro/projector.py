"""Entropic inner product and the thermodynamic projector.

The inner product is ``<a, b> = sum_i w_i a_i b_i`` with positive weights
(``w = 1/f*`` for a linearized kinetic equation). For a tangent space ``T``
and entropy gradient ``g`` the projector is::

    P J = P_perp J + g_par <g_perp, J> / <g_par, g_par>

where ``P_perp`` is the orthogonal projector onto ``T``, ``g_par = P_perp g``
and ``g_perp = g - g_par``. It preserves entropy production:
``<g, P J> = <g, J>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EquilibriumDegenerateError, PreconditionError

__all__ = [
    "ProjectorContext",
    "entropic_product",
    "orthogonal_project",
    "thermodynamic_project",
    "random_context",
]


@dataclass(frozen=True)
class ProjectorContext:
    weights: np.ndarray
    entropy_gradient: np.ndarray
    tangent_basis: np.ndarray
    _onb: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        g = np.array(self.entropy_gradient, dtype=float).ravel()
        T = np.array(self.tangent_basis, dtype=float)
        if T.ndim == 1:
            T = T[None, :]
        if not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise PreconditionError("weights must be finite and strictly positive")
        n = w.size
        if g.size != n or T.shape[1] != n:
            raise PreconditionError(
                f"dimension mismatch: weights {n}, gradient {g.size}, basis vectors {T.shape[1]}"
            )
        if T.shape[0] > n:
            raise PreconditionError("more tangent vectors than the space dimension")
        for a in (w, g, T):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "entropy_gradient", g)
        object.__setattr__(self, "tangent_basis", T)
        object.__setattr__(self, "_onb", _entropic_onb(w, T))

    @property
    def dim(self) -> int:
        return self.weights.size


def _entropic_onb(w, T):
    """Rows orthonormal in the weighted product, spanning the rows of ``T``."""
    sw = np.sqrt(w)
    M = (T * sw).T  # columns are the basis vectors in the Euclidean picture
    Q, Rf = np.linalg.qr(M)
    scale = np.abs(M).max() if M.size else 1.0
    if np.abs(np.diag(Rf)).min() <= 1e-12 * max(scale, 1e-300):
        raise PreconditionError("tangent basis is not linearly independent")
    # one reorthogonalization pass
    Q, _ = np.linalg.qr(Q)
    return (Q / sw[:, None]).T


def _vec(ctx, v, name):
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != ctx.dim:
        raise PreconditionError(f"{name} has length {v.shape[-1]}, expected {ctx.dim}")
    return v


def entropic_product(ctx: ProjectorContext, phi, psi) -> float:
    """``sum_i w_i phi_i psi_i``."""
    phi = _vec(ctx, phi, "phi")
    psi = _vec(ctx, psi, "psi")
    return float(np.sum(ctx.weights * phi * psi))


def orthogonal_project(ctx: ProjectorContext, J):
    """Entropic-orthogonal projection onto the tangent space."""
    J = _vec(ctx, J, "J")
    E = ctx._onb
    return (J * ctx.weights) @ E.T @ E


def thermodynamic_project(ctx: ProjectorContext, J):
    """Thermodynamic projection of ``J`` (a vector or a stack of row vectors)."""
    J = _vec(ctx, J, "J")
    g = ctx.entropy_gradient
    g_par = orthogonal_project(ctx, g)
    w = ctx.weights
    nrm2 = float(np.sum(w * g_par * g_par))
    if np.sqrt(nrm2) < 1e-12 * max(np.sqrt(np.sum(w * g * g)), 1e-300):
        raise EquilibriumDegenerateError(
            "tangent part of the entropy gradient vanishes (equilibrium point)"
        )
    g_perp = g - g_par
    corr = (J * w) @ g_perp / nrm2
    return orthogonal_project(ctx, J) + np.multiply.outer(corr, g_par)


def random_context(rng, dim, n_tangent=None) -> ProjectorContext:
    """Random well-conditioned context for property checks."""
    if dim < 2:
        raise PreconditionError("dim must be at least 2")
    m = int(rng.integers(1, dim)) if n_tangent is None else int(n_tangent)
    w = rng.uniform(0.2, 5.0, dim)
    g = rng.normal(size=dim)
    T = rng.normal(size=(m, dim))
    return ProjectorContext(w, g, T)
