"""scikit-learn style wrappers.

``HydrodynamicManifold`` fits liftings on a k grid and maps macroscopic
amplitudes to microscopic ones; ``ThermodynamicProjector`` projects rows of
vector fields. Both carry their configuration as constructor parameters so
``get_params``/``set_params``/``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import CriticalPointError, PreconditionError
from .invariance import grad13_sweep, lifting_matrix
from .models import build_model
from .projector import ProjectorContext, thermodynamic_project
from .spectra import closure_lifting, reduced_generator

__all__ = ["HydrodynamicManifold", "ThermodynamicProjector"]


def _k_column(K):
    k = np.asarray(K, dtype=float)
    if k.ndim == 2:
        if k.shape[1] != 1:
            raise PreconditionError("k input must have a single column")
        k = k[:, 0]
    return k.ravel()


class HydrodynamicManifold(TransformerMixin, BaseEstimator):
    """Lifting ``mu = X(k) M`` of a catalog model under a named closure.

    ``fit(K)`` solves the closure at the wave numbers in ``K`` (one per row).
    ``transform(M)`` lifts row ``i`` of ``M`` with ``X(k_i)``.
    ``predict(K)`` returns the hydrodynamic frequencies at ``K``.
    """

    def __init__(self, model="grad3_1d", closure="exact"):
        self.model = model
        self.closure = closure

    def _liftings(self, k):
        if self.model == "grad13_1d" and self.closure == "exact":
            pos = np.unique(np.abs(k[k != 0]))
            res = grad13_sweep(pos) if pos.size else None
            if res is not None and res.termination != "completed":
                raise CriticalPointError(
                    f"k beyond the critical wave number {res.critical_k:.6g}",
                    critical_k=res.critical_k,
                )
            by_k2 = {} if res is None else {s.k2: s for s in res.samples}
            out = []
            for kj in k:
                if kj == 0:
                    out.append(np.zeros((2, 3), complex))
                else:
                    out.append(lifting_matrix(by_k2[float(abs(kj)) ** 2], kj))
            return np.array(out)
        lift = closure_lifting(self.model, self.closure)
        return np.array([lift(kj) for kj in k])

    def fit(self, K, y=None):
        k = _k_column(K)
        self.model_ = build_model(self.model)
        self.k_ = k
        self.liftings_ = self._liftings(k)
        self.n_features_in_ = self.model_.dim_macro
        return self

    def transform(self, M):
        check_is_fitted(self, "liftings_")
        M = np.asarray(M, dtype=complex)
        if M.ndim == 1:
            M = M[None, :]
        if M.shape != (self.k_.size, self.model_.dim_macro):
            raise PreconditionError(
                f"expected {self.k_.size} rows of length {self.model_.dim_macro}, got {M.shape}"
            )
        return np.einsum("nij,nj->ni", self.liftings_, M)

    def predict(self, K):
        """Hydrodynamic frequencies, shape ``(n_k, dim_macro)``, sorted by imaginary part."""
        check_is_fitted(self, "liftings_")
        k = _k_column(K)
        Xs = self._liftings(k)
        w = [np.linalg.eigvals(reduced_generator(self.model_, X, kj)) for kj, X in zip(k, Xs)]
        return np.array([r[np.lexsort((r.real, r.imag))] for r in w])


class ThermodynamicProjector(TransformerMixin, BaseEstimator):
    """Thermodynamic projection onto ``span(tangent_basis)``.

    ``weights`` defaults to all ones. ``fit`` ignores its data argument apart
    from checking the dimension.
    """

    def __init__(self, entropy_gradient=None, tangent_basis=None, weights=None):
        self.entropy_gradient = entropy_gradient
        self.tangent_basis = tangent_basis
        self.weights = weights

    def fit(self, J=None, y=None):
        if self.entropy_gradient is None or self.tangent_basis is None:
            raise PreconditionError("entropy_gradient and tangent_basis are required")
        g = np.asarray(self.entropy_gradient, dtype=float)
        w = np.ones_like(g) if self.weights is None else self.weights
        self.context_ = ProjectorContext(w, g, self.tangent_basis)
        self.n_features_in_ = self.context_.dim
        if J is not None and np.asarray(J).shape[-1] != self.n_features_in_:
            raise PreconditionError("data dimension does not match the context")
        return self

    def transform(self, J):
        check_is_fitted(self, "context_")
        return thermodynamic_project(self.context_, np.asarray(J, dtype=float))
