"""scikit-learn style wrappers around the invariant inner product and the spin reconstruction.

Both estimators take rows of algebra coordinates. ``fit`` turns the data into
a base inner product (the ridge-regularized second moment of the rows, or the
identity when ``X`` is None) and symmetrizes it over the automorphism group.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .algebra import parse_algebra
from .reconstruct import build_spin_product, compute_s_o
from .symmetry import InnerProductForm, invariant_inner_product


def _base_form(algebra, X, ridge):
    if X is None:
        return InnerProductForm(algebra, np.eye(algebra.dim))
    X = check_array(X, dtype=float)
    if X.shape[1] != algebra.dim:
        raise ValueError(f"X has {X.shape[1]} columns, {algebra.label} has dimension {algebra.dim}")
    G = X.T @ X / X.shape[0]
    scale = max(np.trace(G) / algebra.dim, 1.0)
    return InnerProductForm(algebra, G + ridge * scale * np.eye(algebra.dim))


class InvariantInnerProduct(TransformerMixin, BaseEstimator):
    """Automorphism-invariant inner product learned from coordinate data.

    Parameters
    ----------
    algebra : dict, str or Algebra
        Algebra spec.
    n_samples : int, default=10000
        Haar automorphisms in the Monte-Carlo average.
    ridge : float, default=1e-3
        Relative ridge added to the data second moment.
    estimator : {"rao-blackwell", "plain"}, default="rao-blackwell"
    random_state : int, default=0

    Attributes
    ----------
    algebra_ : Algebra
    form_ : InnerProductForm
    gram_ : ndarray of shape (dim, dim)
    residual_ : float
        Invariance residual of ``gram_``.
    whitener_ : ndarray of shape (dim, dim)
        ``L`` with ``gram_ = L L^T``.
    """

    def __init__(self, algebra=None, n_samples=10_000, ridge=1e-3, estimator="rao-blackwell", random_state=0):
        self.algebra = algebra
        self.n_samples = n_samples
        self.ridge = ridge
        self.estimator = estimator
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self.algebra_ = parse_algebra(self.algebra)
        base = _base_form(self.algebra_, X, self.ridge)
        self.form_ = invariant_inner_product(
            self.algebra_, base, self.n_samples, self.random_state, max_residual=None, estimator=self.estimator
        )
        self.gram_ = np.array(self.form_.gram)
        self.residual_ = self.form_.residual
        self.whitener_ = np.linalg.cholesky(self.gram_)
        self.n_features_in_ = self.algebra_.dim
        return self

    def transform(self, X):
        """Coordinates in which the Euclidean product equals the invariant one."""
        check_is_fitted(self, "gram_")
        X = check_array(X, dtype=float)
        return X @ self.whitener_

    def inverse_transform(self, X):
        check_is_fitted(self, "gram_")
        X = check_array(X, dtype=float)
        return np.linalg.solve(self.whitener_.T, X.T).T

    def inner(self, A, B):
        """Row-wise invariant inner products."""
        check_is_fitted(self, "gram_")
        A = check_array(A, dtype=float)
        B = check_array(B, dtype=float)
        return np.einsum("ij,jk,ik->i", A, self.gram_, B)


class SpinFactorReconstruction(TransformerMixin, BaseEstimator):
    """Spin-factor coordinates ``(s, v)`` of a capacity-2 algebra, built from an invariant product.

    Parameters
    ----------
    algebra : dict, str or Algebra
        Capacity-2 algebra spec.
    n_samples : int, default=10000
    n_pairs : int, default=64
        Orthogonal atom pairs used to estimate ``s_o``.
    ridge : float, default=1e-3
    random_state : int, default=0

    Attributes
    ----------
    construction_ : SpinConstruction
    s_o_ : float
    residual_ : float
    """

    def __init__(self, algebra=None, n_samples=10_000, n_pairs=64, ridge=1e-3, random_state=0):
        self.algebra = algebra
        self.n_samples = n_samples
        self.n_pairs = n_pairs
        self.ridge = ridge
        self.random_state = random_state

    def fit(self, X=None, y=None):
        inner = InvariantInnerProduct(self.algebra, self.n_samples, self.ridge, random_state=self.random_state).fit(X)
        alg = inner.algebra_
        s_o = compute_s_o(alg, inner.form_, self.n_pairs, self.random_state)
        self.construction_ = build_spin_product(alg, inner.form_, s_o)
        self.s_o_ = s_o
        self.residual_ = inner.residual_
        self.n_features_in_ = alg.dim
        return self

    def transform(self, X):
        """Rows of ``(s, v_1, ..., v_n)`` with ``x = s I + sum_i v_i b_i``."""
        check_is_fitted(self, "construction_")
        X = check_array(X, dtype=float)
        return np.linalg.solve(self.construction_.basis, X.T).T

    def inverse_transform(self, X):
        check_is_fitted(self, "construction_")
        X = check_array(X, dtype=float)
        return X @ self.construction_.basis.T

    def product(self, A, B):
        """Row-wise constructed Jordan product, in algebra coordinates."""
        S = self.transform(A)
        T = self.transform(B)
        C = np.einsum("ni,nj,ijk->nk", S, T, self.construction_.table.constants)
        return self.inverse_transform(C)
