"""Scikit-learn style front end for the projection solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .data import one_hot
from .errors import ConfigurationError
from .solver import (
    SolverConfig,
    fit_projection,
    project,
    uses_labels,
)
from .validation import as_float_matrix, as_label_vector


class RegularizedPCA(BaseEstimator, TransformerMixin):
    """Dimension reduction by any member of the regularized PCA family.

    Parameters mirror SolverConfig; `method` selects the objective:
    "pca", "sdspca", "glpca", "lsdspca", "rlsdspca", "plpca_simple", or
    "plpca_full" (alias "plpca"). Label-aware methods need y in fit.

    After fitting, `embedding_` holds the optimized coordinates of the
    training rows and `transform` maps new rows through the learned
    directions by least squares. `fit_transform` returns `embedding_`,
    which for the regularized objectives is not the same map as
    `transform` applied to the training data.
    """

    def __init__(
        self,
        method: str = "plpca_full",
        n_components: int = 2,
        alpha: float = 1e-4,
        beta: float = 0.5,
        gamma: float = 1e-4,
        tol: float = 1e-6,
        max_iter: int = 200,
        knn_k: int = 5,
        eta="auto",
        n_filtrations: int = 6,
        zeta=None,
        direction: str = "as_text",
        precomputed_laplacian=None,
    ):
        self.method = method
        self.n_components = n_components
        self.alpha = alpha
        self.beta = beta
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter
        self.knn_k = knn_k
        self.eta = eta
        self.n_filtrations = n_filtrations
        self.zeta = zeta
        self.direction = direction
        self.precomputed_laplacian = precomputed_laplacian

    def _config(self) -> SolverConfig:
        return SolverConfig(
            method=self.method,
            n_components=self.n_components,
            alpha=self.alpha,
            beta=self.beta,
            gamma=self.gamma,
            tol=self.tol,
            max_iter=self.max_iter,
            knn_k=self.knn_k,
            eta=self.eta,
            n_filtrations=self.n_filtrations,
            zeta=tuple(self.zeta) if self.zeta is not None else None,
            direction=self.direction,
        )

    def fit(self, X, y=None):
        X = as_float_matrix(X, name="X")
        config = self._config()
        Y = None
        if uses_labels(config.method):
            if y is None:
                raise ConfigurationError(f"method {config.method!r} requires labels y")
            y = as_label_vector(y, n=X.shape[0], name="y")
            self.classes_, encoded = np.unique(y, return_inverse=True)
            if self.classes_.shape[0] < 2:
                raise ConfigurationError("need at least 2 classes in y")
            Y = one_hot(encoded, self.classes_.shape[0])
        model = fit_projection(X, Y, config, laplacian=self.precomputed_laplacian)
        self.model_ = model
        self.components_ = model.u
        self.embedding_ = model.q
        self.label_components_ = model.a
        self.objective_trace_ = model.objective_trace
        self.n_iter_ = model.iterations_run
        self.converged_ = model.converged
        self.regularizer_ = model.regularizer
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "model_"):
            raise ConfigurationError("estimator is not fitted")
        return project(self.model_, X)

    def fit_transform(self, X, y=None) -> np.ndarray:
        return self.fit(X, y).embedding_
