"""K-nearest-neighbour affinity graphs and their Laplacians."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import squareform, pdist

from .errors import ConfigurationError
from .validation import as_float_matrix, check_symmetric, readonly


@dataclass(frozen=True)
class GraphLaplacian:
    """Weighted KNN graph: affinity W, degree D, Laplacian L = D - W.

    W is symmetric with zero diagonal and Gaussian-kernel weights in
    [0, 1]; L is positive semidefinite with zero row sums.
    """

    W: np.ndarray
    D: np.ndarray
    L: np.ndarray
    eta: float
    knn_k: int

    def __post_init__(self):
        for name in ("W", "D", "L"):
            object.__setattr__(self, name, readonly(np.asarray(getattr(self, name), dtype=np.float64)))
        W = self.W
        n = W.shape[0]
        if W.shape != (n, n) or self.D.shape != (n, n) or self.L.shape != (n, n):
            raise ConfigurationError("W, D, L must be square matrices of equal size")
        if np.any(np.abs(np.diagonal(W)) > 0):
            raise ConfigurationError("W must have a zero diagonal")
        if np.max(np.abs(W - W.T), initial=0.0) > 1e-12:
            raise ConfigurationError("W must be symmetric")
        if np.any(W < 0) or np.any(W > 1):
            raise ConfigurationError("weights must lie in [0, 1]")
        if np.max(np.abs(np.diagonal(self.D) - W.sum(axis=1)), initial=0.0) > 1e-10:
            raise ConfigurationError("D must hold the row sums of W")
        if np.max(np.abs(self.L - (self.D - W)), initial=0.0) > 1e-12:
            raise ConfigurationError("L must equal D - W")

    @property
    def n_nodes(self) -> int:
        return self.W.shape[0]


def build_knn_graph(X, knn_k: int = 5, eta: float | str = "auto") -> GraphLaplacian:
    """Symmetrized KNN graph with Gaussian weights exp(-d^2 / eta).

    Each point is joined to its knn_k nearest neighbours by Euclidean
    distance (ties resolved toward smaller index) and the edge set is the
    union of both directions. eta="auto" uses the squared median distance
    over connected pairs; duplicates at distance zero get weight one.
    """
    X = as_float_matrix(X, name="X")
    n = X.shape[0]
    if n < 2:
        raise ConfigurationError("need at least 2 points")
    if not (1 <= knn_k <= n - 1):
        raise ConfigurationError(f"knn_k must lie in [1, {n - 1}], got {knn_k}")

    D2 = squareform(pdist(X, metric="sqeuclidean"))
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        d = D2[i].copy()
        d[i] = np.inf  # a point is not its own neighbour
        nearest = np.argsort(d, kind="stable")[:knn_k]
        adj[i, nearest] = True
    adj |= adj.T  # union symmetrization

    if eta == "auto":
        connected = np.sqrt(D2[adj])
        med = float(np.median(connected)) if connected.size else 0.0
        eta_val = med * med
        if eta_val == 0.0:
            eta_val = 1.0  # all connected pairs coincide; weights are 1 regardless
    else:
        try:
            eta_val = float(eta)
        except (TypeError, ValueError):
            raise ConfigurationError(f"eta must be 'auto' or a number, got {eta!r}") from None
        if not (eta_val > 0.0):
            raise ConfigurationError(f"eta must be positive, got {eta_val}")

    W = np.zeros((n, n), dtype=np.float64)
    W[adj] = np.exp(-D2[adj] / eta_val)
    np.fill_diagonal(W, 0.0)
    W = (W + W.T) / 2.0  # exact symmetry against summation-order noise
    degrees = W.sum(axis=1)
    Dm = np.diag(degrees)
    L = Dm - W
    return GraphLaplacian(W=W, D=Dm, L=L, eta=eta_val, knn_k=knn_k)


def laplacian_quadratic(Q, L) -> float:
    """Smoothness penalty tr(Q^T L Q) of an embedding over the graph."""
    Q = as_float_matrix(Q, name="Q")
    M = L.L if isinstance(L, GraphLaplacian) else check_symmetric(L, tol=1e-8, name="L")
    if M.shape[0] != Q.shape[0]:
        raise ConfigurationError(
            f"Q has {Q.shape[0]} rows but the Laplacian is {M.shape[0]}x{M.shape[1]}"
        )
    return float(np.trace(Q.T @ M @ Q))


def to_coordinate_text(M) -> str:
    """Serialize a matrix as 'row col value' lines, nonzeros only, row-major."""
    M = np.asarray(M)
    lines = []
    for i, j in np.argwhere(M != 0):
        lines.append(f"{i} {j} {repr(M[i, j].item())}")
    return "\n".join(lines) + ("\n" if lines else "")
