"""Alternating eigenvector solver for the regularized PCA family.

All seven objectives share one template over the transposed data
Xp = X^T (features by samples), an orthonormal embedding Q (samples by
components), principal directions U = Xp Q, and, when labels are used,
class directions A = Y Q:

    reconstruction(Xp - U Q^T)
    + alpha * ||Y - A Q^T||_F^2        (label fit)
    + beta  * ||Q||_{2,1}              (row sparsity)
    + gamma * tr(Q^T L Q)              (graph or aggregate smoothness)
    subject to Q^T Q = I

The reconstruction is either squared Frobenius or the L2,1 norm (sum of
feature-row norms, robust to heavy residual rows). Each iteration (a)
rebuilds the diagonal reweighting matrices E (data rows) and G (rows of
Q) from the current iterate, which majorizes both L2,1 terms by weighted
quadratics tight at the iterate, and (b) minimizes the resulting
surrogate exactly: eliminating U and A in closed form leaves
min tr(Q^T M Q) with

    M = -Xp^T E Xp - alpha Y^T Y + beta G + gamma L,

solved by the k eigenvectors of the smallest eigenvalues. The objective
therefore never increases; the trace is checked and the solver aborts if
descent fails numerically.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, NumericalError
from .filtration import FILTRATION_DIRECTIONS, persistent_regularizer
from .graph import build_knn_graph
from .ioutil import atomic_write_json, atomic_write_text
from .validation import as_float_matrix, check_symmetric, readonly

METHODS = (
    "pca",
    "sdspca",
    "glpca",
    "lsdspca",
    "rlsdspca",
    "plpca_simple",
    "plpca_full",
)
METHOD_ALIASES = {"plpca": "plpca_full", "plpca-simple": "plpca_simple"}

_SUPERVISED = frozenset({"sdspca", "lsdspca", "rlsdspca", "plpca_full"})
_ROW_SPARSE = frozenset({"sdspca", "lsdspca", "rlsdspca", "plpca_full"})
_L21_LOSS = frozenset({"rlsdspca", "plpca_full"})
_GRAPH_REG = frozenset({"glpca", "lsdspca", "rlsdspca"})
_AGGREGATE_REG = frozenset({"plpca_simple", "plpca_full"})

_ROW_NORM_FLOOR = 1e-10  # keeps the reweighting diagonals finite and positive
_DESCENT_SLACK = 1e-10  # relative slack when checking the objective trace
_ASCENT_LIMIT = 1e-6  # relative rise that signals a bug rather than float noise


def canonical_method(name: str) -> str:
    m = str(name).lower().replace("-", "_")
    m = METHOD_ALIASES.get(m, m)
    if m not in METHODS:
        raise ConfigurationError(f"unknown method {name!r}; choose from {METHODS}")
    return m


def uses_labels(method: str) -> bool:
    return canonical_method(method) in _SUPERVISED


def uses_regularizer(method: str) -> bool:
    m = canonical_method(method)
    return m in _GRAPH_REG or m in _AGGREGATE_REG


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters for one fit. Unused terms are simply ignored."""

    method: str = "plpca_full"
    n_components: int = 2
    alpha: float = 1e-4
    beta: float = 0.5
    gamma: float = 1e-4
    tol: float = 1e-6
    max_iter: int = 200
    mu0: float = 1.0
    knn_k: int = 5
    eta: float | str = "auto"
    n_filtrations: int = 6
    zeta: tuple | None = None
    direction: str = "as_text"

    def __post_init__(self):
        object.__setattr__(self, "method", canonical_method(self.method))
        if self.n_components < 1:
            raise ConfigurationError("n_components must be >= 1")
        if self.tol <= 0:
            raise ConfigurationError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be >= 1")
        if self.mu0 <= 0:
            raise ConfigurationError("mu0 must be positive")
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ConfigurationError(f"{name} must be a nonnegative finite real, got {v!r}")
        if self.knn_k < 1:
            raise ConfigurationError("knn_k must be >= 1")
        if self.n_filtrations < 1:
            raise ConfigurationError("n_filtrations must be >= 1")
        if self.direction not in FILTRATION_DIRECTIONS:
            raise ConfigurationError(f"unknown filtration direction {self.direction!r}")
        if self.zeta is not None:
            z = tuple(float(v) for v in self.zeta)
            if len(z) != self.n_filtrations:
                raise ConfigurationError(
                    f"zeta has {len(z)} weights for {self.n_filtrations} filtration steps"
                )
            object.__setattr__(self, "zeta", z)

    def with_components(self, k: int) -> "SolverConfig":
        return replace(self, n_components=k)


@dataclass
class SolverState:
    """Diagonal reweightings and auxiliary quantities carried across iterations.

    E reweights data rows (features), G reweights rows of Q; both stay
    strictly positive. C and mu mirror the augmented bookkeeping of the
    reference scheme; with the constraint enforced exactly by the
    eigenvector step they stay at their initial values.
    """

    E: np.ndarray
    G: np.ndarray
    C: np.ndarray
    mu: float
    iteration: int = 0


@dataclass(frozen=True)
class ProjectionModel:
    """Fitted projection: directions U (m x k), embedding Q (n x k), A (c x k)."""

    u: np.ndarray
    q: np.ndarray
    a: np.ndarray | None
    objective_trace: np.ndarray
    iterations_run: int
    converged: bool
    regularizer: np.ndarray | None = field(repr=False, default=None)
    state: SolverState | None = field(repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "u", readonly(np.asarray(self.u, dtype=np.float64)))
        object.__setattr__(self, "q", readonly(np.asarray(self.q, dtype=np.float64)))
        if self.a is not None:
            object.__setattr__(self, "a", readonly(np.asarray(self.a, dtype=np.float64)))
        object.__setattr__(
            self, "objective_trace", readonly(np.asarray(self.objective_trace, dtype=np.float64))
        )

    @property
    def n_components(self) -> int:
        return self.q.shape[1]


def l21_norm(M) -> float:
    """Sum of Euclidean row norms."""
    M = as_float_matrix(M, name="M")
    return float(np.linalg.norm(M, axis=1).sum())


def q_subproblem(Mq, k: int) -> np.ndarray:
    """Orthonormal minimizer of tr(Q^T Mq Q): the k lowest eigenvectors.

    Deterministic output: eigenvalues ascending, exact eigenvalue ties
    ordered with the lexicographically larger column first, and each
    column signed so its largest-magnitude entry is positive.
    """
    Mq = check_symmetric(Mq, tol=1e-10, name="Mq")
    n = Mq.shape[0]
    if not (1 <= k <= n):
        raise ConfigurationError(f"k must lie in [1, {n}], got {k}")
    try:
        w, V = np.linalg.eigh((Mq + Mq.T) / 2.0)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"eigensolver failed: {e}") from e
    cols = list(range(k))
    # reorder inside groups of exactly equal eigenvalues
    start = 0
    ordered = []
    while start < k:
        stop = start
        while stop < k and w[stop] == w[start]:
            stop += 1
        group = cols[start:stop]
        if len(group) > 1:
            group = sorted(group, key=lambda j: tuple(V[:, j]), reverse=True)
        ordered.extend(group)
        start = stop
    Q = V[:, ordered].copy()
    for j in range(k):
        col = Q[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0:
            Q[:, j] = -col
    return Q


def _validate_one_hot(Y, n: int) -> np.ndarray:
    Y = as_float_matrix(Y, name="Y")
    c = Y.shape[0]
    if Y.shape[1] != n:
        raise ConfigurationError(f"Y has {Y.shape[1]} columns for {n} samples")
    if c < 2:
        raise ConfigurationError("Y must have at least 2 class rows")
    if not np.all((Y == 0.0) | (Y == 1.0)) or not np.all(Y.sum(axis=0) == 1.0):
        raise ConfigurationError("Y must be one-hot with a single 1 per column")
    return Y


def build_regularizer(X, config: SolverConfig) -> np.ndarray | None:
    """Graph (or aggregate) smoothness matrix for the configured method."""
    method = config.method
    if config.gamma == 0.0 or not uses_regularizer(method):
        return None
    g = build_knn_graph(X, knn_k=config.knn_k, eta=config.eta)
    if method in _GRAPH_REG:
        return np.asarray(g.L)
    reg = persistent_regularizer(
        g, p=config.n_filtrations, zeta=config.zeta, direction=config.direction
    )
    return np.asarray(reg.matrix)


def _objective_value(Xp, Y, config: SolverConfig, u, q, a, lap) -> float:
    method = config.method
    R = Xp - u @ q.T
    if method in _L21_LOSS:
        total = float(np.linalg.norm(R, axis=1).sum())
    else:
        total = float(np.sum(R * R))
    if method in _SUPERVISED:
        if Y is None or a is None:
            raise ConfigurationError(f"{method} requires labels and class directions")
        Ry = np.asarray(Y, dtype=np.float64) - a @ q.T
        total += config.alpha * float(np.sum(Ry * Ry))
    if method in _ROW_SPARSE:
        total += config.beta * float(np.linalg.norm(q, axis=1).sum())
    if config.gamma != 0.0 and uses_regularizer(method):
        if lap is None:
            raise ConfigurationError("smoothness term requested but no Laplacian available")
        lap = np.asarray(lap, dtype=np.float64)
        total += config.gamma * float(np.trace(q.T @ lap @ q))
    return total


def objective(X, Y, config: SolverConfig, model: ProjectionModel, laplacian=None) -> float:
    """Value of the configured objective at the model's (U, Q, A)."""
    X = as_float_matrix(X, name="X")
    lap = laplacian if laplacian is not None else model.regularizer
    return _objective_value(X.T, Y, config, model.u, model.q, model.a, lap)


def fit_projection(X, Y, config: SolverConfig, laplacian=None) -> ProjectionModel:
    """Run the alternating scheme to convergence on the given data.

    Y is the one-hot label matrix (classes by samples) and is required
    for the label-aware methods; the others ignore it. `laplacian`
    overrides the internally built smoothness matrix, which lets callers
    reuse a graph across fits or inject a custom one.
    """
    X = as_float_matrix(X, name="X")
    n, m = X.shape
    method = config.method
    k = config.n_components
    if k > min(n, m):
        raise ConfigurationError(f"n_components={k} exceeds min(n, m)={min(n, m)}")

    supervised = method in _SUPERVISED
    if supervised:
        if Y is None:
            raise ConfigurationError(f"{method} requires one-hot labels Y")
        Y = _validate_one_hot(Y, n)
    l21_loss = method in _L21_LOSS
    sparse_rows = method in _ROW_SPARSE and config.beta != 0.0

    if laplacian is not None:
        lap = check_symmetric(laplacian, tol=1e-8, name="laplacian")
        if lap.shape[0] != n:
            raise ConfigurationError(f"laplacian is {lap.shape[0]}x{lap.shape[0]} for n={n}")
        if not uses_regularizer(method):
            lap = None  # methods without a smoothness term ignore it
    else:
        lap = build_regularizer(X, config)

    Xp = X.T  # features by samples
    state = SolverState(
        E=np.ones(m, dtype=np.float64),
        G=np.ones(n, dtype=np.float64),
        C=np.eye(k, dtype=np.float64),
        mu=config.mu0,
    )

    M_frob = None
    if not l21_loss:
        M_frob = -(X @ Xp)  # -Xp^T Xp, constant across iterations
        M_frob = (M_frob + M_frob.T) / 2.0
    M_label = -config.alpha * (Y.T @ Y) if supervised else None
    if M_label is not None:
        M_label = (M_label + M_label.T) / 2.0
    M_smooth = config.gamma * lap if (lap is not None and config.gamma != 0.0) else None

    U = Q = A = None
    trace: list[float] = []
    converged = False
    iterations = 0
    for it in range(1, config.max_iter + 1):
        iterations = it
        state.iteration = it
        if it > 1:
            if l21_loss:
                R = Xp - U @ Q.T
                norms = np.linalg.norm(R, axis=1)
                state.E = 1.0 / (2.0 * np.maximum(norms, _ROW_NORM_FLOOR))
            if sparse_rows:
                qnorms = np.linalg.norm(Q, axis=1)
                state.G = 1.0 / (2.0 * np.maximum(qnorms, _ROW_NORM_FLOOR))

        if l21_loss:
            M = -((X * state.E[None, :]) @ Xp)
            M = (M + M.T) / 2.0  # the weighted gram is symmetric; drop float noise
        else:
            M = M_frob.copy()
        if M_label is not None:
            M += M_label
        if sparse_rows:
            M[np.diag_indices_from(M)] += config.beta * state.G
        if M_smooth is not None:
            M += M_smooth

        try:
            Q_new = q_subproblem(M, k)
        except NumericalError as e:
            raise NumericalError(f"iteration {it}: {e}") from e
        U_new = Xp @ Q_new
        A_new = Y @ Q_new if supervised else None

        value = _objective_value(Xp, Y, config, U_new, Q_new, A_new, lap)
        if trace:
            slack = _DESCENT_SLACK * max(1.0, abs(trace[-1]))
            if value > trace[-1] + slack:
                # the majorization step never ascends in exact arithmetic; a
                # hairline rise means the float floor was hit, so keep the
                # previous iterate and stop, while a gross rise is a bug
                if value > trace[-1] + _ASCENT_LIMIT * max(1.0, abs(trace[-1])):
                    raise NumericalError(
                        f"objective increased at iteration {it}: {trace[-1]!r} -> {value!r}"
                    )
                converged = True
                break
        Q_prev = Q
        Q, U, A = Q_new, U_new, A_new
        trace.append(value)

        if Q_prev is not None and l21_norm(Q - Q_prev) < config.tol:
            converged = True
            break

    return ProjectionModel(
        u=U,
        q=Q,
        a=A,
        objective_trace=np.asarray(trace, dtype=np.float64),
        iterations_run=iterations,
        converged=converged,
        regularizer=lap,
        state=state,
    )


def project(model: ProjectionModel, X) -> np.ndarray:
    """Least-squares coordinates of new rows in the span of U."""
    X = as_float_matrix(X, name="X")
    if X.shape[1] != model.u.shape[0]:
        raise ConfigurationError(
            f"X has {X.shape[1]} features, model expects {model.u.shape[0]}"
        )
    # solve min_q ||x - U q|| per row via the pseudoinverse
    return X @ np.linalg.pinv(model.u).T


# ---------------------------------------------------------------------------
# Serialization


def _write_matrix_csv(path: str, M: np.ndarray):
    lines = []
    for row in np.atleast_2d(M):
        lines.append(",".join(repr(float(v)) for v in row))
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def save_model(model: ProjectionModel, outdir: str, config: dict | None = None):
    """Write U.csv, Q.csv, A.csv (when present), trace.json, config.json."""
    os.makedirs(outdir, exist_ok=True)
    _write_matrix_csv(os.path.join(outdir, "U.csv"), model.u)
    _write_matrix_csv(os.path.join(outdir, "Q.csv"), model.q)
    if model.a is not None:
        _write_matrix_csv(os.path.join(outdir, "A.csv"), model.a)
    payload = {
        "objective_trace": [float(v) for v in model.objective_trace],
        "iterations_run": model.iterations_run,
        "converged": model.converged,
    }
    atomic_write_json(os.path.join(outdir, "trace.json"), payload)
    if config is not None:
        atomic_write_json(os.path.join(outdir, "config.json"), config)
