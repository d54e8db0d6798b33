"""Vietoris-Rips complexes, boundary operators, and persistent Laplacians.

Complexes are stored dimension by dimension as lexicographically sorted
tuples of vertex indices. Boundary matrices are integer-valued, so the
chain-complex identity B_q @ B_{q+1} == 0 holds exactly; spectra are
computed in floating point afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, InclusionError
from .validation import as_float_matrix, readonly

ZERO_TOL = 1e-8  # relative threshold for counting harmonic (zero) eigenvalues


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite simplicial complex over integer vertex ids.

    simplices[q] lists the q-simplices as sorted vertex tuples in
    lexicographic order; the structure is closed under taking faces.
    """

    simplices: dict[int, tuple[tuple[int, ...], ...]]

    def __post_init__(self):
        cleaned: dict[int, tuple[tuple[int, ...], ...]] = {}
        for q, simps in sorted(self.simplices.items()):
            if q < 0:
                raise ConfigurationError(f"negative dimension {q}")
            seen = set()
            for s in simps:
                s = tuple(int(v) for v in s)
                if len(s) != q + 1:
                    raise ConfigurationError(f"{s} is not a {q}-simplex")
                if list(s) != sorted(set(s)):
                    raise ConfigurationError(f"simplex {s} must be strictly increasing")
                if s in seen:
                    raise ConfigurationError(f"duplicate simplex {s}")
                seen.add(s)
            cleaned[q] = tuple(sorted(seen))
        object.__setattr__(self, "simplices", cleaned)
        for q, simps in cleaned.items():
            if q == 0:
                continue
            lower = set(cleaned.get(q - 1, ()))
            for s in simps:
                for face in combinations(s, q):
                    if face not in lower:
                        raise ConfigurationError(
                            f"face {face} of {s} is missing: complex not closed"
                        )

    def n_simplices(self, q: int) -> int:
        return len(self.simplices.get(q, ()))

    @property
    def max_dim(self) -> int:
        dims = [q for q, s in self.simplices.items() if s]
        return max(dims) if dims else -1

    def contains(self, other: "SimplicialComplex") -> bool:
        for q, simps in other.simplices.items():
            if not set(simps) <= set(self.simplices.get(q, ())):
                return False
        return True


def build_complex_vr(points, epsilon: float, max_dim: int = 2) -> SimplicialComplex:
    """Vietoris-Rips complex: cliques of the epsilon-neighbourhood graph.

    Pairs at Euclidean distance <= epsilon are joined; q-simplices up to
    max_dim are the (q+1)-cliques, found by expanding each simplex with
    vertices adjacent to all of its members.
    """
    P = as_float_matrix(points, name="points")
    if epsilon < 0:
        raise ConfigurationError("epsilon must be >= 0")
    if max_dim < 0:
        raise ConfigurationError("max_dim must be >= 0")
    n = P.shape[0]
    diff = P[:, None, :] - P[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    adj = (dist <= epsilon) & ~np.eye(n, dtype=bool)

    simplices: dict[int, list[tuple[int, ...]]] = {0: [(i,) for i in range(n)]}
    if max_dim >= 1:
        simplices[1] = [(i, j) for i in range(n) for j in range(i + 1, n) if adj[i, j]]
    for q in range(2, max_dim + 1):
        prev = simplices.get(q - 1, [])
        found = []
        for s in prev:
            # common neighbours above the largest vertex keep tuples sorted
            candidates = np.flatnonzero(np.all(adj[list(s)], axis=0))
            for v in candidates:
                if v > s[-1]:
                    found.append(s + (int(v),))
        simplices[q] = found
        if not found:
            break
    return SimplicialComplex({q: tuple(s) for q, s in simplices.items()})


def boundary_matrix(K: SimplicialComplex, q: int) -> np.ndarray:
    """Signed incidence of q-simplices on their (q-1)-faces.

    Rows follow the (q-1)-simplex ordering, columns the q-simplex
    ordering; dropping vertex i of a sorted simplex contributes (-1)^i.
    q = 0 gives the empty map (0 x n_vertices).
    """
    if q < 0:
        raise ConfigurationError("q must be >= 0")
    cols = K.simplices.get(q, ())
    if q == 0:
        return np.zeros((0, len(cols)), dtype=np.int64)
    rows = K.simplices.get(q - 1, ())
    index = {s: i for i, s in enumerate(rows)}
    B = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for j, s in enumerate(cols):
        for i in range(q + 1):
            face = s[:i] + s[i + 1 :]
            B[index[face], j] = -1 if i % 2 else 1
    return B


def combinatorial_laplacian(K: SimplicialComplex, q: int) -> np.ndarray:
    """Integer Hodge Laplacian L_q = B_{q+1} B_{q+1}^T + B_q^T B_q."""
    Bq = boundary_matrix(K, q)
    Bq1 = boundary_matrix(K, q + 1)
    n = K.n_simplices(q)
    L = np.zeros((n, n), dtype=np.int64)
    if Bq1.size:
        L += Bq1 @ Bq1.T
    if Bq.size:
        L += Bq.T @ Bq
    return L


@dataclass(frozen=True)
class PersistentSpectrum:
    """Eigenvalues of a (persistent) Laplacian plus its harmonic count."""

    q: int
    t: int
    p: int
    eigenvalues: np.ndarray
    betti: int
    matrix: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        object.__setattr__(self, "eigenvalues", readonly(ev))
        if self.matrix is not None:
            object.__setattr__(self, "matrix", readonly(np.asarray(self.matrix)))

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "t": self.t,
            "p": self.p,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "betti": self.betti,
        }


def _harmonic_count(eigenvalues: np.ndarray) -> int:
    if eigenvalues.size == 0:
        return 0
    top = float(eigenvalues.max())
    tol = ZERO_TOL * top if top > 0 else ZERO_TOL
    return int(np.count_nonzero(eigenvalues < tol))


def _spectrum(L: np.ndarray, q: int, t: int, p: int) -> PersistentSpectrum:
    if L.shape[0] == 0:
        ev = np.empty(0, dtype=np.float64)
    else:
        ev = scipy.linalg.eigvalsh(np.asarray(L, dtype=np.float64))
        ev = np.where(np.abs(ev) < ZERO_TOL, 0.0, ev)  # clamp round-off negatives
    return PersistentSpectrum(q=q, t=t, p=p, eigenvalues=ev, betti=_harmonic_count(ev), matrix=L)


def combinatorial_spectrum(K: SimplicialComplex, q: int, t: int = 0) -> PersistentSpectrum:
    return _spectrum(combinatorial_laplacian(K, q), q=q, t=t, p=0)


def persistent_laplacian_q(
    K_t: SimplicialComplex,
    K_tp: SimplicialComplex,
    q: int,
    t: int = 0,
    p: int = 0,
) -> PersistentSpectrum:
    """Persistent Laplacian of the inclusion K_t -> K_tp in degree q.

    The up part restricts the (q+1)-boundary of K_tp to the chains whose
    boundary stays inside the q-chains of K_t: with the boundary rows
    split into K_t rows (B_in) and the rest (B_out), a basis Z of
    ker(B_out) gives the up term (B_in Z)(B_in Z)^T, which is independent
    of the basis choice. The down part is B_q^T B_q over K_t. When the
    complexes coincide this reduces exactly to the combinatorial
    Laplacian.
    """
    if not K_tp.contains(K_t):
        for dim, simps in K_t.simplices.items():
            extra = set(simps) - set(K_tp.simplices.get(dim, ()))
            if extra:
                raise InclusionError(
                    f"complexes are not nested: {sorted(extra)[0]} missing from the larger one"
                )
        raise InclusionError("complexes are not nested")

    rows_small = K_t.simplices.get(q, ())
    n_small = len(rows_small)
    if n_small == 0:
        return _spectrum(np.zeros((0, 0)), q=q, t=t, p=p)

    rows_big = K_tp.simplices.get(q, ())
    in_small = set(rows_small)
    inside = [i for i, s in enumerate(rows_big) if s in in_small]
    outside = [i for i, s in enumerate(rows_big) if s not in in_small]

    B_up = boundary_matrix(K_tp, q + 1).astype(np.float64)
    if B_up.shape[1] == 0:
        up = np.zeros((n_small, n_small))
    elif not outside:
        # no rows to project out: the restriction is the full boundary
        B_in = B_up[inside, :]
        up = B_in @ B_in.T
    else:
        Z = scipy.linalg.null_space(B_up[outside, :])
        P = B_up[inside, :] @ Z
        up = P @ P.T

    Bq = boundary_matrix(K_t, q).astype(np.float64)
    down = Bq.T @ Bq if Bq.size else np.zeros((n_small, n_small))
    return _spectrum(up + down, q=q, t=t, p=p)
