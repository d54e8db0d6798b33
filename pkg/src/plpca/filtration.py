"""Threshold families of unweighted Laplacians and their weighted aggregate.

A weighted graph Laplacian is swept with p evenly spaced thresholds over
its off-diagonal range. Each step yields an unweighted Laplacian L^t
(off-diagonal entries 0 or -1, diagonal = number of -1 entries in the
row), and a convex combination of the family forms the aggregate
regularizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .graph import GraphLaplacian
from .validation import check_symmetric, readonly

FILTRATION_DIRECTIONS = ("as_text", "as_equation")


@dataclass(frozen=True)
class PersistentRegularizer:
    """Family of unweighted step Laplacians and their normalized blend."""

    family: tuple[np.ndarray, ...]
    zeta: np.ndarray
    matrix: np.ndarray
    direction: str

    def __post_init__(self):
        fam = tuple(readonly(np.asarray(Lt, dtype=np.int64)) for Lt in self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "zeta", readonly(np.asarray(self.zeta, dtype=np.float64)))
        object.__setattr__(self, "matrix", readonly(np.asarray(self.matrix, dtype=np.float64)))
        if len(fam) != self.zeta.shape[0]:
            raise ConfigurationError("one weight per family member required")
        for Lt in fam:
            off = Lt - np.diag(np.diagonal(Lt))
            if off.size and not np.all((off == 0) | (off == -1)):
                raise ConfigurationError("off-diagonal entries must be 0 or -1")
            if np.any(np.diagonal(Lt) != -off.sum(axis=1)):
                raise ConfigurationError("diagonal must count the -1 entries in its row")

    @property
    def n_steps(self) -> int:
        return len(self.family)


def _as_laplacian_matrix(L) -> np.ndarray:
    if isinstance(L, GraphLaplacian):
        return np.asarray(L.L, dtype=np.float64)
    return check_symmetric(L, tol=1e-8, name="L")


def filtered_family(L, p: int = 6, direction: str = "as_text") -> list[np.ndarray]:
    """Unweighted Laplacians L^1..L^p from p evenly spaced thresholds.

    With l_min, l_max, d = l_max - l_min taken over all off-diagonal
    entries, step t uses the threshold (t/p) * d + l_min.

    as_text (default): an existing edge (negative entry) becomes -1 when
    its value is at or below the threshold, so edge sets grow with t and
    L^p keeps every edge of the graph.
    as_equation: an off-diagonal entry becomes -1 when its value exceeds
    the threshold; at t = p nothing survives and L^p = 0.
    """
    M = _as_laplacian_matrix(L)
    n = M.shape[0]
    if direction not in FILTRATION_DIRECTIONS:
        raise ConfigurationError(f"unknown filtration direction {direction!r}")
    if p < 1:
        raise ConfigurationError("p must be >= 1")
    if n < 2:
        raise ConfigurationError("Laplacian must be at least 2x2")
    off_mask = ~np.eye(n, dtype=bool)
    off = M[off_mask]
    if not np.any(off != 0):
        raise ConfigurationError("Laplacian has no off-diagonal nonzeros")
    l_min = float(off.min())
    l_max = float(off.max())
    d = l_max - l_min

    family = []
    for t in range(1, p + 1):
        threshold = (t / p) * d + l_min
        if direction == "as_text":
            keep = off_mask & (M < 0) & (M <= threshold)
        else:
            keep = off_mask & (M > threshold)
        Lt = np.zeros((n, n), dtype=np.int64)
        Lt[keep] = -1
        np.fill_diagonal(Lt, -Lt.sum(axis=1))
        family.append(Lt)
    return family


def aggregate_pl(family, zeta, direction: str = "as_text") -> PersistentRegularizer:
    """Blend a threshold family with nonnegative weights summing to one.

    zeta is renormalized by its sum, so uniform rescaling leaves the
    aggregate unchanged; an all-zero zeta is rejected.
    """
    z = np.asarray(zeta, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != len(family):
        raise ConfigurationError(
            f"zeta must have one weight per step ({len(family)}), got shape {z.shape}"
        )
    if np.any(z < 0):
        raise ConfigurationError("zeta weights must be nonnegative")
    total = float(z.sum())
    if total == 0.0:
        raise ConfigurationError("zeta must have at least one positive weight")
    z = z / total
    stack = np.stack([np.asarray(Lt, dtype=np.float64) for Lt in family])
    matrix = np.tensordot(z, stack, axes=1)
    return PersistentRegularizer(family=tuple(family), zeta=z, matrix=matrix, direction=direction)


def persistent_regularizer(
    L, p: int = 6, zeta=None, direction: str = "as_text"
) -> PersistentRegularizer:
    """Convenience wrapper: sweep the thresholds and blend in one call."""
    family = filtered_family(L, p=p, direction=direction)
    if zeta is None:
        zeta = np.ones(p, dtype=np.float64)
    return aggregate_pl(family, zeta, direction=direction)
