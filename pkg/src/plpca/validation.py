"""Small input-validation helpers used by the public entry points."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


def as_float_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a 2-D float64 array and reject non-finite entries."""
    A = np.asarray(X, dtype=np.float64)
    if A.ndim != 2:
        raise ConfigurationError(f"{name} must be 2-D, got ndim={A.ndim}")
    if A.size and not np.all(np.isfinite(A)):
        raise ConfigurationError(f"{name} contains NaN or Inf entries")
    return A


def as_label_vector(y, n: int | None = None, name: str = "labels") -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ConfigurationError(f"{name} must be 1-D, got ndim={y.ndim}")
    if y.size and not np.issubdtype(y.dtype, np.integer):
        as_float = np.asarray(y, dtype=np.float64)
        if not np.all(as_float == np.round(as_float)):
            raise ConfigurationError(f"{name} must be integer class ids")
        y = as_float.astype(np.int64)
    y = y.astype(np.int64, copy=False)
    if n is not None and y.shape[0] != n:
        raise ConfigurationError(f"{name} has length {y.shape[0]}, expected {n}")
    return y


def check_symmetric(M, tol: float = 1e-10, name: str = "matrix") -> np.ndarray:
    M = as_float_matrix(M, name=name)
    if M.shape[0] != M.shape[1]:
        raise ConfigurationError(f"{name} must be square, got {M.shape}")
    if M.size:
        dev = float(np.max(np.abs(M - M.T)))
        if dev > tol:
            raise ConfigurationError(
                f"{name} is not symmetric (max deviation {dev:.3e} > {tol:.1e})"
            )
    return M


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def readonly(a: np.ndarray) -> np.ndarray:
    """Return the array with its write flag dropped (containers stay frozen)."""
    a.flags.writeable = False
    return a
