"""Input validation shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np

from .grid import Grid1D


def check_grid(x0, dx, n_points) -> Grid1D:
    return Grid1D(x0, dx, n_points)


def check_wavefunctions(X, n_points: int | None = None) -> np.ndarray:
    """Coerce ``X`` to a complex ``(n_samples, n_points)`` array of finite samples.

    A single 1-D wavefunction is promoted to one row.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of wavefunctions, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("need at least one wavefunction")
    if not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise ValueError(f"wavefunction samples must be numeric, got dtype {X.dtype}")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("wavefunction samples contain NaN or inf")
    if n_points is not None and X.shape[1] != n_points:
        raise ValueError(f"X has {X.shape[1]} samples per row, estimator was fit with {n_points}")
    return X


def check_potential(V, n_points: int | None = None) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    if V.ndim == 2 and V.shape[0] == 1:
        V = V[0]
    if V.ndim != 1:
        raise ValueError(f"potential must be one row of samples, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise ValueError("potential contains NaN or inf")
    if n_points is not None and V.shape[0] != n_points:
        raise ValueError(f"potential has {V.shape[0]} samples, grid has {n_points}")
    return V
