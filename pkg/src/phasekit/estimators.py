"""scikit-learn style wrappers around the phase-space pipeline.

Rows of ``X`` are wavefunctions sampled on the grid ``x0 + dx * arange(n)``.
They are normalized on the grid before use unless ``normalize=False``, in
which case they must already be normalized.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_grid, check_potential, check_wavefunctions
from .grid import ComplexField1D
from .internal_space import build_characteristic
from .moments import PATHS, moment_table
from .phase_space import density, marginals, probability_amplitude
from .schrodinger import HamiltonianSpec, build_hamiltonian, solve_eigen
from .states import WaveFunction, normalize

__all__ = ["MomentFeatures", "PhaseSpaceDensityTransformer", "SchrodingerEigensolver"]


class _GridMixin:
    def _fit_grid(self, X):
        X = check_wavefunctions(X)
        self.grid_ = check_grid(self.x0, self.dx, X.shape[1])
        self.n_features_in_ = X.shape[1]
        return self

    def _wavefunctions(self, X):
        check_is_fitted(self, "grid_")
        X = check_wavefunctions(X, self.n_features_in_)
        for row in X:
            field = ComplexField1D(self.grid_, row)
            yield normalize(field, self.hbar) if self.normalize else WaveFunction(field, self.hbar)


class MomentFeatures(_GridMixin, TransformerMixin, BaseEstimator):
    """Map wavefunctions to moments ``<x^n p^m>``.

    Parameters
    ----------
    x0, dx : float
        Grid origin and spacing.
    orders : sequence of (n, m)
        Moments to compute, one output column each.
    path : {"internal", "separable", "phase_space"}
    convention : {"plain", "conjugate"}
    hbar : float
    normalize : bool

    Attributes
    ----------
    grid_ : Grid1D
    imaginary_residual_ : float
        Largest discarded imaginary part seen by the last ``transform``.
    """

    def __init__(self, x0=-10.0, dx=20 / 1024, orders=((1, 0), (0, 1), (2, 0), (0, 2)),
                 path="separable", convention="plain", hbar=1.0, normalize=True):
        self.x0 = x0
        self.dx = dx
        self.orders = orders
        self.path = path
        self.convention = convention
        self.hbar = hbar
        self.normalize = normalize

    def fit(self, X, y=None):
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}, got {self.path!r}")
        return self._fit_grid(X)

    def transform(self, X):
        rows = []
        residual = 0.0
        for psi in self._wavefunctions(X):
            table = moment_table(psi, [tuple(o) for o in self.orders], (self.path,), self.convention)
            rows.append([r.value.real for r in table])
            residual = max([residual] + [r.imaginary_residual for r in table])
        self.imaginary_residual_ = residual
        return np.array(rows)

    def get_feature_names_out(self, input_features=None):
        return np.array([f"x{n}p{m}" for n, m in self.orders], dtype=object)


class PhaseSpaceDensityTransformer(_GridMixin, TransformerMixin, BaseEstimator):
    """Map wavefunctions to phase-space densities or their marginals.

    ``output="density"`` gives ``n * n`` columns holding ``F(x_i, p_k)``
    row-major; ``output="marginals"`` gives the position marginal followed by
    the momentum marginal (``2 n`` columns).
    """

    def __init__(self, x0=-10.0, dx=20 / 1024, output="density", convention="plain", hbar=1.0, normalize=True):
        self.x0 = x0
        self.dx = dx
        self.output = output
        self.convention = convention
        self.hbar = hbar
        self.normalize = normalize

    def fit(self, X, y=None):
        if self.output not in ("density", "marginals"):
            raise ValueError(f"output must be 'density' or 'marginals', got {self.output!r}")
        self._fit_grid(X)
        self.momentum_grid_ = self.grid_.momentum_grid(self.hbar)
        return self

    def transform(self, X):
        rows = []
        for psi in self._wavefunctions(X):
            F = density(probability_amplitude(build_characteristic(psi, self.convention)))
            if self.output == "density":
                rows.append(F.values.ravel())
            else:
                rows.append(np.concatenate(marginals(F)))
        return np.array(rows)


class SchrodingerEigensolver(TransformerMixin, BaseEstimator):
    """Lowest eigenpairs of ``p^2/2m + V`` for a sampled potential.

    ``fit(V)`` takes the potential on the grid.  ``transform(X)`` projects
    wavefunctions onto the fitted eigenstates, returning complex coefficients
    ``<psi_k | psi>``.
    """

    def __init__(self, x0=-10.0, dx=20 / 2048, n_states=6, mass=1.0, hbar=1.0):
        self.x0 = x0
        self.dx = dx
        self.n_states = n_states
        self.mass = mass
        self.hbar = hbar

    def fit(self, X, y=None):
        V = check_potential(X)
        self.grid_ = check_grid(self.x0, self.dx, V.shape[0])
        sol = solve_eigen(build_hamiltonian(HamiltonianSpec(V, self.mass, self.hbar), self.grid_), self.n_states)
        self.energies_ = sol.energies
        self.eigenstates_ = np.array([s.values for s in sol.states])
        self.residuals_ = sol.residuals
        self.n_features_in_ = V.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "eigenstates_")
        X = check_wavefunctions(X, self.n_features_in_)
        return (X @ np.conj(self.eigenstates_).T) * self.grid_.dx

    def fit_transform(self, X, y=None, **fit_params):
        # fitting consumes a potential, transforming consumes wavefunctions
        raise TypeError("fit takes a potential and transform takes wavefunctions; call them separately")
