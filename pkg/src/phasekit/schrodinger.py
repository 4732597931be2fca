"""Time-independent Schrodinger eigenproblem and energy expectations.

Eigenpairs come from a second-order finite-difference Hamiltonian with
Dirichlet walls one step outside the grid, i.e. at ``x0 - dx`` and
``x0 + n dx``; the box width seen by the discretization is ``(n + 1) dx``.
Expectation values use the spectral kinetic operator instead, so that they
agree with the moment routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .grid import ComplexField1D, Grid1D
from .internal_space import build_characteristic
from .moments import moment_p, momentum_operator
from .states import WaveFunction

__all__ = [
    "EigenSolverError",
    "HamiltonianSpec",
    "TridiagonalHamiltonian",
    "EigenSolution",
    "ConsistencyReport",
    "zero_potential",
    "harmonic_potential",
    "quartic_potential",
    "square_well_potential",
    "build_hamiltonian",
    "solve_eigen",
    "energy_expectation",
    "derivation_consistency",
]


class EigenSolverError(RuntimeError):
    pass


def zero_potential(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def harmonic_potential(x, mass=1.0, omega=1.0):
    return 0.5 * mass * omega**2 * np.asarray(x, dtype=float) ** 2


def quartic_potential(x, strength=1.0):
    return strength * np.asarray(x, dtype=float) ** 4


def square_well_potential(x, depth=1.0, half_width=1.0):
    """``-depth`` inside ``|x| < half_width``, zero outside."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < half_width, -depth, 0.0)


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """``H = p^2 / 2m + V(x)`` with ``V`` sampled on the grid it will be used with."""

    potential: np.ndarray
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass!r}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")
        v = np.array(self.potential, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("potential must be a 1-D array of finite samples")
        v.flags.writeable = False
        object.__setattr__(self, "potential", v)

    @classmethod
    def from_function(cls, func, grid: Grid1D, mass=1.0, hbar=1.0, **kwargs):
        return cls(func(grid.x, **kwargs), mass, hbar)


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    grid: Grid1D
    diagonal: np.ndarray
    offdiagonal: np.ndarray
    hbar: float = 1.0

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diagonal * v
        out[:-1] += self.offdiagonal * v[1:]
        out[1:] += self.offdiagonal * v[:-1]
        return out

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    energies: np.ndarray
    states: list = field(default_factory=list)
    residuals: np.ndarray | None = None

    def gram(self) -> np.ndarray:
        if not self.states:
            return np.zeros((0, 0))
        dx = self.states[0].grid.dx
        mat = np.array([s.values for s in self.states])
        return (np.conj(mat) @ mat.T) * dx


def build_hamiltonian(spec: HamiltonianSpec, grid: Grid1D) -> TridiagonalHamiltonian:
    if spec.potential.shape != (grid.n,):
        raise ValueError(f"potential has {spec.potential.shape[0]} samples, grid has {grid.n}")
    t = spec.hbar**2 / (spec.mass * grid.dx**2)
    diagonal = t + spec.potential
    offdiagonal = np.full(grid.n - 1, -0.5 * t)
    return TridiagonalHamiltonian(grid, diagonal, offdiagonal, spec.hbar)


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    # first sample above 1e-3 of the peak is made positive, so output is bit-stable
    mag = np.abs(vec)
    lead = int(np.argmax(mag > 1e-3 * mag.max()))
    return -vec if vec[lead] < 0 else vec


def solve_eigen(H: TridiagonalHamiltonian, k: int, residual_tol: float = 1e-8) -> EigenSolution:
    """Lowest ``k`` eigenpairs, ascending, as grid-normalized wavefunctions.

    Uses LAPACK bisection plus inverse iteration on the tridiagonal matrix.
    """
    n = H.grid.n
    if int(k) != k or not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n={n}, got {k!r}")
    k = int(k)
    try:
        energies, vecs = linalg.eigh_tridiagonal(
            H.diagonal, H.offdiagonal, select="i", select_range=(0, k - 1),
            lapack_driver="stebz", check_finite=True,
        )
    except (linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"tridiagonal eigensolver failed for n={n}, k={k}: {exc}") from exc

    residuals = np.empty(k)
    states = []
    for i in range(k):
        v = _fix_sign(vecs[:, i])
        hv = H.matvec(v)
        residuals[i] = np.linalg.norm(hv - energies[i] * v) / max(np.linalg.norm(hv), np.finfo(float).tiny)
        states.append(WaveFunction(ComplexField1D(H.grid, v / math.sqrt(H.grid.dx)), H.hbar))
    bad = np.flatnonzero(residuals > residual_tol)
    if bad.size:
        detail = ", ".join(f"k={i}: {residuals[i]:.2e}" for i in bad)
        raise EigenSolverError(
            f"eigenpairs did not converge to relative residual {residual_tol:g} (stebz/stein): {detail}"
        )
    return EigenSolution(np.asarray(energies), states, residuals)


def _kinetic(psi: WaveFunction, mass: float, hbar: float) -> complex:
    v = psi.values
    p2 = momentum_operator(v, psi.grid.dx, 2, hbar)
    return complex(np.sum(np.conj(v) * p2) * psi.grid.dx) / (2 * mass)


def _potential(psi: WaveFunction, spec: HamiltonianSpec) -> float:
    return float(np.sum(np.abs(psi.values) ** 2 * spec.potential) * psi.grid.dx)


def energy_expectation(psi: WaveFunction, spec: HamiltonianSpec) -> float:
    """``<psi| p^2/2m + V |psi>`` with a spectral kinetic term.

    Raises if the result has an imaginary part above 1e-10.
    """
    total = _kinetic(psi, spec.mass, spec.hbar) + _potential(psi, spec)
    if abs(total.imag) > 1e-10:
        raise ValueError(f"energy expectation is not real: imaginary part {total.imag:.3e}")
    return float(total.real)


@dataclass(frozen=True)
class ConsistencyReport:
    kinetic_internal: float
    potential: float
    total_internal: float
    expectation: float
    relative_difference: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.relative_difference <= self.tolerance


def derivation_consistency(psi: WaveFunction, spec: HamiltonianSpec, rtol: float = 1e-8) -> ConsistencyReport:
    """Compare ``<p^2>/2m`` over the internal space plus ``<V>`` with :func:`energy_expectation`."""
    xi = build_characteristic(psi, "plain")
    # moment_p works in the amplitude's hbar; the Hamiltonian's hbar wins here
    p2 = moment_p(xi, 2).value * (spec.hbar / xi.hbar) ** 2
    kinetic = float(p2.real) / (2 * spec.mass)
    pot = _potential(psi, spec)
    total = kinetic + pot
    expected = energy_expectation(psi, spec)
    rel = abs(total - expected) / max(abs(expected), 1e-300)
    report = ConsistencyReport(kinetic, pot, total, expected, rel, rtol)
    if not report.passed:
        raise ValueError(f"kinetic/potential split disagrees with <H>: relative difference {rel:.3e}")
    return report
