"""Characteristic amplitude xi(x, x') on the internal space.

The amplitude is stored densely as ``values[i, j] = xi(x_i, x'_j)`` with the
same grid on both axes.  Two separable constructions are supported:

* ``"plain"``      xi(x, x') = psi(x) psi(x')
* ``"conjugate"``  xi(x, x') = psi*(x) psi(x')
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid1D, GridError
from .states import StateError, StateSpec, WaveFunction, closed_form

__all__ = [
    "CONVENTIONS",
    "CharacteristicAmplitude",
    "DensityKernel",
    "build_characteristic",
    "symmetry_residual",
    "translation_kernel",
    "analyticity_residual",
    "mapped_amplitude",
]

CONVENTIONS = ("plain", "conjugate")


@dataclass(frozen=True, eq=False)
class CharacteristicAmplitude:
    grid: Grid1D
    values: np.ndarray
    convention: str = "plain"
    hbar: float = 1.0

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        values = np.array(self.values, dtype=complex)
        if values.shape != (self.grid.n, self.grid.n):
            raise GridError(f"expected a {self.grid.n}x{self.grid.n} field, got {values.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def row_norms(self) -> np.ndarray:
        """``sum_j |xi(x_i, x'_j)|^2 dx'`` for each row, i.e. |psi(x_i)|^2 for separable input."""
        return np.sum(np.abs(self.values) ** 2, axis=1) * self.grid.dx


@dataclass(frozen=True, eq=False)
class DensityKernel:
    """Samples ``rho(x_i + delta/2, x_i - delta/2)``."""

    grid: Grid1D
    delta: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def mass(self) -> complex:
        return complex(np.sum(self.values) * self.grid.dx)


def build_characteristic(psi: WaveFunction, convention: str = "plain") -> CharacteristicAmplitude:
    v = psi.values
    left = v if convention == "plain" else np.conj(v)
    return CharacteristicAmplitude(psi.grid, np.outer(left, v), convention, psi.hbar)


def symmetry_residual(xi: CharacteristicAmplitude) -> float:
    """Largest ``|xi(x, x') - xi(x', x)|``."""
    return float(np.max(np.abs(xi.values - xi.values.T)))


def translation_kernel(xi: CharacteristicAmplitude, delta: float) -> DensityKernel:
    """``rho_i = sum_j xi*(x_i, x'_j) xi(x_i, x'_j + delta) dx'`` with periodic wrap.

    ``delta`` has to be a whole number of grid steps.
    """
    steps = xi.grid.shift_steps(delta)
    shifted = np.roll(xi.values, -steps, axis=1)
    rho = np.sum(np.conj(xi.values) * shifted, axis=1) * xi.grid.dx
    return DensityKernel(xi.grid, float(delta), rho)


def mapped_amplitude(spec: StateSpec, x: np.ndarray, y: np.ndarray, hbar: float = 1.0,
                     length: float | None = None) -> np.ndarray:
    """``zeta(x, x') = psi(x) psi(i x')`` on the mesh ``x[:, None], y[None, :]``."""
    if spec.kind not in ("plane_wave", "gaussian"):
        raise StateError(f"no closed-form continuation psi(i x') for state kind {spec.kind!r}")
    left = closed_form(spec, np.asarray(x, dtype=float), hbar, length)
    right = closed_form(spec, 1j * np.asarray(y, dtype=float), hbar, length)
    return np.outer(left, right)


# fourth-order central first-difference weights for offsets -2..2
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


def _central_diff(z: np.ndarray, h: float, axis: int) -> np.ndarray:
    n = z.shape[axis]
    acc = 0.0
    for offset, w in zip(range(-2, 3), _D1):
        if w:
            acc = acc + w * np.take(z, np.arange(2 + offset, n - 2 + offset), axis=axis)
    return acc / h


def analyticity_residual(spec: StateSpec, grid: Grid1D | None = None, bounds=(-1.0, 1.0, -1.0, 1.0),
                         samples: int = 128, hbar: float = 1.0) -> float:
    """Max Cauchy-Riemann residual ``|d zeta/dx + i d zeta/dx'|`` of the mapped amplitude.

    ``zeta`` is treated as a function of ``z = x + i x'`` on the patch
    ``bounds = (xmin, xmax, x'min, x'max)`` sampled ``samples`` times per side.
    Derivatives are fourth-order central differences on the interior nodes.
    ``grid`` supplies the periodic length that fixes a plane wave's wavenumber
    and normalization; it is ignored for Gaussians.
    """
    if spec.kind == "plane_wave" and grid is None:
        raise StateError("plane_wave analyticity needs the grid that fixes its wavenumber")
    if samples < 5:
        raise ValueError("need at least 5 samples per side")
    xmin, xmax, ymin, ymax = bounds
    x = np.linspace(xmin, xmax, samples)
    y = np.linspace(ymin, ymax, samples)
    zeta = mapped_amplitude(spec, x, y, hbar, grid.length if grid is not None else None)
    dzdx = _central_diff(zeta, x[1] - x[0], axis=0)[:, 2:-2]
    dzdy = _central_diff(zeta, y[1] - y[0], axis=1)[2:-2, :]
    return float(np.max(np.abs(dzdx + 1j * dzdy)))
