"""Uniform 1-D grids, the unitary position/momentum transform and spectral derivatives.

Fourier convention used everywhere in the package::

    psi~(p) = (2 pi hbar)^(-1/2) * sum_j psi(x_j) exp(-i p x_j / hbar) dx

with ``x_j = x0 + j dx`` and ``p_k = k dp`` for ``k = -n/2 .. n/2 - 1``,
``dp = 2 pi hbar / (n dx)``.  With these weights the discrete map is unitary
between the ``dx``- and ``dp``-weighted inner products.  Transforms are periodic
over the span ``L = n dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridError",
    "Grid1D",
    "MomentumGrid",
    "ComplexField1D",
    "MomentumField",
    "make_grid",
    "to_momentum",
    "from_momentum",
    "spectral_derivative",
    "spectral_derivative_array",
]

MIN_POINTS = 16


class GridError(ValueError):
    """Raised for invalid grid parameters or mismatched grids."""


def _frozen(values, dtype=complex) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform sample lattice ``x_j = x0 + j * dx`` for ``j = 0 .. n-1``."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise GridError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        if not math.isfinite(self.dx) or self.dx <= 0:
            raise GridError(f"dx must be a finite positive spacing, got {self.dx!r}")
        if not math.isfinite(self.x0):
            raise GridError(f"x0 must be finite, got {self.x0!r}")
        if self.n < MIN_POINTS or not _is_power_of_two(self.n):
            raise GridError(f"n must be a power of two >= {MIN_POINTS}, got {self.n}")

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def momentum_grid(self, hbar: float = 1.0) -> "MomentumGrid":
        return MomentumGrid(self, hbar)

    def is_commensurate(self, delta: float, rtol: float = 1e-9) -> bool:
        steps = delta / self.dx
        return abs(steps - round(steps)) <= rtol * max(1.0, abs(steps))

    def shift_steps(self, delta: float) -> int:
        """Number of grid steps equal to ``delta``; raise if it is not a multiple of ``dx``."""
        if not self.is_commensurate(delta):
            raise GridError(
                f"displacement {delta!r} is not an integer multiple of dx={self.dx!r}"
            )
        return int(round(delta / self.dx))


def _momentum_spacing(dx: float, n: int, hbar: float) -> float:
    # Pick dp so that dx * dp * n reproduces 2*pi*hbar bit-for-bit when one of the
    # neighbouring doubles allows it; n is a power of two so the final product is exact.
    target = 2.0 * math.pi * hbar
    dp = target / (n * dx)
    if dx * dp * n == target:
        return dp
    lo = hi = dp
    for _ in range(8):
        lo = math.nextafter(lo, -math.inf)
        hi = math.nextafter(hi, math.inf)
        for cand in (lo, hi):
            if dx * cand * n == target:
                return cand
    return dp


@dataclass(frozen=True)
class MomentumGrid:
    """Momentum samples conjugate to ``grid``: ``p_k = k * dp``, ``k in [-n/2, n/2)``."""

    grid: Grid1D
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise GridError(f"hbar must be positive, got {self.hbar!r}")
        object.__setattr__(self, "hbar", float(self.hbar))

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def dp(self) -> float:
        return _momentum_spacing(self.grid.dx, self.grid.n, self.hbar)

    @property
    def k(self) -> np.ndarray:
        return np.arange(-(self.n // 2), self.n // 2)

    @property
    def p(self) -> np.ndarray:
        return self.k * self.dp

    def index_of(self, k: int) -> int:
        """Array position of integer wavenumber index ``k``."""
        if not -(self.n // 2) <= k < self.n // 2:
            raise GridError(f"wavenumber index {k} outside [{-(self.n // 2)}, {self.n // 2})")
        return k + self.n // 2


@dataclass(frozen=True, eq=False)
class ComplexField1D:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.grid.n,):
            raise GridError(f"expected {self.grid.n} samples, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx)


@dataclass(frozen=True, eq=False)
class MomentumField:
    pgrid: MomentumGrid
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (self.pgrid.n,):
            raise GridError(f"expected {self.pgrid.n} samples, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.pgrid.dp)


def make_grid(x0: float, dx: float, n: int) -> Grid1D:
    return Grid1D(x0, dx, n)


def _forward(values: np.ndarray, grid: Grid1D, pgrid: MomentumGrid, axis: int = -1) -> np.ndarray:
    spectrum = np.fft.fftshift(np.fft.fft(values, axis=axis), axes=axis)
    phase = np.exp(-1j * pgrid.p * grid.x0 / pgrid.hbar) * (grid.dx / math.sqrt(2 * math.pi * pgrid.hbar))
    shape = [1] * spectrum.ndim
    shape[axis] = -1
    return spectrum * phase.reshape(shape)


def _backward(values: np.ndarray, grid: Grid1D, pgrid: MomentumGrid, axis: int = -1) -> np.ndarray:
    phase = np.exp(1j * pgrid.p * grid.x0 / pgrid.hbar)
    shape = [1] * values.ndim
    shape[axis] = -1
    spectrum = np.fft.ifftshift(values * phase.reshape(shape), axes=axis)
    scale = pgrid.dp * grid.n / math.sqrt(2 * math.pi * pgrid.hbar)
    return np.fft.ifft(spectrum, axis=axis) * scale


def to_momentum(f: ComplexField1D, hbar: float = 1.0) -> MomentumField:
    """Unitary transform of a position-space field to the momentum grid."""
    pgrid = f.grid.momentum_grid(hbar)
    return MomentumField(pgrid, _forward(f.values, f.grid, pgrid))


def from_momentum(g: MomentumField) -> ComplexField1D:
    """Inverse of :func:`to_momentum`."""
    grid = g.pgrid.grid
    return ComplexField1D(grid, _backward(g.values, grid, g.pgrid))


def spectral_derivative_array(values: np.ndarray, dx: float, order: int, axis: int = -1) -> np.ndarray:
    """``d^order/dx^order`` of periodic samples along ``axis``.

    Multiplies the transform by ``(i p / hbar)^order``.  The unpaired
    ``k = -n/2`` bin keeps its (negative) wavenumber, which makes
    ``sum psi* (-i hbar d/dx)^m psi dx`` equal ``sum p^m |psi~|^2 dp`` exactly.
    """
    if int(order) != order or order < 1:
        raise ValueError(f"derivative order must be a positive integer, got {order!r}")
    n = values.shape[axis]
    wavenumber = 2 * np.pi * np.fft.fftfreq(n, d=dx)
    # fftfreq puts -n/2 at index n/2; keep it negative as in MomentumGrid
    factor = (1j * wavenumber) ** int(order)
    shape = [1] * np.ndim(values)
    shape[axis] = -1
    spectrum = np.fft.fft(values, axis=axis) * factor.reshape(shape)
    return np.fft.ifft(spectrum, axis=axis)


def spectral_derivative(f: ComplexField1D, order: int = 1) -> ComplexField1D:
    return ComplexField1D(f.grid, spectral_derivative_array(f.values, f.grid.dx, order))
