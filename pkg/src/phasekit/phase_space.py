"""Phase-space probability amplitude phi(x, p), density F(x, p) and their integrals.

All integrals are Riemann sums with weights ``dx`` and ``dp``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid1D, MomentumGrid, _backward, _forward
from .internal_space import CharacteristicAmplitude, DensityKernel

__all__ = [
    "ProbabilityAmplitudePS",
    "PhaseSpaceDensity",
    "probability_amplitude",
    "reconstruct_characteristic",
    "density",
    "marginals",
    "ensemble_average",
    "phase_space_moment",
    "wigner_moyal",
]


def _readonly(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ProbabilityAmplitudePS:
    """``values[i, k] = phi(x_i, p_k)``."""

    grid: Grid1D
    pgrid: MomentumGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values, complex))

    def total_mass(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.dx * self.pgrid.dp)


@dataclass(frozen=True, eq=False)
class PhaseSpaceDensity:
    """Non-negative ``values[i, k] = F(x_i, p_k)``."""

    grid: Grid1D
    pgrid: MomentumGrid
    values: np.ndarray

    def __post_init__(self):
        values = _readonly(self.values, float)
        if np.any(values < 0):
            raise ValueError("phase-space density has negative entries")
        object.__setattr__(self, "values", values)

    @property
    def weight(self) -> float:
        return self.grid.dx * self.pgrid.dp

    def total_mass(self) -> float:
        return float(np.sum(self.values) * self.weight)


def probability_amplitude(xi: CharacteristicAmplitude) -> ProbabilityAmplitudePS:
    """Transform every row ``xi(x_i, .)`` over x' to momentum."""
    pgrid = xi.grid.momentum_grid(xi.hbar)
    return ProbabilityAmplitudePS(xi.grid, pgrid, _forward(xi.values, xi.grid, pgrid, axis=1))


def reconstruct_characteristic(phi: ProbabilityAmplitudePS, convention: str = "plain") -> CharacteristicAmplitude:
    """Row-wise inverse transform; ``convention`` is only carried as a tag."""
    values = _backward(phi.values, phi.grid, phi.pgrid, axis=1)
    return CharacteristicAmplitude(phi.grid, values, convention, phi.pgrid.hbar)


def density(phi: ProbabilityAmplitudePS) -> PhaseSpaceDensity:
    v = phi.values
    return PhaseSpaceDensity(phi.grid, phi.pgrid, v.real**2 + v.imag**2)


def marginals(F: PhaseSpaceDensity) -> tuple[np.ndarray, np.ndarray]:
    """``(sum_k F dp, sum_i F dx)``: position density over x and momentum density over p."""
    return F.values.sum(axis=1) * F.pgrid.dp, F.values.sum(axis=0) * F.grid.dx


def phase_space_moment(F: PhaseSpaceDensity, n: int, m: int) -> float:
    """``sum_ik x_i^n p_k^m F_ik dx dp``."""
    xw = F.grid.x ** n
    pw = F.pgrid.p ** m
    return float(np.sum(F.values * np.multiply.outer(xw, pw)) * F.weight)


def ensemble_average(F: PhaseSpaceDensity, which: str) -> float:
    if which == "x":
        return phase_space_moment(F, 1, 0)
    if which == "p":
        return phase_space_moment(F, 0, 1)
    raise ValueError(f"which must be 'x' or 'p', got {which!r}")


def wigner_moyal(F: PhaseSpaceDensity, delta: float) -> DensityKernel:
    """``rho_i = sum_k F(x_i, p_k) exp(i p_k delta / hbar) dp`` for any real ``delta``."""
    phase = np.exp(1j * F.pgrid.p * delta / F.pgrid.hbar)
    return DensityKernel(F.grid, float(delta), np.sum(F.values * phase, axis=1) * F.pgrid.dp)
