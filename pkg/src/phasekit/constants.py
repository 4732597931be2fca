"""Algebra of the vacuum-string relation ``h / c = 2 pi^2 m_e A^2 / d`` (SI units)."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "PhysicalConstants",
    "StringParams",
    "CODATA_2018",
    "amplitude_from_spacing",
    "ratio_residual",
    "planck_limit_scan",
    "light_speed_scan",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Planck constant (J s), speed of light (m/s) and electron mass (kg).

    ``h = 0`` is accepted so the classical limit can be evaluated directly.
    """

    h: float = 6.62607015e-34
    c: float = 299792458.0
    m_e: float = 9.1093837015e-31

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h >= 0):
            raise ValueError(f"h must be non-negative, got {self.h!r}")
        for name in ("c", "m_e"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive, got {val!r}")

    def scaled(self, **factors: float) -> "PhysicalConstants":
        return replace(self, **{k: getattr(self, k) * f for k, f in factors.items()})


CODATA_2018 = PhysicalConstants()


@dataclass(frozen=True)
class StringParams:
    A: float
    d: float

    def __post_init__(self):
        if not self.A >= 0:
            raise ValueError(f"amplitude A must be non-negative, got {self.A!r}")
        if not self.d > 0:
            raise ValueError(f"spacing d must be positive, got {self.d!r}")


def amplitude_from_spacing(d: float, consts: PhysicalConstants = CODATA_2018) -> float:
    """``A = sqrt(h d / (2 pi^2 m_e c))``."""
    if not d > 0:
        raise ValueError(f"spacing d must be positive, got {d!r}")
    return math.sqrt(consts.h * d / (2 * math.pi**2 * consts.m_e * consts.c))


def ratio_residual(params: StringParams, consts: PhysicalConstants = CODATA_2018) -> float:
    """``|h/c - 2 pi^2 m_e A^2 / d| / (h/c)``."""
    lhs = consts.h / consts.c
    rhs = 2 * math.pi**2 * consts.m_e * params.A**2 / params.d
    return abs(lhs - rhs) / lhs


def planck_limit_scan(h_values, d: float, consts: PhysicalConstants = CODATA_2018) -> list[tuple[float, float]]:
    """``(h, A(h))`` for each Planck constant in ``h_values`` (all positive, descending)."""
    h_values = [float(h) for h in h_values]
    if any(not h > 0 for h in h_values):
        raise ValueError("all h values must be positive")
    if any(b >= a for a, b in zip(h_values, h_values[1:])):
        raise ValueError("h values must be strictly descending")
    return [(h, amplitude_from_spacing(d, replace(consts, h=h))) for h in h_values]


def light_speed_scan(c_values, d: float, consts: PhysicalConstants = CODATA_2018) -> list[tuple[float, float]]:
    """``(c, A(c))`` for each light speed in ``c_values`` (all positive, ascending)."""
    c_values = [float(c) for c in c_values]
    if any(not c > 0 for c in c_values):
        raise ValueError("all c values must be positive")
    if any(b <= a for a, b in zip(c_values, c_values[1:])):
        raise ValueError("c values must be strictly ascending")
    return [(c, amplitude_from_spacing(d, replace(consts, c=c))) for c in c_values]
