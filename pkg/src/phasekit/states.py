"""Closed-form reference wavefunctions on a :class:`~phasekit.grid.Grid1D`."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .grid import ComplexField1D, Grid1D, MomentumField, to_momentum

__all__ = [
    "StateError",
    "TailMassError",
    "WaveFunction",
    "StateSpec",
    "plane_wave",
    "gaussian",
    "ho_eigenstate",
    "build_state",
    "normalize",
    "hermite_functions",
    "closed_form",
    "TAIL_MASS_LIMIT",
]

TAIL_MASS_LIMIT = 1e-12
NORM_TOL = 1e-10


class StateError(ValueError):
    pass


class TailMassError(StateError):
    """The state carries too much probability outside the grid span."""


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Normalized complex amplitudes on a grid (``sum |psi|^2 dx = 1``)."""

    field: ComplexField1D
    hbar: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise StateError(f"hbar must be positive, got {self.hbar!r}")
        norm = self.field.norm2()
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"wavefunction is not normalized: sum |psi|^2 dx = {norm!r}")

    @property
    def grid(self) -> Grid1D:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    def momentum(self) -> MomentumField:
        return to_momentum(self.field, self.hbar)


@dataclass(frozen=True)
class StateSpec:
    """Parameters of one of the built-in reference states.

    ``kind`` is ``"plane_wave"`` (uses ``k_index``), ``"gaussian"`` (``center``,
    ``momentum``, ``width``) or ``"ho_eigenstate"`` (``level``, ``mass``, ``omega``).
    Use the :func:`plane_wave`, :func:`gaussian` and :func:`ho_eigenstate`
    helpers rather than filling fields by hand.
    """

    kind: str
    k_index: int = 0
    center: float = 0.0
    momentum: float = 0.0
    width: float = 1.0
    level: int = 0
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if self.kind == "plane_wave":
            if int(self.k_index) != self.k_index:
                raise StateError(f"k_index must be an integer, got {self.k_index!r}")
        elif self.kind == "gaussian":
            if not self.width > 0:
                raise StateError(f"gaussian width must be positive, got {self.width!r}")
        elif self.kind == "ho_eigenstate":
            if int(self.level) != self.level or self.level < 0:
                raise StateError(f"level must be a non-negative integer, got {self.level!r}")
            if not self.mass > 0:
                raise StateError(f"mass must be positive, got {self.mass!r}")
            if not self.omega > 0:
                raise StateError(f"omega must be positive, got {self.omega!r}")
        else:
            raise StateError(f"unknown state kind {self.kind!r}")


def plane_wave(k_index: int) -> StateSpec:
    return StateSpec("plane_wave", k_index=k_index)


def gaussian(center: float = 0.0, momentum: float = 0.0, width: float = 1.0) -> StateSpec:
    return StateSpec("gaussian", center=center, momentum=momentum, width=width)


def ho_eigenstate(level: int, mass: float = 1.0, omega: float = 1.0) -> StateSpec:
    return StateSpec("ho_eigenstate", level=level, mass=mass, omega=omega)


def hermite_functions(nmax: int, xi: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions ``h_0 .. h_nmax`` at dimensionless points ``xi``.

    Uses the normalized three-term recurrence, so every step stays O(1) and
    nothing overflows for levels in the hundreds.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((nmax + 1,) + xi.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * xi**2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for k in range(1, nmax):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * xi * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def closed_form(spec: StateSpec, x, hbar: float = 1.0, length: float | None = None) -> np.ndarray:
    """Analytic amplitude of ``spec`` at (possibly complex) points ``x``.

    Plane waves need the periodic ``length`` to fix their wavenumber and
    normalization; Hermite functions are only evaluated at real points.
    """
    if spec.kind == "plane_wave":
        if length is None:
            raise StateError("plane_wave needs the grid length")
        wavenumber = 2 * np.pi * spec.k_index / length
        return np.exp(1j * wavenumber * np.asarray(x)) / math.sqrt(length)
    if spec.kind == "gaussian":
        z = np.asarray(x)
        s = spec.width
        return (np.pi * s**2) ** -0.25 * np.exp(
            -((z - spec.center) ** 2) / (2 * s**2) + 1j * spec.momentum * z / hbar
        )
    scale = math.sqrt(spec.mass * spec.omega / hbar)
    xr = np.asarray(x, dtype=float)
    return math.sqrt(scale) * hermite_functions(spec.level, scale * xr)[spec.level].astype(complex)


def _gaussian_tail(spec: StateSpec, lo: float, hi: float) -> float:
    s = spec.width
    return 0.5 * (special.erfc((hi - spec.center) / s) + special.erfc((spec.center - lo) / s))


def _ho_density(spec: StateSpec, hbar: float):
    def rho(x):
        return abs(closed_form(spec, np.array([x]), hbar)[0]) ** 2

    return rho


def _ho_tail(spec: StateSpec, lo: float, hi: float, hbar: float) -> float:
    # symmetric density: one quad per side, out to where the Gaussian factor is negligible
    rho = _ho_density(spec, hbar)
    ell = math.sqrt(hbar / (spec.mass * spec.omega))
    far = ell * (math.sqrt(2 * spec.level + 1) + 40.0)
    tail = 0.0
    for edge in (hi, -lo):
        if edge < far:
            val, _ = integrate.quad(rho, max(edge, -far), far, limit=200, epsabs=1e-16, epsrel=1e-10)
            tail += val
    return tail


def required_halfwidth(spec: StateSpec, hbar: float = 1.0) -> float:
    """Half-width around the state's centre whose outside mass is below the tail limit."""
    if spec.kind == "gaussian":
        t = optimize.brentq(lambda u: special.erfc(u) - TAIL_MASS_LIMIT, 0.0, 20.0)
        return t * spec.width
    ell = math.sqrt(hbar / (spec.mass * spec.omega))
    start = ell * math.sqrt(2 * spec.level + 1)
    return optimize.brentq(
        lambda a: _ho_tail(spec, -a, a, hbar) - 0.5 * TAIL_MASS_LIMIT, start, start + 40 * ell, xtol=1e-6
    ) * (1 + 1e-6)


def tail_mass(spec: StateSpec, grid: Grid1D, hbar: float = 1.0) -> float:
    """Probability mass of ``spec`` lying outside ``[x0, x0 + L)``."""
    lo, hi = grid.x0, grid.x0 + grid.length
    if spec.kind == "plane_wave":
        return 0.0
    if spec.kind == "gaussian":
        return float(_gaussian_tail(spec, lo, hi))
    return float(_ho_tail(spec, lo, hi, hbar))


def normalize(raw: ComplexField1D, hbar: float = 1.0) -> WaveFunction:
    norm = raw.norm2()
    if not norm > 0 or not math.isfinite(norm):
        raise StateError("cannot normalize a field with zero (or non-finite) norm")
    return WaveFunction(ComplexField1D(raw.grid, raw.values / math.sqrt(norm)), hbar)


def build_state(spec: StateSpec, grid: Grid1D, hbar: float = 1.0) -> WaveFunction:
    """Sample ``spec`` on ``grid`` and normalize on the grid.

    Raises :class:`TailMassError` when more than ``1e-12`` of the probability
    falls outside the grid span; the message names the span that would fit.
    """
    if not hbar > 0:
        raise StateError(f"hbar must be positive, got {hbar!r}")
    tail = tail_mass(spec, grid, hbar)
    if tail >= TAIL_MASS_LIMIT:
        half = required_halfwidth(spec, hbar)
        centre = spec.center if spec.kind == "gaussian" else 0.0
        raise TailMassError(
            f"{spec.kind} leaves tail mass {tail:.3e} outside [{grid.x0}, {grid.x0 + grid.length}); "
            f"required span is at least [{centre - half:.6g}, {centre + half:.6g}]"
        )
    values = closed_form(spec, grid.x, hbar, grid.length)
    return normalize(ComplexField1D(grid, values), hbar)
