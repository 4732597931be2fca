"""Moments <x^n p^m> along three independent routes.

``internal``     double sum over the internal space with the momentum operator
                 ``-i hbar d/dx'`` acting on the second index of xi
``separable``    product of the position and momentum 1-D integrals of psi
``phase_space``  ``sum x^n p^m F dx dp`` over the phase-space density
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import spectral_derivative_array
from .internal_space import CharacteristicAmplitude, build_characteristic
from .phase_space import density, phase_space_moment, probability_amplitude
from .states import WaveFunction

__all__ = [
    "MAX_ORDER",
    "PATHS",
    "MomentRequest",
    "MomentResult",
    "momentum_operator",
    "moment_x",
    "moment_p",
    "moment_xp",
    "separable_moment",
    "compute_moment",
    "moment_table",
]

MAX_ORDER = 8
PATHS = ("internal", "separable", "phase_space")


def _check_order(name, value):
    if int(value) != value or not 0 <= value <= MAX_ORDER:
        raise ValueError(f"{name} must be an integer in [0, {MAX_ORDER}], got {value!r}")


@dataclass(frozen=True)
class MomentRequest:
    n: int
    m: int
    path: str = "internal"

    def __post_init__(self):
        _check_order("n", self.n)
        _check_order("m", self.m)
        if self.n + self.m < 1:
            raise ValueError("at least one of n, m must be positive")
        if self.path not in PATHS:
            raise ValueError(f"path must be one of {PATHS}, got {self.path!r}")


@dataclass(frozen=True)
class MomentResult:
    value: complex
    path: str
    n: int = 0
    m: int = 0
    # |<x^n p^m> - <p^m x^n>|; only the internal mixed route computes it
    ordering_difference: float | None = None

    @property
    def imaginary_residual(self) -> float:
        return abs(self.value.imag)


def momentum_operator(values: np.ndarray, dx: float, m: int, hbar: float = 1.0, axis: int = -1) -> np.ndarray:
    """Apply ``(-i hbar d/dx)^m`` spectrally along ``axis``."""
    if m == 0:
        return np.asarray(values, dtype=complex)
    return (-1j * hbar) ** m * spectral_derivative_array(values, dx, m, axis=axis)


def _double_sum(xi: CharacteristicAmplitude, operated: np.ndarray) -> complex:
    return complex(np.sum(np.conj(xi.values) * operated) * xi.grid.dx**2)


def moment_x(xi: CharacteristicAmplitude, n: int) -> MomentResult:
    _check_order("n", n)
    xn = (xi.grid.x ** n)[:, None]
    return MomentResult(_double_sum(xi, xn * xi.values), "internal", n, 0)


def moment_p(xi: CharacteristicAmplitude, m: int) -> MomentResult:
    _check_order("m", m)
    operated = momentum_operator(xi.values, xi.grid.dx, m, xi.hbar, axis=1)
    return MomentResult(_double_sum(xi, operated), "internal", 0, m)


def moment_xp(xi: CharacteristicAmplitude, n: int, m: int, order: str = "xp") -> MomentResult:
    """Mixed moment with ``x^n`` on the x index and the momentum operator on x'.

    Both operator orderings are evaluated; the result carries the requested one
    and the absolute difference between the two.
    """
    _check_order("n", n)
    _check_order("m", m)
    if order not in ("xp", "px"):
        raise ValueError(f"order must be 'xp' or 'px', got {order!r}")
    xn = (xi.grid.x ** n)[:, None]
    dx, hbar = xi.grid.dx, xi.hbar
    xp = _double_sum(xi, xn * momentum_operator(xi.values, dx, m, hbar, axis=1))
    px = _double_sum(xi, momentum_operator(xn * xi.values, dx, m, hbar, axis=1))
    value = xp if order == "xp" else px
    return MomentResult(value, "internal", n, m, abs(xp - px))


def separable_moment(psi: WaveFunction, n: int, m: int) -> MomentResult:
    """``(sum psi* x^n psi dx) * (sum psi* (-i hbar d/dx)^m psi dx)``."""
    _check_order("n", n)
    _check_order("m", m)
    v, dx = psi.values, psi.grid.dx
    pos = np.sum(np.conj(v) * psi.grid.x ** n * v) * dx
    mom = np.sum(np.conj(v) * momentum_operator(v, dx, m, psi.hbar)) * dx
    return MomentResult(complex(pos * mom), "separable", n, m)


def compute_moment(psi: WaveFunction, request: MomentRequest, convention: str = "plain") -> MomentResult:
    """Evaluate one request; builds xi (and F) from ``psi`` as the route needs."""
    if request.path == "separable":
        return separable_moment(psi, request.n, request.m)
    xi = build_characteristic(psi, convention)
    if request.path == "internal":
        return moment_xp(xi, request.n, request.m)
    F = density(probability_amplitude(xi))
    return MomentResult(complex(phase_space_moment(F, request.n, request.m)), "phase_space",
                        request.n, request.m)


def _internal_table(xi: CharacteristicAmplitude, pairs) -> dict:
    # Row sums sum_j xi* (P^m xi) dx' are shared by every n with the same m; the
    # px ordering needs its own transform of x^n xi whenever both powers are nonzero.
    dx, hbar, x = xi.grid.dx, xi.hbar, xi.grid.x
    conj = np.conj(xi.values)
    rows = {}
    out = {}
    for n, m in pairs:
        if m not in rows:
            operated = momentum_operator(xi.values, dx, m, hbar, axis=1)
            rows[m] = np.sum(conj * operated, axis=1) * dx
        xp = complex(np.sum(x**n * rows[m]) * dx)
        if n and m:
            operated = momentum_operator((x**n)[:, None] * xi.values, dx, m, hbar, axis=1)
            px = complex(np.sum(np.sum(conj * operated, axis=1) * dx) * dx)
        else:
            px = xp
        out[n, m] = MomentResult(xp, "internal", n, m, abs(xp - px))
    return out


def moment_table(psi: WaveFunction, pairs, paths=PATHS, convention: str = "plain") -> list[MomentResult]:
    """All ``(n, m)`` pairs along every requested route, ordered pair-major."""
    requests = [MomentRequest(n, m, p) for n, m in pairs for p in paths]
    unique = list(dict.fromkeys((r.n, r.m) for r in requests))
    internal = phase = None
    if "internal" in paths or "phase_space" in paths:
        xi = build_characteristic(psi, convention)
        if "internal" in paths:
            internal = _internal_table(xi, unique)
        if "phase_space" in paths:
            F = density(probability_amplitude(xi))
            phase = {(n, m): MomentResult(complex(phase_space_moment(F, n, m)), "phase_space", n, m)
                     for n, m in unique}
    out = []
    for req in requests:
        if req.path == "separable":
            out.append(separable_moment(psi, req.n, req.m))
        elif req.path == "internal":
            out.append(internal[req.n, req.m])
        else:
            out.append(phase[req.n, req.m])
    return out
