"""Invariant catalogue evaluated by ``phasekit verify``.

Every check produces a :class:`~phasekit.persistence.CheckResult` whose
``value`` is the measured discrepancy and passes when ``value <= tolerance``.
"""

from __future__ import annotations

import math

import numpy as np

from . import constants as vc
from .grid import ComplexField1D, from_momentum, make_grid, spectral_derivative, to_momentum
from .internal_space import analyticity_residual, build_characteristic, symmetry_residual, translation_kernel
from .moments import moment_table
from .persistence import CheckResult, ConstantsRequest, ExperimentConfig
from .phase_space import density, marginals, phase_space_moment, probability_amplitude, reconstruct_characteristic, wigner_moyal
from .schrodinger import build_hamiltonian, derivation_consistency, energy_expectation, solve_eigen
from .states import TailMassError, WaveFunction, build_state, gaussian, ho_eigenstate, plane_wave

__all__ = ["DEFAULT_TOLERANCES", "MOMENT_PAIRS", "relative_gap", "run_checks"]

DEFAULT_TOLERANCES = {
    "grid.dxdpn_identity": 0.0,
    "grid.unitarity": 1e-12,
    "grid.round_trip": 1e-12,
    "grid.derivative_plane_wave": 1e-10,
    "states.normalization": 1e-10,
    "states.ho_orthonormality": 1e-8,
    "internal.symmetry": 1e-14,
    "internal.row_norms": 1e-10,
    "internal.kernel_zero_shift": 1e-10,
    "internal.kernel_hermiticity": 1e-12,
    "internal.analyticity_plane_wave": 1e-8,
    "internal.analyticity_gaussian": math.inf,
    "phase_space.positivity": 0.0,
    "phase_space.normalization": 1e-10,
    "phase_space.factorization": 1e-12,
    "phase_space.amplitude_round_trip": 1e-12,
    "phase_space.convention_invariance": 1e-12,
    "phase_space.kernel_equivalence": 1e-10,
    "phase_space.statistical_independence": 1e-10,
    "moments.path_agreement": 1e-8,
    "moments.ordering": 1e-12,
    "moments.convention_invariance": 1e-12,
    "moments.hermiticity": 1e-10,
    "eigen.orthonormality": 1e-8,
    "eigen.residual": 1e-8,
    "eigen.harmonic_spectrum": 5e-4,
    "eigen.box_spectrum": 1e-3,
    "eigen.convergence_order": 0.5,
    "eigen.moment_paths": 1e-8,
    "energy.eigenstate_expectation": 5e-4,
    "energy.derivation_consistency": 1e-8,
    "energy.refinement_monotone": 0.0,
    "constants.round_trip": 1e-14,
    "constants.sqrt_h_scaling": 1e-12,
    "constants.inv_sqrt_c_scaling": 1e-12,
    "constants.classical_limit": 0.0,
}

MOMENT_PAIRS = [(n, m) for n in range(5) for m in range(5) if n + m >= 1]
ABS_FLOOR = 1e-10


def relative_gap(a: complex, b: complex, rtol: float, atol: float = ABS_FLOOR) -> float:
    """Discrepancy scaled so that ``<= rtol`` means agreement.

    Near zero (both magnitudes under ``atol / rtol``) the absolute gap is
    rescaled by ``rtol / atol`` instead, i.e. the comparison becomes absolute.
    """
    gap = abs(a - b)
    scale = max(abs(a), abs(b))
    if rtol > 0 and scale * rtol <= atol:
        return gap * rtol / atol
    return gap / scale if scale > 0 else gap


def path_disagreement(table, rtol: float) -> float:
    """Worst pairwise :func:`relative_gap` among routes of each ``(n, m)``."""
    groups = {}
    for r in table:
        groups.setdefault((r.n, r.m), []).append(r.value)
    worst = 0.0
    for values in groups.values():
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                worst = max(worst, relative_gap(values[i], values[j], rtol))
    return worst


class _Collector:
    def __init__(self, overrides):
        self.tol = dict(DEFAULT_TOLERANCES)
        self.tol.update(overrides)
        self.results = []

    def add(self, name, value, detail=""):
        tol = self.tol[name]
        value = float(value)
        self.results.append(CheckResult(name, value, tol, bool(value <= tol), detail))

    def flag(self, name, ok, detail=""):
        self.add(name, 0.0 if ok else 1.0, detail)


def _grid_checks(c, psi: WaveFunction):
    grid = psi.grid
    pg = grid.momentum_grid(psi.hbar)
    c.add("grid.dxdpn_identity", abs(grid.dx * pg.dp * grid.n - 2 * math.pi * psi.hbar))
    mom = to_momentum(psi.field, psi.hbar)
    c.add("grid.unitarity", abs(mom.norm2() - psi.field.norm2()) / psi.field.norm2())
    c.add("grid.round_trip", np.max(np.abs(from_momentum(mom).values - psi.values)))
    k = 3
    wavenumber = 2 * math.pi * k / grid.length
    wave = ComplexField1D(grid, np.exp(1j * wavenumber * grid.x))
    err = np.max(np.abs(spectral_derivative(wave, 1).values - 1j * wavenumber * wave.values))
    c.add("grid.derivative_plane_wave", err, f"k_index={k}")


def _state_checks(c, psi: WaveFunction):
    c.add("states.normalization", abs(psi.field.norm2() - 1.0))
    try:
        family = [build_state(ho_eigenstate(j), psi.grid, psi.hbar) for j in range(10)]
    except TailMassError as exc:
        c.add("states.ho_orthonormality", math.inf, f"grid too narrow for levels 0..9: {exc}")
        return
    mat = np.array([s.values for s in family])
    gram = (np.conj(mat) @ mat.T) * psi.grid.dx
    c.add("states.ho_orthonormality", np.max(np.abs(gram - np.eye(10))), "levels 0..9")


def _commensurate_deltas(grid, requested):
    deltas = [0.0, grid.dx] + [d for d in requested if grid.is_commensurate(d)]
    return list(dict.fromkeys(deltas))


def _phase_space_checks(c, psi: WaveFunction, convention: str, kernel_deltas):
    xi = build_characteristic(psi, convention)
    plain = xi if convention == "plain" else build_characteristic(psi, "plain")
    other = build_characteristic(psi, "conjugate" if convention == "plain" else "plain")
    c.add("internal.symmetry", symmetry_residual(plain), "plain convention")
    c.add("internal.row_norms", np.max(np.abs(xi.row_norms() - np.abs(psi.values) ** 2)))

    phi = probability_amplitude(xi)
    F = density(phi)
    F_other = density(probability_amplitude(other))
    pos, mom = marginals(F)
    psi_p = to_momentum(psi.field, psi.hbar).values
    separable = np.multiply.outer(np.abs(psi.values) ** 2, np.abs(psi_p) ** 2)

    c.add("phase_space.positivity", max(0.0, -float(F.values.min())))
    c.add("phase_space.normalization", abs(F.total_mass() - 1.0))
    c.add("phase_space.factorization", np.max(np.abs(F.values - separable)))
    c.add("phase_space.amplitude_round_trip", np.max(np.abs(reconstruct_characteristic(phi).values - xi.values)))
    pos_o, mom_o = marginals(F_other)
    c.add("phase_space.convention_invariance", max(
        np.max(np.abs(F.values - F_other.values)),
        np.max(np.abs(pos - pos_o)),
        np.max(np.abs(mom - mom_o)),
    ), "F and both marginals")

    k0 = translation_kernel(xi, 0.0)
    c.add("internal.kernel_zero_shift", np.max(np.abs(k0.values - pos)))
    herm = 0.0
    equiv = 0.0
    for d in kernel_deltas:
        fwd = translation_kernel(plain, d)
        back = translation_kernel(plain, -d)
        herm = max(herm, np.max(np.abs(back.values - np.conj(fwd.values))))
        equiv = max(equiv, np.max(np.abs(translation_kernel(xi, d).values - wigner_moyal(F, d).values)))
    detail = "deltas=" + ";".join(format(d, ".6g") for d in kernel_deltas)
    c.add("internal.kernel_hermiticity", herm, detail)
    c.add("phase_space.kernel_equivalence", equiv, detail)

    indep = 0.0
    tol = c.tol["phase_space.statistical_independence"]
    for n, m in MOMENT_PAIRS:
        joint = phase_space_moment(F, n, m)
        product = phase_space_moment(F, n, 0) * phase_space_moment(F, 0, m)
        indep = max(indep, relative_gap(joint, product, tol))
    c.add("phase_space.statistical_independence", indep, "n,m<=4, relative")


def _moment_checks(c, psi: WaveFunction, convention: str):
    table = moment_table(psi, MOMENT_PAIRS, convention=convention)
    name = "moments.path_agreement"
    c.add(name, path_disagreement(table, c.tol[name]), "n,m<=4, relative")
    c.add("moments.ordering", max(r.ordering_difference for r in table if r.path == "internal"))
    c.add("moments.hermiticity", max(r.imaginary_residual for r in table))
    other = moment_table(psi, MOMENT_PAIRS, convention="conjugate" if convention == "plain" else "plain")
    c.add("moments.convention_invariance", max(abs(a.value - b.value) for a, b in zip(table, other)))


def _analyticity_checks(c):
    grid = make_grid(-math.pi, 2 * math.pi / 64, 64)
    c.add("internal.analyticity_plane_wave", analyticity_residual(plane_wave(1), grid), "K=1 on [-1,1]^2, 128^2")
    c.add("internal.analyticity_gaussian", analyticity_residual(gaussian()), "diagnostic only")


def _eigen_checks(c, config: ExperimentConfig, psi: WaveFunction):
    ham = config.hamiltonian
    k = config.outputs.spectrum or 4
    grid = config.grid
    spec = ham.spec(grid, config.hbar)
    sol = solve_eigen(build_hamiltonian(spec, grid), k)
    c.add("eigen.orthonormality", np.max(np.abs(sol.gram() - np.eye(k))))
    c.add("eigen.residual", float(np.max(sol.residuals)))

    if ham.potential == "harmonic":
        omega = ham.params.get("omega", 1.0)
        exact = config.hbar * omega * (np.arange(k) + 0.5)
        c.add("eigen.harmonic_spectrum", np.max(np.abs(sol.energies - exact)), f"levels 0..{k - 1}")
        errors = []
        for factor in (1, 2, 4):
            g = make_grid(grid.x0, grid.dx / factor, grid.n * factor)
            e0 = solve_eigen(build_hamiltonian(ham.spec(g, config.hbar), g), 1).energies[0]
            errors.append(abs(e0 - 0.5 * config.hbar * omega))
        ratios = [errors[0] / errors[1], errors[1] / errors[2]]
        c.add("eigen.convergence_order", max(abs(r - 4.0) for r in ratios),
              "ratios=" + ";".join(format(r, ".6g") for r in ratios))
    elif ham.potential == "zero":
        width = (grid.n + 1) * grid.dx
        levels = np.arange(1, min(k, 4) + 1)
        exact = (config.hbar * math.pi * levels) ** 2 / (2 * ham.mass * width**2)
        c.add("eigen.box_spectrum", np.max(np.abs(sol.energies[: len(levels)] - exact) / exact),
              f"Dirichlet width {(grid.n + 1)}*dx")

    gaps = [abs(energy_expectation(s, spec) - e) for s, e in zip(sol.states, sol.energies)]
    c.add("energy.eigenstate_expectation", max(gaps))
    worst = 0.0
    for s in [psi] + sol.states[:4]:
        worst = max(worst, derivation_consistency(s, spec, rtol=math.inf).relative_difference)
    c.add("energy.derivation_consistency", worst, "configured state and eigenstates 0..3")

    levels = min(k, 4)
    history = []
    for factor in (1, 2, 4):
        g = make_grid(grid.x0, grid.dx / factor, grid.n * factor)
        sp = ham.spec(g, config.hbar)
        ref = solve_eigen(build_hamiltonian(sp, g), levels)
        history.append([abs(energy_expectation(s, sp) - e) for s, e in zip(ref.states, ref.energies)])
    monotone = all(history[0][j] > history[1][j] > history[2][j] for j in range(levels))
    c.flag("energy.refinement_monotone", monotone, f"levels 0..{levels - 1}, three grids")

    rtol = c.tol["eigen.moment_paths"]
    worst = max(path_disagreement(moment_table(s, MOMENT_PAIRS), rtol) for s in sol.states)
    c.add("eigen.moment_paths", worst, f"eigenstates 0..{k - 1}, n,m<=4, relative")


def _constants_checks(c, config: ExperimentConfig):
    req = config.outputs.constants or ConstantsRequest()
    consts = vc.CODATA_2018
    a = vc.amplitude_from_spacing(req.d, consts)
    c.add("constants.round_trip", vc.ratio_residual(vc.StringParams(a, req.d), consts))
    scan = vc.planck_limit_scan([consts.h * f for f in req.h_factors], req.d, consts)
    ratios = [amp / math.sqrt(h) for h, amp in scan]
    c.add("constants.sqrt_h_scaling", max(abs(r / ratios[0] - 1) for r in ratios))
    cscan = vc.light_speed_scan([consts.c * f for f in req.c_factors], req.d, consts)
    cratios = [amp * math.sqrt(cv) for cv, amp in cscan]
    c.add("constants.inv_sqrt_c_scaling", max(abs(r / cratios[0] - 1) for r in cratios))
    c.add("constants.classical_limit", vc.amplitude_from_spacing(req.d, consts.scaled(h=0.0)))


def run_checks(config: ExperimentConfig, psi: WaveFunction | None = None) -> list[CheckResult]:
    """Evaluate the whole catalogue for ``config``; eigen checks need a Hamiltonian."""
    c = _Collector(config.tolerances)
    if psi is None:
        psi = build_state(config.state, config.grid, config.hbar)
    _grid_checks(c, psi)
    _state_checks(c, psi)
    _phase_space_checks(c, psi, config.convention, _commensurate_deltas(config.grid, config.outputs.kernel))
    _moment_checks(c, psi, config.convention)
    _analyticity_checks(c)
    if config.hamiltonian is not None:
        _eigen_checks(c, config, psi)
    _constants_checks(c, config)
    return c.results
