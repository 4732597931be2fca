"""Batch computations behind each CLI subcommand.

Each ``run_*`` function takes a validated config and a
:class:`~phasekit.persistence.ResultWriter`, writes its files and records
the invariants it asserted.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from . import constants as vc
from .internal_space import build_characteristic, translation_kernel
from .moments import moment_table
from .persistence import CheckResult, ConstantsRequest, ExperimentConfig, ResultWriter, emit_plot_data
from .phase_space import density, ensemble_average, marginals, probability_amplitude, wigner_moyal
from .schrodinger import build_hamiltonian, solve_eigen
from .states import build_state
from .verification import DEFAULT_TOLERANCES, path_disagreement, run_checks

__all__ = ["COMMANDS", "run_command"]


def _tol(config: ExperimentConfig, name: str) -> float:
    return config.tolerances.get(name, DEFAULT_TOLERANCES[name])


def _check(writer, config, name, value, detail=""):
    tol = _tol(config, name)
    writer.add_check(CheckResult(name, float(value), tol, bool(value <= tol), detail))


def _state(config):
    return build_state(config.state, config.grid, config.hbar)


def run_state(config: ExperimentConfig, writer: ResultWriter):
    psi = _state(config)
    mom = psi.momentum()
    writer.write_csv("state.csv", ["x", "re", "im"], zip(psi.grid.x, psi.values.real, psi.values.imag))
    writer.write_csv("momentum_state.csv", ["p", "re", "im"], zip(mom.pgrid.p, mom.values.real, mom.values.imag))
    _check(writer, config, "states.normalization", abs(psi.field.norm2() - 1.0))
    _check(writer, config, "grid.unitarity", abs(mom.norm2() - 1.0))


def run_phase_space(config: ExperimentConfig, writer: ResultWriter):
    psi = _state(config)
    F = density(probability_amplitude(build_characteristic(psi, config.convention)))
    pos, mom = marginals(F)
    x, p = F.grid.x, F.pgrid.p
    if config.outputs.density:
        writer.write_csv("density.csv", ["x", "p", "F"],
                         ((x[i], p[k], F.values[i, k]) for i in range(len(x)) for k in range(len(p))))
    if config.outputs.marginals:
        writer.write_csv("position_marginal.csv", ["x", "density"], zip(x, pos))
        writer.write_csv("momentum_marginal.csv", ["p", "density"], zip(p, mom))
    if config.outputs.plot:
        writer.write_text("density_heatmap.dat", emit_plot_data(F, "heatmap"))
    writer.write_json("phase_space_summary.json", {
        "total_mass": F.total_mass(),
        "position_mass": float(np.sum(pos) * F.grid.dx),
        "momentum_mass": float(np.sum(mom) * F.pgrid.dp),
        "mean_x": ensemble_average(F, "x"),
        "mean_p": ensemble_average(F, "p"),
        "x": x,
        "p": p,
        "position_marginal": pos,
        "momentum_marginal": mom,
    })
    psi_p = psi.momentum().values
    _check(writer, config, "phase_space.positivity", max(0.0, -float(F.values.min())))
    _check(writer, config, "phase_space.normalization", abs(F.total_mass() - 1.0))
    _check(writer, config, "phase_space.factorization",
           np.max(np.abs(F.values - np.multiply.outer(np.abs(psi.values) ** 2, np.abs(psi_p) ** 2))))


def run_moments(config: ExperimentConfig, writer: ResultWriter):
    psi = _state(config)
    pairs = config.outputs.moments or ((1, 0), (0, 1), (2, 0), (0, 2), (1, 1))
    table = moment_table(psi, pairs, config.outputs.moment_paths, config.convention)
    writer.write_csv("moments.csv", ["n", "m", "path", "re", "im", "residual"],
                     ((r.n, r.m, r.path, r.value.real, r.value.imag, r.imaginary_residual) for r in table))
    if len(config.outputs.moment_paths) > 1:
        name = "moments.path_agreement"
        _check(writer, config, name, path_disagreement(table, _tol(config, name)))
    internal = [r.ordering_difference for r in table if r.path == "internal"]
    if internal:
        _check(writer, config, "moments.ordering", max(internal))


def run_kernel(config: ExperimentConfig, writer: ResultWriter):
    psi = _state(config)
    xi = build_characteristic(psi, config.convention)
    F = density(probability_amplitude(xi))
    deltas = config.outputs.kernel or (0.0, config.grid.dx)
    rows = []
    worst = 0.0
    compared = []
    for d in deltas:
        wm = wigner_moyal(F, d)
        rows.extend((d, x, "wigner_moyal", v.real, v.imag) for x, v in zip(psi.grid.x, wm.values))
        if config.grid.is_commensurate(d):
            tk = translation_kernel(xi, d)
            rows.extend((d, x, "translation", v.real, v.imag) for x, v in zip(psi.grid.x, tk.values))
            worst = max(worst, float(np.max(np.abs(tk.values - wm.values))))
            compared.append(d)
    writer.write_csv("kernel.csv", ["delta", "x", "path", "re", "im"], rows)
    if compared:
        _check(writer, config, "phase_space.kernel_equivalence", worst,
               "deltas=" + ";".join(format(d, ".6g") for d in compared))


def run_eigensolve(config: ExperimentConfig, writer: ResultWriter, k: int | None = None):
    if config.hamiltonian is None:
        raise ValueError("eigensolve needs a [hamiltonian] table in the config")
    k = k or config.outputs.spectrum or 6
    spec = config.hamiltonian.spec(config.grid, config.hbar)
    sol = solve_eigen(build_hamiltonian(spec, config.grid), k)
    writer.write_csv("spectrum.csv", ["k", "energy"], enumerate(sol.energies))
    writer.write_text("spectrum.dat", emit_plot_data(sol, "line"))
    for j, s in enumerate(sol.states):
        writer.write_csv(f"eigenstate_{j}.csv", ["x", "re", "im"], zip(s.grid.x, s.values.real, s.values.imag))
    _check(writer, config, "eigen.orthonormality", np.max(np.abs(sol.gram() - np.eye(k))))
    _check(writer, config, "eigen.residual", float(np.max(sol.residuals)))


def run_constants(config: ExperimentConfig, writer: ResultWriter):
    req = config.outputs.constants or ConstantsRequest()
    base = vc.CODATA_2018
    rows = []
    for h, a in vc.planck_limit_scan([base.h * f for f in req.h_factors], req.d, base):
        rows.append((h, base.c, req.d, a, vc.ratio_residual(vc.StringParams(a, req.d), replace(base, h=h))))
    for c, a in vc.light_speed_scan([base.c * f for f in req.c_factors], req.d, base):
        rows.append((base.h, c, req.d, a, vc.ratio_residual(vc.StringParams(a, req.d), replace(base, c=c))))
    zero = vc.amplitude_from_spacing(req.d, base.scaled(h=0.0))
    rows.append((0.0, base.c, req.d, zero, math.nan))
    writer.write_csv("constants_scan.csv", ["h", "c", "d", "A", "residual"], rows)
    _check(writer, config, "constants.round_trip", max(r[4] for r in rows[:-1]))
    _check(writer, config, "constants.classical_limit", zero)


def run_verify(config: ExperimentConfig, writer: ResultWriter):
    checks = run_checks(config)
    writer.write_csv("verify.csv", ["check", "value", "tolerance", "passed", "detail"],
                     ((c.name, c.value, c.tolerance, c.passed, c.detail) for c in checks))
    for c in checks:
        writer.add_check(c)


COMMANDS = {
    "state": run_state,
    "phase-space": run_phase_space,
    "moments": run_moments,
    "eigensolve": run_eigensolve,
    "kernel": run_kernel,
    "constants": run_constants,
    "verify": run_verify,
}


def run_command(name: str, config: ExperimentConfig, writer: ResultWriter, **options):
    return COMMANDS[name](config, writer, **options)
