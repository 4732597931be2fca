import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasekit.grid import make_grid
from phasekit.internal_space import build_characteristic, translation_kernel
from phasekit.phase_space import (
    PhaseSpaceDensity,
    density,
    ensemble_average,
    marginals,
    phase_space_moment,
    probability_amplitude,
    reconstruct_characteristic,
    wigner_moyal,
)
from phasekit.states import build_state, gaussian, ho_eigenstate, plane_wave


def _pipeline(spec, grid, convention="plain"):
    psi = build_state(spec, grid)
    xi = build_characteristic(psi, convention)
    phi = probability_amplitude(xi)
    return psi, xi, phi, density(phi)


def test_standard_gaussian_density_closed_form(grid20):
    _, _, _, F = _pipeline(gaussian(0.0, 0.0, 1.0), grid20)
    x, p = grid20.x[:, None], F.pgrid.p[None, :]
    assert np.max(np.abs(F.values - np.exp(-x**2 - p**2) / math.pi)) < 1e-12


def test_density_factorizes(grid20):
    psi, _, _, F = _pipeline(gaussian(1.5, -2.0, 1.0), grid20)
    mom = psi.momentum()
    outer = np.outer(np.abs(psi.values) ** 2, np.abs(mom.values) ** 2)
    assert np.max(np.abs(F.values - outer)) < 1e-12


def test_density_positive_and_normalized(grid20):
    for spec in (gaussian(1.5, -2.0, 1.0), ho_eigenstate(3), plane_wave(2)):
        _, _, _, F = _pipeline(spec, grid20)
        assert F.values.min() >= 0.0
        assert abs(F.total_mass() - 1.0) < 1e-10


def test_marginals_match_densities(grid20):
    psi, _, _, F = _pipeline(ho_eigenstate(2), grid20)
    px, pp = marginals(F)
    assert np.max(np.abs(px - np.abs(psi.values) ** 2)) < 1e-12
    assert np.max(np.abs(pp - np.abs(psi.momentum().values) ** 2)) < 1e-12


def test_ensemble_averages(grid20):
    _, _, _, F = _pipeline(gaussian(1.5, -2.0, 1.0), grid20)
    assert ensemble_average(F, "x") == pytest.approx(1.5, abs=1e-10)
    assert ensemble_average(F, "p") == pytest.approx(-2.0, abs=1e-10)
    with pytest.raises(ValueError):
        ensemble_average(F, "q")


def test_plane_wave_momentum_average(grid20):
    _, _, _, F = _pipeline(plane_wave(5), grid20)
    # 2 pi k / L with L = 20
    assert ensemble_average(F, "p") == pytest.approx(math.pi / 2, rel=1e-12)


def test_second_moments(grid20):
    _, _, _, F = _pipeline(gaussian(0.0, 0.0, 1.0), grid20)
    assert phase_space_moment(F, 2, 0) == pytest.approx(0.5, abs=1e-12)
    assert phase_space_moment(F, 0, 2) == pytest.approx(0.5, abs=1e-12)


def test_amplitude_round_trip(grid20):
    _, xi, phi, _ = _pipeline(gaussian(1.5, -2.0, 1.0), grid20, "conjugate")
    back = reconstruct_characteristic(phi, "conjugate")
    assert np.max(np.abs(back.values - xi.values)) < 1e-12


def test_convention_invariance(grid20):
    spec = gaussian(1.5, -2.0, 1.0)
    _, _, _, F_plain = _pipeline(spec, grid20, "plain")
    _, _, _, F_conj = _pipeline(spec, grid20, "conjugate")
    assert np.max(np.abs(F_plain.values - F_conj.values)) < 1e-12


@pytest.mark.parametrize("steps", [0, 1, 16, 48])
def test_wigner_moyal_matches_translation(grid32, steps):
    _, xi, _, F = _pipeline(gaussian(0.5, 1.0, 1.0), grid32)
    delta = steps * grid32.dx
    wm = wigner_moyal(F, delta)
    tr = translation_kernel(xi, delta)
    assert np.max(np.abs(wm.values - tr.values)) < 1e-10


def test_wigner_moyal_any_delta(grid20):
    _, _, _, F = _pipeline(gaussian(0.0, 0.0, 1.0), grid20)
    delta = 0.3
    wm = wigner_moyal(F, delta)
    assert wm.mass() == pytest.approx(math.exp(-delta**2 / 4), abs=1e-12)


def test_negative_density_rejected(grid20):
    pg = grid20.momentum_grid()
    vals = np.zeros((grid20.n, grid20.n))
    vals[3, 4] = -1e-3
    with pytest.raises(ValueError):
        PhaseSpaceDensity(grid20, pg, vals)


@settings(max_examples=15, deadline=None)
@given(center=st.floats(-2, 2), momentum=st.floats(-4, 4), width=st.floats(0.6, 1.4),
       convention=st.sampled_from(["plain", "conjugate"]))
def test_density_properties(center, momentum, width, convention):
    g = make_grid(-12.0, 24 / 256, 256)
    psi, _, _, F = _pipeline(gaussian(center, momentum, width), g, convention)
    assert F.values.min() >= 0.0
    assert abs(F.total_mass() - 1.0) < 1e-10
    assert abs(ensemble_average(F, "x") - center) < 1e-9
