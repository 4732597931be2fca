import math

import numpy as np
import pytest

from phasekit.grid import make_grid
from phasekit.internal_space import CharacteristicAmplitude, build_characteristic
from phasekit.moments import (
    MomentRequest,
    compute_moment,
    moment_p,
    moment_table,
    moment_x,
    moment_xp,
    separable_moment,
)
from phasekit.states import build_state, gaussian, ho_eigenstate, plane_wave
from phasekit.verification import path_disagreement, relative_gap


@pytest.fixture(scope="module")
def shifted():
    return build_state(gaussian(1.5, -2.0, 1.0), make_grid(-10.0, 20 / 1024, 1024))


@pytest.mark.parametrize("n,m,expected", [
    (1, 0, 1.5),
    (0, 1, -2.0),
    (1, 1, -3.0),
    (2, 0, 2.75),
    (0, 2, 4.5),
    (2, 1, -5.5),
    (1, 2, 6.75),
])
def test_gaussian_moments_all_paths(shifted, n, m, expected):
    for path in ("internal", "separable", "phase_space"):
        r = compute_moment(shifted, MomentRequest(n, m, path))
        assert r.value.real == pytest.approx(expected, rel=1e-9), path
        assert r.imaginary_residual < 1e-10


def test_ho_first_excited_second_moments(grid20):
    psi = build_state(ho_eigenstate(1), grid20)
    xi = build_characteristic(psi)
    assert moment_x(xi, 2).value.real == pytest.approx(1.5, rel=1e-10)
    assert moment_p(xi, 2).value.real == pytest.approx(1.5, rel=1e-10)
    assert moment_x(xi, 1).value.real == pytest.approx(0.0, abs=1e-12)


def test_ho_fourth_moment(grid20):
    psi = build_state(ho_eigenstate(0), grid20)
    # <x^4> = 3/4 for the ground state
    assert separable_moment(psi, 4, 0).value.real == pytest.approx(0.75, rel=1e-10)


def test_plane_wave_momentum_moments(grid20):
    psi = build_state(plane_wave(5), grid20)
    K = math.pi / 2
    for m in (1, 2, 3):
        r = compute_moment(psi, MomentRequest(0, m, "internal"))
        assert r.value.real == pytest.approx(K**m, rel=1e-12)


def test_ordering_difference_vanishes_for_separable_input(shifted):
    xi = build_characteristic(shifted)
    r = moment_xp(xi, 1, 1)
    assert r.ordering_difference < 1e-12
    px = moment_xp(xi, 1, 1, order="px")
    assert abs(px.value - r.value) < 1e-12


def test_ordering_difference_for_correlated_amplitude():
    # x^n acts on x and p^m on x', so the orderings agree even when xi does not factor
    g = make_grid(-8.0, 1 / 16, 256)
    X, Y = np.meshgrid(g.x, g.x, indexing="ij")
    vals = np.exp(-(X**2 + Y**2) / 2 - (X - Y) ** 2).astype(complex)
    vals /= math.sqrt(np.sum(np.abs(vals) ** 2) * g.dx**2)
    xi = CharacteristicAmplitude(g, vals)
    r = moment_xp(xi, 1, 1)
    assert r.ordering_difference < 1e-12


def test_moment_xp_rejects_unknown_order(shifted):
    with pytest.raises(ValueError):
        moment_xp(build_characteristic(shifted), 1, 1, order="weyl")


@pytest.mark.parametrize("n,m,path", [(0, 0, "internal"), (9, 0, "internal"), (1, -1, "internal"),
                                      (1, 0, "monte_carlo"), (1.5, 0, "internal")])
def test_moment_request_validation(n, m, path):
    with pytest.raises(ValueError):
        MomentRequest(n, m, path)


def test_table_paths_agree(shifted):
    pairs = [(n, m) for n in range(4) for m in range(4) if n + m >= 1]
    table = moment_table(shifted, pairs)
    assert len(table) == 3 * len(pairs)
    assert [r.path for r in table[:3]] == ["internal", "separable", "phase_space"]
    assert path_disagreement(table, 1e-8) <= 1e-8


def test_table_matches_single_requests(shifted):
    table = moment_table(shifted, [(2, 1)], convention="conjugate")
    for r in table:
        single = compute_moment(shifted, MomentRequest(2, 1, r.path), "conjugate")
        assert abs(single.value - r.value) <= 1e-12 * abs(r.value)


def test_convention_invariance(shifted):
    a = moment_table(shifted, [(1, 1), (2, 2)], ("internal", "phase_space"), "plain")
    b = moment_table(shifted, [(1, 1), (2, 2)], ("internal", "phase_space"), "conjugate")
    for ra, rb in zip(a, b):
        assert abs(ra.value - rb.value) < 1e-12 * max(1.0, abs(ra.value))


def test_relative_gap_floor():
    assert relative_gap(1.0, 1.0 + 1e-9, 1e-8) == pytest.approx(1e-9, rel=1e-6)
    # below the floor the gap is judged absolutely: 1e-12 is 1% of the 1e-10 floor
    assert relative_gap(0.0, 1e-12, 1e-8) == pytest.approx(1e-10, rel=1e-9)
    assert relative_gap(0.0, 1e-9, 1e-8) > 1e-8
