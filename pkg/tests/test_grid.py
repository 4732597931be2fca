import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from phasekit.grid import (
    ComplexField1D,
    GridError,
    MomentumField,
    from_momentum,
    make_grid,
    spectral_derivative,
    to_momentum,
)

from conftest import dft_oracle, inverse_dft_oracle


def test_make_grid_span(grid20):
    assert grid20.x[0] == -10.0
    assert grid20.length == 20.0
    assert grid20.x[-1] == pytest.approx(10.0 - grid20.dx, abs=1e-14)


def test_momentum_spacing_unit_grid():
    g = make_grid(0.0, 1.0, 16)
    pg = g.momentum_grid()
    assert pg.dp == pytest.approx(2 * math.pi / 16, rel=1e-15)
    assert pg.p[0] == -8 * pg.dp
    assert pg.p[-1] == 7 * pg.dp


@pytest.mark.parametrize("x0,dx,n", [(0, 0, 16), (0, -1.0, 16), (0, 1.0, 24), (0, 1.0, 8), (0, 1.0, 15)])
def test_make_grid_rejects(x0, dx, n):
    with pytest.raises(GridError):
        make_grid(x0, dx, n)


@pytest.mark.parametrize("x0,dx,n,hbar", [
    (-10.0, 20 / 1024, 1024, 1.0),
    (-16.0, 1 / 32, 1024, 1.0),
    (-10.0, 20 / 2048, 2048, 1.0),
    (0.0, 1.0, 16, 1.0),
    (-np.pi, 2 * np.pi / 64, 64, 1.0),
    (-3.0, 0.1, 64, 0.5),
    (-5.0, 0.037, 256, 2.7),
])
def test_dx_dp_n_identity_is_exact(x0, dx, n, hbar):
    g = make_grid(x0, dx, n)
    assert g.dx * g.momentum_grid(hbar).dp * g.n == 2 * math.pi * hbar


def test_momentum_grid_symmetry(grid20):
    p = grid20.momentum_grid().p
    assert np.allclose(p[1:], -p[1:][::-1], atol=0)
    assert p[0] < 0 and p[grid20.n // 2] == 0.0


def test_plane_wave_occupies_single_bin(grid20):
    L = grid20.length
    K = 2 * math.pi * 4 / L
    field = ComplexField1D(grid20, np.exp(1j * K * grid20.x) / math.sqrt(L))
    mom = to_momentum(field)
    oracle = dft_oracle(field.values, grid20)
    assert np.max(np.abs(mom.values - oracle)) < 1e-12
    j = mom.pgrid.index_of(4)
    assert mom.pgrid.p[j] == pytest.approx(K, rel=1e-14)
    assert abs(mom.values[j]) ** 2 * mom.pgrid.dp == pytest.approx(1.0, abs=1e-12)
    others = np.delete(np.abs(mom.values), j)
    assert others.max() < 1e-12


def test_gaussian_transform_matches_closed_form(grid20):
    x = grid20.x
    psi = np.pi ** -0.25 * np.exp(-x**2 / 2)
    mom = to_momentum(ComplexField1D(grid20, psi))
    p = mom.pgrid.p
    # continuous transform of the standard Gaussian
    assert np.max(np.abs(mom.values - np.pi ** -0.25 * np.exp(-p**2 / 2))) < 1e-12
    dens = np.abs(mom.values) ** 2
    var = np.sum(p**2 * dens) * mom.pgrid.dp
    assert var == pytest.approx(0.5, abs=1e-12)


def test_zero_field(grid20):
    zero = ComplexField1D(grid20, np.zeros(grid20.n))
    assert not np.any(to_momentum(zero).values)
    assert not np.any(from_momentum(to_momentum(zero)).values)


def test_single_bin_inverse_is_plane_wave(grid20):
    pg = grid20.momentum_grid()
    g = np.zeros(grid20.n, dtype=complex)
    g[pg.index_of(3)] = 1 / math.sqrt(pg.dp)
    back = from_momentum(MomentumField(pg, g))
    assert np.max(np.abs(back.values - inverse_dft_oracle(g, grid20))) < 1e-12
    expected = np.exp(1j * pg.p[pg.index_of(3)] * grid20.x) / math.sqrt(grid20.length)
    assert np.max(np.abs(back.values - expected)) < 1e-12


def test_forward_matches_oracle_with_hbar():
    g = make_grid(-3.0, 0.1, 64)
    rng = np.random.default_rng(7)
    v = rng.normal(size=64) + 1j * rng.normal(size=64)
    mom = to_momentum(ComplexField1D(g, v), hbar=0.5)
    assert np.max(np.abs(mom.values - dft_oracle(v, g, 0.5))) < 1e-12


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=50, deadline=None)
@given(re=arrays(float, 64, elements=finite), im=arrays(float, 64, elements=finite),
       x0=st.floats(-50, 50), hbar=st.floats(0.1, 10))
def test_unitarity_and_round_trip(re, im, x0, hbar):
    g = make_grid(x0, 0.25, 64)
    f = ComplexField1D(g, re + 1j * im)
    mom = to_momentum(f, hbar)
    norm = f.norm2()
    if norm > 0:
        assert abs(mom.norm2() - norm) <= 1e-12 * norm
    scale = max(1.0, np.max(np.abs(f.values)))
    assert np.max(np.abs(from_momentum(mom).values - f.values)) <= 1e-12 * scale


def test_round_trip_random_normalized(grid20):
    rng = np.random.default_rng(0)
    v = rng.normal(size=grid20.n) + 1j * rng.normal(size=grid20.n)
    v /= math.sqrt(np.sum(np.abs(v) ** 2) * grid20.dx)
    f = ComplexField1D(grid20, v)
    assert np.max(np.abs(from_momentum(to_momentum(f)).values - v)) < 1e-12


def test_derivative_of_plane_wave(grid20):
    K = 2 * math.pi * 7 / grid20.length
    f = ComplexField1D(grid20, np.exp(1j * K * grid20.x))
    d = spectral_derivative(f, 1)
    assert np.max(np.abs(d.values - 1j * K * f.values)) < 1e-10


def test_derivative_of_constant_is_zero(grid20):
    d = spectral_derivative(ComplexField1D(grid20, np.full(grid20.n, 3.0)), 1)
    assert np.max(np.abs(d.values)) < 1e-13


def test_second_derivative_of_sine(grid20):
    K = 2 * math.pi * 5 / grid20.length
    f = ComplexField1D(grid20, np.sin(K * grid20.x))
    d = spectral_derivative(f, 2)
    assert np.max(np.abs(d.values + K**2 * np.sin(K * grid20.x))) < 1e-10


def test_derivative_order_must_be_positive(grid20):
    f = ComplexField1D(grid20, np.ones(grid20.n))
    with pytest.raises(ValueError):
        spectral_derivative(f, 0)


def test_fields_are_immutable(grid20):
    f = ComplexField1D(grid20, np.ones(grid20.n))
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_shift_steps(grid32):
    assert grid32.shift_steps(0.5) == 16
    with pytest.raises(GridError):
        grid32.shift_steps(0.01)
