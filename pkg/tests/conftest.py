import math

import numpy as np
import pytest

from phasekit.grid import make_grid


def dft_oracle(values, grid, hbar=1.0):
    """Brute-force O(n^2) sum  (2 pi hbar)^-1/2 sum_j psi_j exp(-i p_k x_j / hbar) dx."""
    p = grid.momentum_grid(hbar).p
    kernel = np.exp(-1j * np.outer(p, grid.x) / hbar)
    return kernel @ values * grid.dx / math.sqrt(2 * math.pi * hbar)


def inverse_dft_oracle(values, grid, hbar=1.0):
    pg = grid.momentum_grid(hbar)
    kernel = np.exp(1j * np.outer(grid.x, pg.p) / hbar)
    return kernel @ values * pg.dp / math.sqrt(2 * math.pi * hbar)


@pytest.fixture
def grid20():
    """[-10, 10) with 1024 points."""
    return make_grid(-10.0, 20 / 1024, 1024)


@pytest.fixture
def grid32():
    """[-16, 16) with 1024 points; 0.5 is 16 steps."""
    return make_grid(-16.0, 1 / 32, 1024)


@pytest.fixture
def small_grid():
    return make_grid(-8.0, 1 / 16, 256)
