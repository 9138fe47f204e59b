import numpy as np
import pytest

from spdekit.spectral import SpectralField, TorusGrid, field_from_modes


def make_random_field(grid, seed, mean_zero=False, decay=2.0, amplitude=1.0):
    """Smooth random band-limited field with |amp(k)| ~ (1+k)^-decay."""
    rng = np.random.default_rng(seed)
    k = np.arange(grid.n_modes + 1, dtype=float)
    coef = (rng.normal(size=k.size) + 1j * rng.normal(size=k.size)) * amplitude
    coef /= (1.0 + k) ** decay
    if mean_zero:
        coef[0] = 0.0
    return SpectralField(grid, coef)


@pytest.fixture
def rand_field():
    return make_random_field


@pytest.fixture
def grid32():
    return TorusGrid(32)


def cos_field(grid, amplitude=1.0, mode=1):
    """amplitude * cos(2 pi mode x)."""
    return field_from_modes(grid, [(mode, amplitude / 2.0)])


def sin_field(grid, amplitude=1.0, mode=1):
    """amplitude * sin(2 pi mode x)."""
    return field_from_modes(grid, [(mode, amplitude / 2j)])
