"""Tests for cavity spectra and momentum-space couplings."""

import math

import numpy as np
import pytest

from src.model.params import ModelParams
from src.model.spectrum import (
    analytic_spectrum, cavity_spectrum, momentum_coupling, numerical_spectrum, parity_gap,
)


def test_three_site_energies():
    """Test L=3 closed-form energies."""
    spectrum = analytic_spectrum(3)
    np.testing.assert_allclose(spectrum.energies, [math.sqrt(2), 0.0, -math.sqrt(2)], atol=1e-15)


def test_modes_are_orthogonal():
    """Test the sine transform is orthogonal."""
    modes = analytic_spectrum(11).modes
    np.testing.assert_allclose(modes @ modes.T, np.eye(11), atol=1e-12)


@pytest.mark.parametrize("L", [3, 5, 11, 21])
def test_odd_cavity_has_single_zero_mode(L):
    """Test odd L has exactly one mode at the on-site energy."""
    energies = analytic_spectrum(L, delta=0.3).energies
    zero = np.isclose(energies, 0.3, atol=1e-12)
    assert zero.sum() == 1
    assert np.argmax(zero) == (L + 1) // 2 - 1


@pytest.mark.parametrize("L", [2, 6, 10, 50])
def test_even_cavity_gap(L):
    """Test even L has a gap at zero equal to the parity gap."""
    energies = analytic_spectrum(L).energies
    assert np.min(np.abs(energies)) == pytest.approx(parity_gap(L))
    assert parity_gap(L) > 0


def test_parity_gap_odd_is_zero():
    """Test parity gap vanishes for odd L."""
    assert parity_gap(9) == 0.0


@pytest.mark.parametrize("L", [4, 17, 50])
def test_analytic_matches_numerical(L):
    """Test closed form agrees with the tridiagonal eigendecomposition."""
    p = ModelParams.uniform(L, pos=(1,), delta=0.2, J=0.8)
    analytic = cavity_spectrum(p)
    numeric = numerical_spectrum(p)
    assert analytic.analytic
    assert not numeric.analytic
    np.testing.assert_allclose(numeric.energies, analytic.energies, atol=1e-10)
    overlaps = np.abs(np.sum(numeric.modes * analytic.modes, axis=1))
    np.testing.assert_allclose(overlaps, 1.0, atol=1e-8)


def test_nonuniform_falls_back_to_numerics():
    """Test disordered on-site energies use the numerical branch."""
    p = ModelParams.uniform(6, pos=(2,)).replace(delta_c=(0.0, 0.1, -0.2, 0.0, 0.3, 0.0))
    spectrum = cavity_spectrum(p)
    assert not spectrum.analytic
    assert np.all(np.diff(spectrum.energies) <= 0)


class TestMomentumCoupling:
    """Test the momentum-space chirality diagnostic."""

    def test_zero_phase_symmetric(self):
        """Test phi=0 couples left and right movers equally."""
        coupling = momentum_coupling(0.1, 0.0, 50)
        assert coupling.asymmetry == pytest.approx(0.0, abs=1e-14)

    def test_quarter_phase_favours_right_movers(self):
        """Test phi=pi/4 gives A < 0."""
        assert momentum_coupling(0.1, math.pi / 4, 50).asymmetry < 0

    def test_zero_coupling(self):
        """Test g=0 gives vanishing g_K."""
        coupling = momentum_coupling(0.0, 0.3, 20)
        assert np.all(coupling.g_K == 0)

    def test_momentum_grid(self):
        """Test K covers [-pi, pi) in steps of 2 pi / L."""
        coupling = momentum_coupling(0.1, 0.2, 8)
        assert coupling.K[0] == pytest.approx(-math.pi)
        assert coupling.K[-1] < math.pi
        assert len(coupling.pairs()) == 8
