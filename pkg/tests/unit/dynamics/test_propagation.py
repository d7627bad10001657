"""Tests for chiral excitation spreading."""

import math

import numpy as np
import pytest

from src.core.errors import ParameterError
from src.dynamics.propagation import propagate_excitation
from src.model.params import ModelParams


def _single_atom(phi, g=0.1, L=50):
    return ModelParams.uniform(L, pos=(L // 2,), g=g, phi=phi)


def test_uncoupled_atom_keeps_excitation():
    """Test g=0 leaves the excitation on the atom."""
    p = _single_atom(0.0, g=0.0, L=10)
    atom = p.ordering.atom_index[0]
    result = propagate_excitation(p, atom, np.linspace(0, 20, 11))
    np.testing.assert_allclose(result.occupations[atom], 1.0)
    np.testing.assert_allclose(result.right_weight, 0.0)


def test_zero_phase_emits_symmetrically():
    """Test phi=0 with a centred atom gives equal left and right weights."""
    p = _single_atom(0.0)
    result = propagate_excitation(p, p.ordering.atom_index[0], np.linspace(0, 10, 21))
    np.testing.assert_allclose(result.left_weight, result.right_weight, atol=1e-3)
    assert result.right_weight[-1] > 0


def test_quarter_phase_emits_to_the_right():
    """Test phi=pi/4 emits predominantly to the right before boundary reflection."""
    p = _single_atom(math.pi / 4)
    result = propagate_excitation(p, p.ordering.atom_index[0], np.linspace(0, 10, 21))
    assert result.right_weight[-1] > 10 * result.left_weight[-1]
    assert result.directionality() > 10


def test_occupations_are_normalized():
    """Test occupations sum to one at every time."""
    p = _single_atom(0.3, L=12)
    result = propagate_excitation(p, p.ordering.atom_index[0], np.linspace(0, 30, 7))
    np.testing.assert_allclose(result.occupations.sum(axis=0), 1.0, atol=1e-10)
    assert result.occupations.shape == (13, 7)
    assert result.labels[0] == 'c1'


def test_rejects_bad_site():
    """Test out-of-range site raises ParameterError."""
    with pytest.raises(ParameterError):
        propagate_excitation(_single_atom(0.0, L=6), 99, [1.0])
