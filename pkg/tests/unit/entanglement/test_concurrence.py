"""Tests for reduced states, Wootters concurrence and peak statistics."""

import math

import numpy as np
import pytest

from src.core.errors import ParameterError, ValidationError
from src.entanglement.concurrence import (
    ConcurrenceTrace, concurrence, concurrence_pure_single_exc, concurrence_trace, peak_stats,
)
from src.entanglement.reduced_state import is_valid_density, partial_trace_atoms
from src.dynamics.propagator import embed_single_excitation
from src.model.params import ModelParams


def _random_single_excitation(rng, n_total):
    psi = rng.normal(size=n_total) + 1j * rng.normal(size=n_total)
    return psi / np.linalg.norm(psi)


def _random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestPartialTrace:
    """Test reduction to the two-atom state."""

    def setup_method(self):
        """Set up a small two-atom geometry."""
        self.params = ModelParams.uniform(4, pos=(1, 3))
        self.ordering = self.params.ordering

    def test_vacuum(self):
        """Test |0...0> reduces to |00><00|."""
        psi = np.zeros(2 ** self.ordering.n_total)
        psi[0] = 1.0
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(partial_trace_atoms(psi, self.ordering), expected)

    def test_maximally_mixed(self):
        """Test the maximally mixed state reduces to I/4."""
        dim = 2 ** self.ordering.n_total
        rho = partial_trace_atoms(np.eye(dim) / dim, self.ordering)
        np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-14)

    def test_single_excitation_embedding(self):
        """Test atom block from (a, b) and vacuum weight from the cavity amplitudes."""
        psi = np.zeros(self.ordering.n_total, dtype=complex)
        a_idx, b_idx = self.ordering.atom_index
        psi[a_idx], psi[b_idx] = 0.6, 0.48j
        psi[self.ordering.cavity_index[0]] = 0.64
        rho = partial_trace_atoms(psi, self.ordering)
        assert rho[2, 2] == pytest.approx(0.36)
        assert rho[1, 1] == pytest.approx(0.2304)
        assert rho[2, 1] == pytest.approx(0.6 * -0.48j)
        assert rho[0, 0] == pytest.approx(0.4096)
        assert is_valid_density(rho)

    def test_single_excitation_agrees_with_full_space(self):
        """Test the sector path equals the full-space partial trace."""
        rng = np.random.default_rng(3)
        psi = _random_single_excitation(rng, self.ordering.n_total)
        sector = partial_trace_atoms(psi, self.ordering)
        full = partial_trace_atoms(embed_single_excitation(psi), self.ordering)
        full_rho = embed_single_excitation(psi)
        from_density = partial_trace_atoms(np.outer(full_rho, full_rho.conj()), self.ordering)
        np.testing.assert_allclose(sector, full, atol=1e-12)
        np.testing.assert_allclose(from_density, full, atol=1e-12)

    def test_dimension_mismatch(self):
        """Test unsupported dimensions raise ValidationError."""
        with pytest.raises(ValidationError):
            partial_trace_atoms(np.ones(7), self.ordering)

    def test_requires_two_atoms(self):
        """Test a one-atom ordering raises ValidationError."""
        ordering = ModelParams.uniform(3, pos=(1,)).ordering
        with pytest.raises(ValidationError):
            partial_trace_atoms(np.ones(4) / 2, ordering)


class TestConcurrence:
    """Test the Wootters formula."""

    def test_bell_state(self):
        """Test (|10> + |01>)/sqrt(2) has C=1."""
        phi = np.array([0, 1, 1, 0]) / math.sqrt(2)
        assert concurrence(np.outer(phi, phi)) == pytest.approx(1.0, abs=1e-10)

    def test_product_state(self):
        """Test a pure product state has C=0."""
        a = np.array([0.6, 0.8])
        b = np.array([1.0, 1.0j]) / math.sqrt(2)
        psi = np.kron(a, b)
        assert concurrence(np.outer(psi, psi.conj())) == pytest.approx(0.0, abs=1e-10)

    def test_maximally_mixed(self):
        """Test I/4 has C=0."""
        assert concurrence(np.eye(4) / 4) == 0.0

    def test_pure_single_excitation_formula(self):
        """Test a|10> + b|01> + c|00> gives 2|ab|."""
        a, b, c = 0.5, 0.5j, math.sqrt(0.5)
        psi = np.array([c, b, a, 0])
        assert concurrence(np.outer(psi, psi.conj())) == pytest.approx(2 * abs(a * b), abs=1e-10)

    def test_fast_path_values(self):
        """Test the 2|ab| helper on simple inputs."""
        assert concurrence_pure_single_exc(1 / math.sqrt(2), 1 / math.sqrt(2)) == pytest.approx(1.0)
        assert concurrence_pure_single_exc(1.0, 0.0) == 0.0
        with pytest.raises(ParameterError):
            concurrence_pure_single_exc(1.0, 1.0)

    def test_fast_path_agrees_with_wootters(self):
        """Test 1000 random single-excitation states on both paths."""
        rng = np.random.default_rng(11)
        ordering = ModelParams.uniform(6, pos=(2, 5)).ordering
        a_idx, b_idx = ordering.atom_index
        for _ in range(1000):
            psi = _random_single_excitation(rng, ordering.n_total)
            slow = concurrence(partial_trace_atoms(psi, ordering))
            fast = concurrence_pure_single_exc(psi[a_idx], psi[b_idx])
            assert abs(slow - fast) < 1e-10

    def test_local_unitary_invariance(self):
        """Test single-qubit rotations leave C unchanged."""
        rng = np.random.default_rng(5)
        ordering = ModelParams.uniform(4, pos=(1, 3)).ordering
        rho = partial_trace_atoms(_random_single_excitation(rng, ordering.n_total), ordering)
        before = concurrence(rho)
        for _ in range(20):
            U = np.kron(_random_unitary(rng), _random_unitary(rng))
            assert abs(concurrence(U @ rho @ U.conj().T) - before) < 1e-9

    def test_rejects_wrong_shape(self):
        """Test non-4x4 input raises ValidationError."""
        with pytest.raises(ValidationError):
            concurrence(np.eye(2))


class TestPeakStats:
    """Test maximum and first-occurrence time."""

    def test_analytic_sine(self):
        """Test |sin(2 g^2 t / J)| peaks at pi J / (4 g^2)."""
        g = 0.1
        times = np.arange(0, 200, 0.1)
        trace = ConcurrenceTrace.from_values(times, np.abs(np.sin(2 * g ** 2 * times)))
        c_max, t_max = peak_stats(trace)
        assert c_max == pytest.approx(1.0, abs=1e-6)
        assert abs(t_max - math.pi / (4 * g ** 2)) <= 0.2

    def test_constant_trace(self):
        """Test a flat trace reports the first grid point."""
        trace = ConcurrenceTrace.from_values([1.0, 2.0, 3.0], [0.4, 0.4, 0.4])
        assert peak_stats(trace) == (0.4, 1.0)

    def test_first_of_two_equal_peaks(self):
        """Test the earlier of two equal peaks is reported."""
        trace = ConcurrenceTrace.from_values([0, 1, 2, 3, 4], [0.0, 0.9, 0.1, 0.9, 0.0])
        assert peak_stats(trace) == (0.9, 1.0)

    def test_tolerance_picks_earlier_near_peak(self):
        """Test values within peak_tol of the maximum count as the peak."""
        trace = ConcurrenceTrace.from_values([0, 1, 2], [0.89995, 0.2, 0.9])
        assert peak_stats(trace)[1] == 0.0
        assert peak_stats(trace, peak_tol=1e-6)[1] == 2.0

    def test_empty_trace(self):
        """Test empty traces raise ParameterError."""
        with pytest.raises(ParameterError):
            ConcurrenceTrace.from_values([], [])

    def test_window(self):
        """Test restricting a trace recomputes the peak."""
        trace = ConcurrenceTrace.from_values([0, 1, 2, 3], [0.1, 0.5, 0.2, 0.8])
        assert trace.window(2.0).c_max == 0.5
        assert len(trace.window(2.0)) == 3

    def test_trace_from_states(self):
        """Test concurrence_trace on a state stack."""
        ordering = ModelParams.uniform(4, pos=(1, 3)).ordering
        a_idx, b_idx = ordering.atom_index
        states = np.zeros((2, ordering.n_total), dtype=complex)
        states[0, a_idx] = 1.0
        states[1, a_idx] = states[1, b_idx] = 1 / math.sqrt(2)
        trace = concurrence_trace(states, ordering, [0.0, 1.0])
        np.testing.assert_allclose(trace.c, [0.0, 1.0], atol=1e-12)
        assert trace.t_max == 1.0
