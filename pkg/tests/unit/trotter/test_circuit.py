"""Tests for layered sequences, decomposition and the statevector simulator."""

import math

import numpy as np
import pytest

from src.core.errors import ParameterError, SizeError, ValidationError
from src.model.params import ModelParams
from src.trotter.circuit import (
    DEFAULT_TIMING, GateSequence, Layer, TimingModel, decompose_sequence, decompose_two_qubit,
    export_text, parse_text, sequence_from_gates, sequence_unitary, simulate_circuit,
)
from src.trotter.gates import ROTATION_KINDS, Gate, equal_up_to_phase, gate_unitary
from src.trotter.trotterize import trotter_step


class TestDecomposition:
    """Test the elementary-gate form of two-qubit rotations."""

    @pytest.mark.parametrize("kind", ROTATION_KINDS)
    @pytest.mark.parametrize("theta", [0.0, 0.31, -1.7, math.pi])
    def test_matches_rotation(self, kind, theta):
        """Test the five-layer circuit reproduces the 4x4 rotation."""
        gate = Gate(kind, (0, 1), theta)
        circuit = GateSequence(2, decompose_two_qubit(gate))
        assert equal_up_to_phase(sequence_unitary(circuit), gate_unitary(gate), tol=1e-10)

    def test_layer_structure(self):
        """Test three single-qubit layers and two CX layers."""
        circuit = GateSequence(2, decompose_two_qubit(Gate('RXY', (0, 1), 0.2)))
        assert circuit.layer_counts() == (3, 2, 0)
        assert circuit.duration_ns() == pytest.approx(1150.0)

    def test_reversed_qubits(self):
        """Test a rotation whose first qubit is the less significant one."""
        gate = Gate('RXY', (1, 0), 0.9)
        decomposed = GateSequence(2, decompose_two_qubit(gate))
        direct = sequence_from_gates(2, [gate])
        assert equal_up_to_phase(sequence_unitary(decomposed), sequence_unitary(direct))

    def test_rejects_cx(self):
        """Test only Pauli rotations decompose."""
        with pytest.raises(ParameterError):
            decompose_two_qubit(Gate('CX', (0, 1)))

    def test_whole_step(self):
        """Test decomposing a Trotter step keeps its action and duration."""
        p = ModelParams.uniform(3, pos=(1,), g=0.4, phi=0.6, delta=0.2)
        step = trotter_step(p, 0.3)
        elementary = decompose_sequence(step)
        assert all(layer.kind != 'rotation' for layer in elementary.layers)
        assert elementary.duration_ns() == pytest.approx(step.duration_ns())
        assert equal_up_to_phase(sequence_unitary(elementary), sequence_unitary(step))


class TestGateSequence:
    """Test sequence bookkeeping."""

    def test_overlapping_layer(self):
        """Test one layer cannot touch a qubit twice."""
        with pytest.raises(ParameterError):
            Layer((Gate('RX', (0,), 0.1), Gate('RXX', (0, 1), 0.1)))

    def test_mixed_layer(self):
        """Test one layer holds one gate class."""
        with pytest.raises(ParameterError):
            Layer((Gate('RX', (0,), 0.1), Gate('RXX', (1, 2), 0.1)))

    def test_qubit_out_of_range(self):
        """Test gates must fit the register."""
        with pytest.raises(ParameterError):
            sequence_from_gates(2, [Gate('RX', (2,), 0.1)])

    def test_counts(self):
        """Test depth and two-qubit counts."""
        seq = GateSequence(3, [
            Layer((Gate('RZ', (0,), 0.1), Gate('RZ', (2,), 0.1))),
            Layer((Gate('RXX', (0, 1), 0.2),)),
            Layer((Gate('CX', (1, 2)),)),
        ])
        assert seq.depth == 3
        assert len(seq) == 4
        assert seq.two_qubit_count == 2
        assert seq.duration_ns() == pytest.approx(50.0 + 1150.0 + 500.0)

    def test_repeat_scales_duration(self):
        """Test n repetitions take exactly n times as long."""
        seq = sequence_from_gates(2, [Gate('RX', (0,), 0.1), Gate('RYY', (0, 1), 0.1)])
        assert seq.repeat(24).duration_ns() == 24 * seq.duration_ns()
        assert seq.repeat(0).depth == 0

    def test_join_mismatch(self):
        """Test joining registers of different size raises."""
        with pytest.raises(ParameterError):
            GateSequence(2) + GateSequence(3)

    def test_custom_timing(self):
        """Test a slower device scales the rotation layer cost."""
        timing = TimingModel(single_layer_ns=100.0, two_qubit_ns=1000.0)
        assert timing.rotation_layer_ns == 2300.0
        assert DEFAULT_TIMING.budget_ns(3, 12) == pytest.approx(13950.0)


class TestSimulateCircuit:
    """Test statevector application."""

    def test_empty_sequence(self):
        """Test no gates leaves the state unchanged."""
        psi0 = np.array([0.6, 0.0, 0.0, 0.8j])
        np.testing.assert_array_equal(simulate_circuit(GateSequence(2), psi0), psi0)

    def test_single_flip(self):
        """Test RX(pi) on qubit 1 of |00> gives |01> up to phase."""
        psi = simulate_circuit(sequence_from_gates(2, [Gate('RX', (1,), math.pi)]), np.array([1, 0, 0, 0]))
        assert abs(psi[1]) == pytest.approx(1.0)

    def test_qubit_significance(self):
        """Test qubit 0 is the most significant bit."""
        psi = simulate_circuit(sequence_from_gates(3, [Gate('RX', (0,), math.pi)]), np.eye(8)[0])
        assert abs(psi[4]) == pytest.approx(1.0)

    def test_cx(self):
        """Test CX flips the target only when the control is set."""
        seq = sequence_from_gates(2, [Gate('CX', (0, 1))])
        np.testing.assert_allclose(simulate_circuit(seq, np.eye(4)[2]), np.eye(4)[3])
        np.testing.assert_allclose(simulate_circuit(seq, np.eye(4)[1]), np.eye(4)[1])

    def test_norm_preserved(self):
        """Test a long random circuit keeps the norm."""
        rng = np.random.default_rng(3)
        gates = []
        for _ in range(200):
            kind = rng.choice(['RX', 'RY', 'RZ', 'RXX', 'RYY', 'RXY', 'RYX', 'CX'])
            if kind in ('RX', 'RY', 'RZ'):
                gates.append(Gate(kind, (int(rng.integers(5)),), rng.uniform(-3, 3)))
            else:
                a, b = rng.choice(5, size=2, replace=False)
                gates.append(Gate(kind, (int(a), int(b)), rng.uniform(-3, 3)))
        psi0 = rng.normal(size=32) + 1j * rng.normal(size=32)
        psi0 /= np.linalg.norm(psi0)
        psi = simulate_circuit(sequence_from_gates(5, gates), psi0)
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-10)

    def test_wrong_length(self):
        """Test a state of the wrong size raises ValidationError."""
        with pytest.raises(ValidationError):
            simulate_circuit(GateSequence(2), np.array([1.0, 0.0]))

    def test_unnormalized(self):
        """Test an unnormalized state raises ValidationError."""
        with pytest.raises(ValidationError):
            simulate_circuit(GateSequence(1), np.array([1.0, 1.0]))

    def test_size_guard(self):
        """Test registers beyond twelve qubits are refused."""
        with pytest.raises(SizeError):
            simulate_circuit(GateSequence(13), np.zeros(2 ** 13))


class TestTextFormat:
    """Test the gate listing format."""

    def test_round_trip(self):
        """Test export then parse restores a Trotter step exactly."""
        p = ModelParams.uniform(4, pos=(1, 3), g=0.2, phi=0.5, delta=0.1, omega=0.05)
        step = trotter_step(p, 0.7)
        assert parse_text(export_text(step)) == step

    def test_listing_lines(self):
        """Test each gate line carries kind, qubits and angle."""
        text = export_text(sequence_from_gates(2, [Gate('RXX', (0, 1), 0.5), Gate('RZ', (1,), -0.25)]))
        assert text.splitlines() == ['QUBITS 2', 'LAYER', 'GATE RXX 0 1 0.5', 'LAYER', 'GATE RZ 1 -0.25']

    def test_comments_ignored(self):
        """Test comments and blank lines are skipped."""
        seq = parse_text("# step\nQUBITS 2\n\nLAYER\nGATE RX 0 0.1\n")
        assert seq.gates == [Gate('RX', (0,), 0.1)]

    def test_missing_header(self):
        """Test a listing without QUBITS raises."""
        with pytest.raises(ParameterError):
            parse_text("LAYER\nGATE RX 0 0.1\n")

    def test_bad_line(self):
        """Test malformed lines raise ParameterError."""
        with pytest.raises(ParameterError):
            parse_text("QUBITS 2\nGATE RX zero 0.1\n")
        with pytest.raises(ParameterError):
            parse_text("QUBITS 2\nMEASURE 0\n")
