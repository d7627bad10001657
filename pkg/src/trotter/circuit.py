"""Layered gate sequences, their timing, decomposition and statevector simulation."""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..core.errors import ParameterError, SizeError, ValidationError
from .gates import NATIVE_KINDS, ROTATION_KINDS, SINGLE_KINDS, Gate, gate_unitary

MAX_QUBITS = 12
NORM_TOL = 1e-10

# Single-qubit basis changes V with V P V^dagger = Z.
_TO_Z = {
    'X': ('RY', -np.pi / 2),
    'Y': ('RX', np.pi / 2),
}


@dataclass(frozen=True)
class Layer:
    """Gates that run in parallel on disjoint qubits, all of one class."""

    gates: Tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, 'gates', tuple(self.gates))
        if not self.gates:
            raise ParameterError("A layer needs at least one gate")
        used = [q for gate in self.gates for q in gate.qubits]
        if len(used) != len(set(used)):
            raise ParameterError(f"Gates of one layer overlap on qubits {sorted(used)}")
        classes = {_gate_class(gate) for gate in self.gates}
        if len(classes) != 1:
            raise ParameterError(f"A layer mixes gate classes {sorted(classes)}")

    @property
    def kind(self) -> str:
        """'single', 'native' (CX) or 'rotation' (two-qubit Pauli rotations)."""
        return _gate_class(self.gates[0])


def _gate_class(gate: Gate) -> str:
    if gate.kind in SINGLE_KINDS:
        return 'single'
    if gate.kind in NATIVE_KINDS:
        return 'native'
    return 'rotation'


@dataclass(frozen=True)
class TimingModel:
    """
    Gate durations of the target device.

    A two-qubit Pauli rotation layer is charged as its decomposition: three
    single-qubit layers plus two native two-qubit layers.
    """

    single_layer_ns: float = 50.0
    two_qubit_ns: float = 500.0
    coherence_window_us: Tuple[float, float] = (200.0, 300.0)

    @property
    def rotation_layer_ns(self) -> float:
        return 3.0 * self.single_layer_ns + 2.0 * self.two_qubit_ns

    def layer_ns(self, layer: Layer) -> float:
        if layer.kind == 'single':
            return self.single_layer_ns
        if layer.kind == 'native':
            return self.two_qubit_ns
        return self.rotation_layer_ns

    def budget_ns(self, single_layers: int, rotation_layers: int) -> float:
        """Duration of a step with the given layer counts."""
        return single_layers * self.single_layer_ns + rotation_layers * self.rotation_layer_ns


DEFAULT_TIMING = TimingModel()


@dataclass(frozen=True)
class GateSequence:
    """Ordered layers acting on n_qubits."""

    n_qubits: int
    layers: Tuple[Layer, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))
        if self.n_qubits < 1:
            raise ParameterError(f"n_qubits must be positive, got {self.n_qubits}")
        for gate in self.gates:
            if max(gate.qubits) >= self.n_qubits:
                raise ParameterError(f"{gate.kind} on {gate.qubits} is outside a {self.n_qubits}-qubit register")

    @property
    def gates(self) -> List[Gate]:
        return [gate for layer in self.layers for gate in layer.gates]

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for gate in self.gates if gate.is_two_qubit)

    def layer_counts(self) -> Tuple[int, int, int]:
        """(single, native, rotation) layer counts."""
        kinds = [layer.kind for layer in self.layers]
        return kinds.count('single'), kinds.count('native'), kinds.count('rotation')

    def duration_ns(self, timing: TimingModel = DEFAULT_TIMING) -> float:
        return float(sum(timing.layer_ns(layer) for layer in self.layers))

    def repeat(self, n: int) -> 'GateSequence':
        if n < 0:
            raise ParameterError(f"Cannot repeat a sequence {n} times")
        return GateSequence(self.n_qubits, self.layers * n)

    def __add__(self, other: 'GateSequence') -> 'GateSequence':
        if other.n_qubits != self.n_qubits:
            raise ParameterError(f"Cannot join {self.n_qubits}- and {other.n_qubits}-qubit sequences")
        return GateSequence(self.n_qubits, self.layers + other.layers)

    def __len__(self) -> int:
        return len(self.gates)


def decompose_two_qubit(gate: Gate) -> List[Layer]:
    """
    Elementary layers for one two-qubit Pauli rotation.

    exp(-i theta/2 A(x)B) = (V_A(x)V_B)^dagger CX (1(x)RZ(theta)) CX (V_A(x)V_B),
    where V_P rotates P onto Z. Three single-qubit layers and two CX layers.

    Args:
        gate: RXX, RYY, RXY or RYX gate

    Returns:
        Five layers, in application order

    Raises:
        ParameterError: any other gate kind
    """
    if gate.kind not in ROTATION_KINDS:
        raise ParameterError(f"Only {', '.join(ROTATION_KINDS)} decompose; got {gate.kind}")
    return [
        Layer(_basis_change(gate, inverse=False)),
        Layer((Gate('CX', gate.qubits),)),
        Layer((Gate('RZ', (gate.qubits[1],), gate.angle),)),
        Layer((Gate('CX', gate.qubits),)),
        Layer(_basis_change(gate, inverse=True)),
    ]


def _basis_change(gate: Gate, inverse: bool) -> Tuple[Gate, ...]:
    changes = []
    for pauli, qubit in zip(gate.kind[1:], gate.qubits):
        kind, angle = _TO_Z[pauli]
        changes.append(Gate(kind, (qubit,), -angle if inverse else angle))
    return tuple(changes)


def decompose_sequence(seq: GateSequence) -> GateSequence:
    """Replace every rotation layer by its five elementary layers, gate by gate in parallel."""
    layers: List[Layer] = []
    for layer in seq.layers:
        if layer.kind != 'rotation':
            layers.append(layer)
            continue
        parts = [decompose_two_qubit(gate) for gate in layer.gates]
        for k in range(5):
            layers.append(Layer(tuple(g for part in parts for g in part[k].gates)))
    return GateSequence(seq.n_qubits, layers)


def _apply(state: np.ndarray, matrix: np.ndarray, qubits: Tuple[int, ...], n: int) -> np.ndarray:
    front = list(range(len(qubits)))
    psi = np.moveaxis(state.reshape([2] * n), list(qubits), front)
    shape = psi.shape
    psi = (matrix @ psi.reshape(2 ** len(qubits), -1)).reshape(shape)
    return np.moveaxis(psi, front, list(qubits)).reshape(-1)


def simulate_circuit(seq: GateSequence, psi0: np.ndarray) -> np.ndarray:
    """
    Apply a gate sequence to a statevector.

    Args:
        seq: Gate sequence
        psi0: Normalized state of length 2^n_qubits (qubit 0 most significant)

    Returns:
        Final state

    Raises:
        SizeError: more than MAX_QUBITS qubits
        ValidationError: psi0 has the wrong length or is not normalized
    """
    n = seq.n_qubits
    if n > MAX_QUBITS:
        raise SizeError(f"{n} qubits exceed the statevector guard of {MAX_QUBITS}")
    state = np.asarray(psi0, dtype=complex).ravel()
    if state.size != 2 ** n:
        raise ValidationError(f"State of length {state.size} does not fit {n} qubits")
    if abs(np.linalg.norm(state) - 1.0) > NORM_TOL:
        raise ValidationError(f"Initial state is not normalized (norm {np.linalg.norm(state):.12f})")
    for gate in seq.gates:
        state = _apply(state, gate_unitary(gate), gate.qubits, n)
    return state


def sequence_unitary(seq: GateSequence) -> np.ndarray:
    """Full matrix of a (small) sequence, column by column."""
    dim = 2 ** seq.n_qubits
    columns = [simulate_circuit(seq, np.eye(dim, dtype=complex)[k]) for k in range(dim)]
    return np.stack(columns, axis=1)


def export_text(seq: GateSequence) -> str:
    """
    Line-oriented dump: ``QUBITS n``, then ``LAYER`` before each layer's
    ``GATE kind q0 [q1] angle`` lines.
    """
    lines = [f"QUBITS {seq.n_qubits}"]
    for layer in seq.layers:
        lines.append("LAYER")
        for gate in layer.gates:
            qubits = ' '.join(str(q) for q in gate.qubits)
            lines.append(f"GATE {gate.kind} {qubits} {gate.angle!r}")
    return '\n'.join(lines) + '\n'


def parse_text(text: str) -> GateSequence:
    """
    Inverse of export_text. Blank lines and '#' comments are ignored.

    Raises:
        ParameterError: malformed line or missing QUBITS header
    """
    n_qubits = None
    layers: List[List[Gate]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        fields = line.split()
        try:
            if fields[0] == 'QUBITS' and len(fields) == 2 and n_qubits is None:
                n_qubits = int(fields[1])
            elif fields[0] == 'LAYER' and len(fields) == 1:
                layers.append([])
            elif fields[0] == 'GATE' and len(fields) in (4, 5):
                if not layers:
                    layers.append([])
                layers[-1].append(Gate(fields[1], tuple(int(q) for q in fields[2:-1]), float(fields[-1])))
            else:
                raise ValueError(f"unexpected {fields[0]!r}")
        except ValueError as e:
            raise ParameterError(f"Line {number}: {e}: {raw!r}") from e
    if n_qubits is None:
        raise ParameterError("Gate listing has no QUBITS header")
    return GateSequence(n_qubits, [Layer(tuple(gates)) for gates in layers if gates])


def sequence_from_gates(n_qubits: int, gates: Sequence[Gate]) -> GateSequence:
    """One gate per layer, in the given order."""
    return GateSequence(n_qubits, [Layer((gate,)) for gate in gates])
