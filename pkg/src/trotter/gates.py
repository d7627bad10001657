"""Gate records and their matrices.

Rotations follow R_P(theta) = exp(-i theta/2 P) for single-qubit Paulis and
R_AB(theta) = exp(-i theta/2 A(x)B) for the two-qubit products, with the
first listed qubit as the more significant tensor factor. |1> is the excited
spin.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.errors import ParameterError

SINGLE_KINDS = ('RX', 'RY', 'RZ')
ROTATION_KINDS = ('RXX', 'RYY', 'RXY', 'RYX')
NATIVE_KINDS = ('CX',)
ALL_KINDS = SINGLE_KINDS + ROTATION_KINDS + NATIVE_KINDS

PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}

CX_MATRIX = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """
    One gate of a circuit.

    Attributes:
        kind: RX, RY, RZ, RXX, RYY, RXY, RYX or CX
        qubits: One index for single-qubit kinds, two distinct indices otherwise
        angle: Rotation angle in radians (ignored by CX)
    """

    kind: str
    qubits: Tuple[int, ...]
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ParameterError(f"Unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, 'qubits', qubits)
        object.__setattr__(self, 'angle', float(self.angle))
        arity = 1 if self.kind in SINGLE_KINDS else 2
        if len(qubits) != arity:
            raise ParameterError(f"{self.kind} acts on {arity} qubit(s), got {qubits}")
        if arity == 2 and qubits[0] == qubits[1]:
            raise ParameterError(f"{self.kind} needs two distinct qubits, got {qubits}")
        if any(q < 0 for q in qubits):
            raise ParameterError(f"Negative qubit index in {qubits}")
        if not math.isfinite(self.angle):
            raise ParameterError(f"{self.kind} angle must be finite, got {self.angle}")

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2


def rotation(pauli: np.ndarray, theta: float) -> np.ndarray:
    """exp(-i theta/2 P) for any operator with P^2 = 1."""
    identity = np.eye(pauli.shape[0], dtype=complex)
    return math.cos(theta / 2.0) * identity - 1j * math.sin(theta / 2.0) * pauli


def gate_unitary(gate: Gate) -> np.ndarray:
    """2x2 or 4x4 matrix of a gate."""
    if gate.kind == 'CX':
        return CX_MATRIX.copy()
    if gate.kind in SINGLE_KINDS:
        return rotation(PAULI[gate.kind[1]], gate.angle)
    a, b = gate.kind[1], gate.kind[2]
    return rotation(np.kron(PAULI[a], PAULI[b]), gate.angle)


def equal_up_to_phase(U: np.ndarray, V: np.ndarray, tol: float = 1e-10) -> bool:
    """
    Whether U = e^{i alpha} V for some global phase alpha.

    Args:
        U: Matrix
        V: Matrix of the same shape
        tol: Entrywise tolerance after phase alignment

    Returns:
        True when the aligned matrices agree within tol
    """
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape:
        return False
    k = np.unravel_index(np.argmax(np.abs(V)), V.shape)
    if abs(V[k]) < tol:
        return bool(np.max(np.abs(U)) < tol)
    phase = U[k] / V[k]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(U - phase * V)) < tol)
