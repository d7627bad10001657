"""First-order Trotter circuits for the spin-cavity Hamiltonian.

One step applies, in order: on-site RZ on cavity spins, on-site RZ on atoms,
driving RX on atoms, then the flip-flop terms in four groups of disjoint
pairs (cavity bonds c1c2, c3c4, ...; bonds c2c3, c4c5, ...; atom-to-left
couplings; atom-to-right couplings). Each group contributes one layer per
rotation kind RXX, RYY, RXY, RYX. Zero-angle gates are left out, so a real
coupling emits no RXY/RYX layers.

A flip-flop term w s+_a s-_b + h.c. equals
(Re w / 2)(XX + YY) - (Im w / 2)(XY - YX), giving
RXX(Re w dt) RYY(Re w dt) RXY(-Im w dt) RYX(Im w dt) on (a, b).
"""

from typing import List, Tuple

import numpy as np

from ..core.errors import ParameterError, SizeError
from ..model.hamiltonian import ExchangeTerm, drive_strengths, exchange_terms, onsite_energies
from ..model.params import ModelParams
from .circuit import MAX_QUBITS, GateSequence, Layer
from .gates import ROTATION_KINDS, Gate


def term_gates(term: ExchangeTerm, dt: float) -> List[Gate]:
    """Two-qubit rotations of one flip-flop term over dt, zero angles dropped."""
    re, im = float(np.real(term.weight)), float(np.imag(term.weight))
    qubits = (term.a, term.b)
    angles = {'RXX': re * dt, 'RYY': re * dt, 'RXY': -im * dt, 'RYX': im * dt}
    return [Gate(kind, qubits, angles[kind]) for kind in ROTATION_KINDS if angles[kind] != 0.0]


def term_groups(p: ModelParams) -> List[List[ExchangeTerm]]:
    """Flip-flop terms split into the four groups of disjoint pairs."""
    order = p.ordering
    atoms = set(order.atom_index)
    groups: List[List[ExchangeTerm]] = [[], [], [], []]
    for term in exchange_terms(p):
        if term.a in atoms:
            groups[2].append(term)
        elif term.b in atoms:
            groups[3].append(term)
        else:
            bond = order.cavity_index.index(term.b)
            groups[bond % 2].append(term)
    return groups


def _single_layer(gates: List[Gate]) -> List[Layer]:
    return [Layer(tuple(gates))] if gates else []


def trotter_step(p: ModelParams, dt: float) -> GateSequence:
    """
    One first-order Trotter step exp(-i H dt) as a layered gate sequence.

    Args:
        p: Model parameters; qubit k is site k of the ordering
        dt: Step length in units of 1/J

    Returns:
        GateSequence on N_T qubits

    Raises:
        ParameterError: dt <= 0
        SizeError: N_T above the statevector guard
    """
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    if p.n_total > MAX_QUBITS:
        raise SizeError(f"N_T={p.n_total} exceeds the circuit guard of {MAX_QUBITS} qubits")
    order = p.ordering
    energies = onsite_energies(p)
    drives = drive_strengths(p)

    layers: List[Layer] = []
    for sites in (order.cavity_index, order.atom_index):
        layers += _single_layer([Gate('RZ', (k,), -energies[k] * dt) for k in sites if energies[k] != 0.0])
    layers += _single_layer([Gate('RX', (k,), 2.0 * drives[k] * dt) for k in order.atom_index if drives[k] != 0.0])

    for group in term_groups(p):
        gates = [gate for term in group for gate in term_gates(term, dt)]
        for kind in ROTATION_KINDS:
            layers += _single_layer([gate for gate in gates if gate.kind == kind])
    return GateSequence(p.n_total, layers)


def trotter_circuit(p: ModelParams, dt: float, n_steps: int) -> GateSequence:
    """n_steps repetitions of trotter_step."""
    return trotter_step(p, dt).repeat(n_steps)


def step_count(dt: float, t_final: float) -> int:
    """Whole steps of length dt that fit in [0, t_final]."""
    if dt <= 0 or t_final <= 0:
        raise ParameterError(f"dt and t_final must be positive, got dt={dt}, t_final={t_final}")
    n = int(np.floor(t_final / dt + 1e-9))
    if n < 1:
        raise ParameterError(f"dt={dt} is longer than t_final={t_final}")
    return n


def step_times(dt: float, t_final: float) -> Tuple[np.ndarray, int]:
    n = step_count(dt, t_final)
    return dt * np.arange(n + 1), n
