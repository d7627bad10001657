"""Second-order effective Hamiltonians of the two atoms.

Even cavities have no cavity mode at the atoms' energy, so the atoms decouple
into a 2x2 model. Odd cavities keep the resonant mode k = (L+1)/2 (eta) in a
3x3 model: first order between atoms and eta, second order between the atoms
through every other mode. Positions i, j are the left-neighbour indices
L[n1], L[n2].
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import CaseError
from ..dynamics.propagator import evolve_unitary
from ..entanglement.concurrence import PEAK_TOL, ConcurrenceTrace, concurrence_pure_single_exc
from ..model.params import ModelParams
from ..model.spectrum import cavity_spectrum
from ..utils.logger import get_subsystem_logger
from .analytic import ODD_CAVITY

VALIDITY_RATIO = 0.3
UNIFORM_TOL = 1e-12
RESONANCE_TOL = 1e-9

logger = get_subsystem_logger('perturbation')


@dataclass(frozen=True)
class EffectiveModel:
    """Atom-only Hamiltonian in the basis (n1, n2[, eta])."""

    case_tag: str
    h_eff: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.h_eff.shape[0])

    @property
    def includes_eta(self) -> bool:
        return self.dim == 3


def case_tag(p: ModelParams) -> str:
    """'odd-cavity' for odd L, else '<parity of i>-<parity of j>'."""
    if p.N != 2:
        raise CaseError(f"Effective models describe two atoms, got N={p.N}")
    if p.L % 2:
        return ODD_CAVITY
    parity = ['even' if pos % 2 == 0 else 'odd' for pos in p.pos]
    return f"{parity[0]}-{parity[1]}"


def _uniform_setup(p: ModelParams) -> Tuple[float, float, Tuple[float, float], Tuple[float, float], Tuple[int, int]]:
    if p.N != 2:
        raise CaseError(f"Effective models describe two atoms, got N={p.N}")
    energies = p.delta_c + p.delta_n
    if max(energies) - min(energies) > UNIFORM_TOL:
        raise CaseError("Closed-form effective models need one common on-site energy")
    if max(p.J_c) - min(p.J_c) > UNIFORM_TOL or p.J_c[0] == 0:
        raise CaseError("Closed-form effective models need a uniform nonzero hopping")
    if any(abs(l - r) > UNIFORM_TOL for l, r in zip(p.g_left, p.g_right)):
        raise CaseError("Closed-form effective models need g_left == g_right; use second_order_block")
    J = p.J_c[0]
    ratio = max(p.g_left) / J
    if ratio > VALIDITY_RATIO:
        logger.warning(f"g/J = {ratio:.3f} exceeds {VALIDITY_RATIO}; second-order results are unreliable")
    return p.delta_n[0], J, (p.g_left[0], p.g_left[1]), (p.phi[0], p.phi[1]), (p.pos[0], p.pos[1])


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _geometry_factor(i: int, j: int) -> float:
    return math.cos((i + j) * math.pi / 2) + math.sin((i - j) * math.pi / 2)


def effective_h_even(p: ModelParams) -> EffectiveModel:
    """
    2x2 effective Hamiltonian of an even cavity.

    Diagonal: delta - (g^2/J)(1 - (-1)^i) cos 2phi.
    Off-diagonal: (g1 g2/J)(cos((i+j)pi/2) + sin((i-j)pi/2)) e^{i[(-1)^i phi1 + (-1)^j phi2]}.

    Raises:
        CaseError: odd L or non-uniform parameters
    """
    if p.L % 2:
        raise CaseError(f"effective_h_even needs an even cavity, got L={p.L}")
    delta, J, (g1, g2), (phi1, phi2), (i, j) = _uniform_setup(p)
    h = np.zeros((2, 2), dtype=complex)
    h[0, 0] = delta - (g1 * g1 / J) * (1 - _sign(i)) * math.cos(2 * phi1)
    h[1, 1] = delta - (g2 * g2 / J) * (1 - _sign(j)) * math.cos(2 * phi2)
    phase = _sign(i) * phi1 + _sign(j) * phi2
    h[0, 1] = (g1 * g2 / J) * _geometry_factor(i, j) * np.exp(1j * phase)
    h[1, 0] = np.conj(h[0, 1])
    return EffectiveModel(case_tag=case_tag(p), h_eff=h)


def _odd_lamb_shift(g: float, J: float, phi: float, i: int, L: int) -> float:
    weight = ((1 - _sign(i)) * (L - i) + (1 + _sign(i)) * i) / (L + 1)
    return -(g * g / J) * weight * math.cos(2 * phi)


def effective_h_odd(p: ModelParams) -> EffectiveModel:
    """
    3x3 effective Hamiltonian of an odd cavity in the basis (n1, n2, eta).

    The atom-eta elements are first order,
    g sqrt(2/(L+1)) (sin(pi i/2) e^{-i phi} + cos(pi i/2) e^{i phi});
    the atom-atom block is second order through all modes except eta, and the
    eta row and column receive no second-order correction.

    Raises:
        CaseError: even L or non-uniform parameters
    """
    L = p.L
    if L % 2 == 0:
        raise CaseError(f"effective_h_odd needs an odd cavity, got L={L}")
    delta, J, (g1, g2), (phi1, phi2), (i, j) = _uniform_setup(p)
    h = np.zeros((3, 3), dtype=complex)
    norm = math.sqrt(2.0 / (L + 1))
    for row, (g, phi, pos) in enumerate(((g1, phi1, i), (g2, phi2, j))):
        h[row, 2] = g * norm * (
            math.sin(math.pi * pos / 2) * np.exp(-1j * phi) + math.cos(math.pi * pos / 2) * np.exp(1j * phi)
        )
        h[2, row] = np.conj(h[row, 2])
        h[row, row] = delta + _odd_lamb_shift(g, J, phi, pos, L)
    h[2, 2] = delta

    big_phase = _sign(i) * phi1 + _sign(j) * phi2
    forward = (L - 2 * (j // 2) + _sign(j)) / (L + 1)
    backward = 2 * ((i - 1) // 2 + 1) * _sign(i + j - 1) / (L + 1)
    h[0, 1] = (g1 * g2 / J) * _geometry_factor(i, j) * (
        forward * np.exp(1j * big_phase) + backward * np.exp(-1j * big_phase)
    )
    h[1, 0] = np.conj(h[0, 1])
    return EffectiveModel(case_tag=ODD_CAVITY, h_eff=h)


def effective_model(p: ModelParams) -> EffectiveModel:
    """Even or odd effective model depending on the cavity length."""
    return effective_h_odd(p) if p.L % 2 else effective_h_even(p)


def mode_couplings(p: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cavity mode energies and atom-mode couplings V[alpha, k] = <n_alpha|H|k>.

    Works for any cavity (numerical modes when non-uniform) and independent
    left/right amplitudes.
    """
    spectrum = cavity_spectrum(p)
    modes = spectrum.modes
    V = np.zeros((p.N, p.L), dtype=complex)
    for atom in range(p.N):
        left = p.pos[atom] - 1
        phase = np.exp(1j * p.phi[atom])
        V[atom] = (
            p.g_left[atom] * np.conj(phase) * modes[:, left] + p.g_right[atom] * phase * modes[:, left + 1]
        )
    return spectrum.energies, V


def second_order_block(p: ModelParams, reference: float = None) -> np.ndarray:
    """
    Numerical atom-atom block -sum_k V_ak conj(V_bk) / (eps_k - E0).

    Modes within RESONANCE_TOL of E0 (the eta mode of an odd cavity) are
    excluded. On-site atom energies are added on the diagonal.

    Args:
        p: Model parameters (any cavity)
        reference: Unperturbed energy E0, default the mean atom energy

    Returns:
        (N, N) Hermitian matrix
    """
    energies, V = mode_couplings(p)
    e0 = float(np.mean(p.delta_n)) if reference is None else reference
    detuning = energies - e0
    keep = np.abs(detuning) > RESONANCE_TOL
    block = -(V[:, keep] / detuning[keep]) @ V[:, keep].conj().T
    return block + np.diag(p.delta_n)


def effective_dynamics(
    model: EffectiveModel, times: Sequence[float], peak_tol: float = PEAK_TOL
) -> ConcurrenceTrace:
    """
    Concurrence of the effective model started from atom n1 excited.

    Args:
        model: Effective model (2x2 or 3x3)
        times: Sorted, nonnegative times
        peak_tol: Peak tolerance

    Returns:
        ConcurrenceTrace with C = 2|a b|
    """
    psi0 = np.zeros(model.dim, dtype=complex)
    psi0[0] = 1.0
    states = evolve_unitary(model.h_eff, psi0, times)
    values = [concurrence_pure_single_exc(s[0], s[1]) for s in states]
    return ConcurrenceTrace.from_values(times, values, peak_tol)
