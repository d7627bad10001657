"""Inverse participation ratios and atom return probabilities."""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.linalg import eigh

from ..core.errors import ValidationError
from ..model.hamiltonian import check_hermitian
from ..model.params import SiteOrdering


@dataclass(frozen=True)
class IPRResult:
    """Per-eigenstate IPR paired with its energy, plus the average over states."""

    energies: np.ndarray
    iprs: np.ndarray
    mean: float

    def pairs(self) -> List[Tuple[float, float]]:
        return list(zip(self.energies.tolist(), self.iprs.tolist()))


def state_ipr(psi: np.ndarray) -> float:
    """sum |psi_i|^4 of the normalized state."""
    probs = np.abs(np.asarray(psi)) ** 2
    total = probs.sum()
    if total == 0:
        raise ValidationError("IPR of a zero vector is undefined")
    probs = probs / total
    return float(np.sum(probs ** 2))


def ipr(H: np.ndarray) -> IPRResult:
    """
    IPR of every eigenstate of a single-excitation Hamiltonian.

    Args:
        H: Hermitian (N_T, N_T) matrix

    Returns:
        IPRResult with I_j = sum_i |beta_i^j|^4 and mean = sum_j I_j / N_T
    """
    H = np.asarray(H, dtype=complex)
    check_hermitian(H, tol=1e-10)
    energies, vectors = eigh(H)
    iprs = np.sum(np.abs(vectors) ** 4, axis=0)
    return IPRResult(energies=energies, iprs=iprs, mean=float(iprs.sum() / H.shape[0]))


def return_probabilities(states: np.ndarray, ordering: SiteOrdering) -> Tuple[np.ndarray, np.ndarray]:
    """
    Atom populations r_1(t), r_2(t) from single-excitation states.

    Args:
        states: (times, N_T) single-excitation amplitudes
        ordering: Site ordering with two atoms

    Returns:
        Tuple (r1, r2) of arrays over time
    """
    states = np.atleast_2d(states)
    if states.shape[1] != ordering.n_total:
        raise ValidationError(
            f"Return probabilities need single-excitation states of length {ordering.n_total}"
        )
    a1, a2 = ordering.atom_index[0], ordering.atom_index[1]
    return np.abs(states[:, a1]) ** 2, np.abs(states[:, a2]) ** 2
