"""Reduced two-atom density matrices from any state representation.

Supported inputs, with N_T = ordering.n_total:
    vector of length N_T        single-excitation amplitudes
    vector of length 2**N_T     full Hilbert space
    matrix of size N_T          single-excitation density matrix
    matrix of size N_T + 1      vacuum plus one-excitation sector (index 0 is the vacuum)
    matrix of size 2**N_T       full Hilbert space density matrix

The 4x4 result uses the basis |n1 n2> = |00>, |01>, |10>, |11>.
"""

from typing import Tuple

import numpy as np

from ..core.errors import ValidationError
from ..model.params import SiteOrdering

PSD_TOL = 1e-8


def _atom_pair(ordering: SiteOrdering) -> Tuple[int, int]:
    if len(ordering.atom_index) != 2:
        raise ValidationError(
            f"Two-atom reduced state needs exactly 2 atoms, ordering has {len(ordering.atom_index)}"
        )
    return ordering.atom_index[0], ordering.atom_index[1]


def embed_sector(rho1: np.ndarray) -> np.ndarray:
    """Pad a single-excitation density matrix with an empty vacuum row/column."""
    dim = rho1.shape[0]
    rho = np.zeros((dim + 1, dim + 1), dtype=complex)
    rho[1:, 1:] = rho1
    return rho


def _from_single_excitation_vector(psi: np.ndarray, a1: int, a2: int) -> np.ndarray:
    a, b = psi[a1], psi[a2]
    rho = np.zeros((4, 4), dtype=complex)
    rho[2, 2] = abs(a) ** 2
    rho[1, 1] = abs(b) ** 2
    rho[2, 1] = a * np.conj(b)
    rho[1, 2] = np.conj(rho[2, 1])
    rho[0, 0] = float(np.sum(np.abs(psi) ** 2)) - rho[2, 2].real - rho[1, 1].real
    return rho


def _from_sector_density(rho: np.ndarray, a1: int, a2: int) -> np.ndarray:
    i1, i2 = a1 + 1, a2 + 1
    out = np.zeros((4, 4), dtype=complex)
    out[2, 2] = rho[i1, i1]
    out[1, 1] = rho[i2, i2]
    out[2, 1] = rho[i1, i2]
    out[1, 2] = rho[i2, i1]
    out[0, 0] = np.trace(rho) - rho[i1, i1] - rho[i2, i2]
    out[0, 2] = rho[0, i1]
    out[2, 0] = rho[i1, 0]
    out[0, 1] = rho[0, i2]
    out[1, 0] = rho[i2, 0]
    return out


def _from_full_vector(psi: np.ndarray, n: int, a1: int, a2: int) -> np.ndarray:
    tensor = psi.reshape([2] * n)
    matrix = np.moveaxis(tensor, [a1, a2], [0, 1]).reshape(4, -1)
    return matrix @ matrix.conj().T


def _from_full_density(rho: np.ndarray, n: int, a1: int, a2: int) -> np.ndarray:
    others = [k for k in range(n) if k not in (a1, a2)]
    perm = [a1, a2] + others + [n + a1, n + a2] + [n + k for k in others]
    rest = 2 ** len(others)
    tensor = rho.reshape([2] * (2 * n)).transpose(perm).reshape(4, rest, 4, rest)
    return np.einsum('irjr->ij', tensor)


def partial_trace_atoms(state: np.ndarray, ordering: SiteOrdering) -> np.ndarray:
    """
    Trace out the cavity spins, keeping the two atoms.

    Args:
        state: State vector or density matrix (see module docstring for shapes)
        ordering: Site ordering the state is expressed in

    Returns:
        4x4 reduced density matrix over (n1, n2)

    Raises:
        ValidationError: unsupported dimension or atom count
    """
    a1, a2 = _atom_pair(ordering)
    n = ordering.n_total
    arr = np.asarray(state, dtype=complex)

    if arr.ndim == 1:
        if arr.size == n:
            return _from_single_excitation_vector(arr, a1, a2)
        if arr.size == 2 ** n:
            return _from_full_vector(arr, n, a1, a2)
    elif arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        dim = arr.shape[0]
        if dim == 2 ** n:
            return _from_full_density(arr, n, a1, a2)
        if dim == n + 1:
            return _from_sector_density(arr, a1, a2)
        if dim == n:
            return _from_sector_density(embed_sector(arr), a1, a2)
    raise ValidationError(
        f"State of shape {arr.shape} does not match N_T={n} (expected N_T, N_T+1 or 2**N_T)"
    )


def is_valid_density(rho: np.ndarray, tol: float = PSD_TOL) -> bool:
    """Hermitian, unit trace and positive semidefinite within tol."""
    rho = np.asarray(rho)
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        return False
    if abs(np.trace(rho) - 1.0) > tol:
        return False
    return bool(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) >= -tol)
