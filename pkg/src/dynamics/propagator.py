"""Exact unitary time evolution."""

from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import expm_multiply

from ..core.errors import ParameterError, ValidationError
from ..model.hamiltonian import check_hermitian
from ..model.params import SiteOrdering
from ..utils.cache import cached_by_array
from ..utils.logger import get_dynamics_logger

NORM_TOL = 1e-10
EVOLVE_HERMITIAN_TOL = 1e-10
SPARSE_CHUNK = 256


@cached_by_array(max_size=32)
def _eigensystem(H: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    energies, vectors = eigh(H)
    energies.flags.writeable = False
    vectors.flags.writeable = False
    return energies, vectors


def _check_times(times: Sequence[float]) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise ParameterError("times must not be empty")
    if np.any(times < 0):
        raise ParameterError("times must be nonnegative")
    if np.any(np.diff(times) < 0):
        raise ParameterError("times must be sorted")
    return times


def _check_state(psi0: np.ndarray, dim: int) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (dim,):
        raise ValidationError(f"Initial state has shape {psi0.shape}, expected ({dim},)")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"Initial state is not normalized (norm = {norm:.12f})")
    return psi0


class Propagator:
    """
    exp(-iHt) from one eigendecomposition of a time-independent H.

    Eigensystems are cached by matrix content, so building a Propagator for a
    Hamiltonian already seen costs one hash.
    """

    def __init__(self, H: np.ndarray):
        H = np.asarray(H, dtype=complex)
        check_hermitian(H, tol=EVOLVE_HERMITIAN_TOL)
        self.energies, self.vectors = _eigensystem(H)

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    def unitary(self, t: float) -> np.ndarray:
        """Full propagator matrix U(t)."""
        phases = np.exp(-1j * self.energies * t)
        return (self.vectors * phases) @ self.vectors.conj().T

    def evolve(self, psi0: np.ndarray, times: Sequence[float]) -> np.ndarray:
        """
        States at every requested time.

        Args:
            psi0: Initial state of length dim
            times: Evaluation times (any real values)

        Returns:
            (len(times), dim) complex array
        """
        times = np.atleast_1d(np.asarray(times, dtype=float))
        coeffs = self.vectors.conj().T @ np.asarray(psi0, dtype=complex)
        phases = np.exp(-1j * np.outer(times, self.energies))
        return (phases * coeffs) @ self.vectors.T


def evolve_unitary(H: np.ndarray, psi0: np.ndarray, times: Sequence[float]) -> np.ndarray:
    """
    psi(t) = exp(-iHt) psi0 via eigendecomposition.

    Args:
        H: Hermitian matrix
        psi0: Normalized initial state
        times: Sorted, nonnegative times

    Returns:
        (len(times), dim) array of states

    Raises:
        ValidationError: H not Hermitian or psi0 not normalized
        ParameterError: bad time grid
    """
    times = _check_times(times)
    propagator = Propagator(H)
    return propagator.evolve(_check_state(psi0, propagator.dim), times)


def _uniform_step(times: np.ndarray) -> Optional[float]:
    if times.size < 2:
        return None
    steps = np.diff(times)
    if np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        return float(steps[0])
    return None


def iter_sparse_evolution(
    H: sp.spmatrix, psi0: np.ndarray, times: Sequence[float], chunk: int = SPARSE_CHUNK
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """
    Chunked sparse evolution, yielding (times_chunk, states_chunk).

    Keeps at most `chunk` states in memory, which matters for 2^N_T-dimensional
    runs over thousands of time points.
    """
    times = _check_times(times)
    H = sp.csr_matrix(H, dtype=complex)
    check_hermitian(H, tol=EVOLVE_HERMITIAN_TOL)
    psi = _check_state(psi0, H.shape[0])
    generator = -1j * H

    if times[0] > 0:
        psi = expm_multiply(generator * times[0], psi)
    step = _uniform_step(times)
    start = 0
    while start < times.size:
        stop = min(start + chunk, times.size)
        block_times = times[start:stop]
        if step is not None and block_times.size > 1:
            span = block_times[-1] - block_times[0]
            block = expm_multiply(
                generator, psi, start=0.0, stop=span, num=block_times.size, endpoint=True
            )
        else:
            rows = [psi]
            for dt in np.diff(block_times):
                rows.append(expm_multiply(generator * dt, rows[-1]))
            block = np.array(rows)
        yield block_times, block
        if stop < times.size:
            psi = expm_multiply(generator * (times[stop] - block_times[-1]), block[-1])
        start = stop


def evolve_sparse(H: sp.spmatrix, psi0: np.ndarray, times: Sequence[float]) -> np.ndarray:
    """
    exp(-iHt) psi0 for a sparse H without diagonalizing it.

    Args:
        H: Sparse Hermitian matrix
        psi0: Normalized initial state
        times: Sorted, nonnegative times (uniform grids use one expm_multiply per chunk)

    Returns:
        (len(times), dim) array of states
    """
    blocks = [states for _, states in iter_sparse_evolution(H, psi0, times)]
    result = np.concatenate(blocks, axis=0)
    get_dynamics_logger().debug(f"Sparse evolution: dim={result.shape[1]}, points={result.shape[0]}")
    return result


def excitation_state(ordering: SiteOrdering, atom: int = 0) -> np.ndarray:
    """Single-excitation state with atom `atom` (0-based) excited."""
    if atom < 0 or atom >= len(ordering.atom_index):
        raise ParameterError(f"atom {atom} out of range for {len(ordering.atom_index)} atoms")
    psi = np.zeros(ordering.n_total, dtype=complex)
    psi[ordering.atom_index[atom]] = 1.0
    return psi


def site_excitation(n_sites: int, site: int) -> np.ndarray:
    """Single-excitation basis vector for an arbitrary site index."""
    if site < 0 or site >= n_sites:
        raise ParameterError(f"site {site} out of range [0, {n_sites})")
    psi = np.zeros(n_sites, dtype=complex)
    psi[site] = 1.0
    return psi


def ground_state(n_sites: int) -> np.ndarray:
    """Full-space vacuum |0...0>."""
    psi = np.zeros(2 ** n_sites, dtype=complex)
    psi[0] = 1.0
    return psi


def embed_single_excitation(psi1: np.ndarray) -> np.ndarray:
    """Map a single-excitation vector into the full 2^N_T space."""
    psi1 = np.asarray(psi1, dtype=complex)
    n = psi1.size
    psi = np.zeros(2 ** n, dtype=complex)
    for k, amplitude in enumerate(psi1):
        psi[1 << (n - 1 - k)] = amplitude
    return psi
