"""Single-excitation and full-Hilbert-space Hamiltonians."""

from dataclasses import dataclass
from typing import List

import numpy as np
import scipy.sparse as sp

from ..core.errors import SizeError, ValidationError
from ..utils.logger import get_model_logger
from .params import ModelParams

FULL_SPACE_MAX_SITES = 14
SPARSE_MAX_SITES = 20
HERMITIAN_TOL = 1e-12

SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])


@dataclass(frozen=True)
class ExchangeTerm:
    """weight * s+_a s-_b + h.c. between sites a and b of the ordering."""

    a: int
    b: int
    weight: complex


def exchange_terms(p: ModelParams) -> List[ExchangeTerm]:
    """
    All flip-flop terms of the model in site-ordering indices.

    Cavity bonds carry J_c. Atom n_i enters through
    g e^{-i phi} (s+_n s-_{c_L} + s+_{c_R} s-_n) + h.c., with the left and right
    amplitudes taken from g_left and g_right.

    Args:
        p: Model parameters

    Returns:
        List of ExchangeTerm
    """
    order = p.ordering
    terms: List[ExchangeTerm] = []
    for i, hop in enumerate(p.J_c):
        if hop != 0.0:
            terms.append(ExchangeTerm(order.cavity_index[i + 1], order.cavity_index[i], complex(hop)))
    for atom in range(p.N):
        phase = np.exp(-1j * p.phi[atom])
        n = order.atom_index[atom]
        if p.g_left[atom] != 0.0:
            terms.append(ExchangeTerm(n, order.left_neighbor[atom], p.g_left[atom] * phase))
        if p.g_right[atom] != 0.0:
            terms.append(ExchangeTerm(order.right_neighbor[atom], n, p.g_right[atom] * phase))
    return terms


def onsite_energies(p: ModelParams) -> np.ndarray:
    """On-site energies in site-ordering order."""
    order = p.ordering
    energies = np.zeros(p.n_total)
    energies[list(order.cavity_index)] = p.delta_c
    energies[list(order.atom_index)] = p.delta_n
    return energies


def drive_strengths(p: ModelParams) -> np.ndarray:
    """Driving amplitudes in site-ordering order (zero on cavity spins)."""
    drives = np.zeros(p.n_total)
    drives[list(p.ordering.atom_index)] = p.omega
    return drives


def hermiticity_error(H) -> float:
    """max |H - H^dagger| for dense or sparse matrices."""
    diff = H - H.conj().T
    if sp.issparse(diff):
        return float(abs(diff).max()) if diff.nnz else 0.0
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def check_hermitian(H, tol: float = HERMITIAN_TOL) -> None:
    """Raise ValidationError unless H is square and Hermitian within tol."""
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"Operator must be square, got shape {H.shape}")
    err = hermiticity_error(H)
    if err > tol:
        raise ValidationError(f"Operator is not Hermitian (max |H - H^dagger| = {err:.3e})")


def build_single_excitation_h(p: ModelParams) -> np.ndarray:
    """
    Hamiltonian restricted to one excitation, in the interleaved site basis.

    Row c_L, column n_i carries g e^{+i phi}; row n_i, column c_R carries
    g e^{+i phi}; Hermitian conjugates fill the mirrored entries. Drivings
    are ignored because they do not conserve excitation number.

    Args:
        p: Model parameters

    Returns:
        Complex (N_T, N_T) matrix
    """
    H = np.diag(onsite_energies(p)).astype(complex)
    for term in exchange_terms(p):
        H[term.a, term.b] += term.weight
        H[term.b, term.a] += np.conj(term.weight)
    return H


def _site_operator(op: np.ndarray, site: int, n_sites: int) -> sp.csr_matrix:
    left = sp.identity(2 ** site, format='csr')
    right = sp.identity(2 ** (n_sites - site - 1), format='csr')
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format='csr')


def build_full_h_sparse(p: ModelParams) -> sp.csr_matrix:
    """
    Full 2^N_T Hamiltonian as a sparse matrix.

    Site k of the ordering is tensor factor k (site 0 most significant);
    |1> is the excited state.

    Args:
        p: Model parameters

    Returns:
        Complex CSR matrix

    Raises:
        SizeError: N_T above SPARSE_MAX_SITES
    """
    n = p.n_total
    if n > SPARSE_MAX_SITES:
        raise SizeError(f"N_T={n} exceeds the sparse full-space guard {SPARSE_MAX_SITES}")
    dim = 2 ** n
    H = sp.csr_matrix((dim, dim), dtype=complex)
    plus = [_site_operator(SIGMA_PLUS, k, n) for k in range(n)]
    minus = [op.T.tocsr() for op in plus]

    for k, energy in enumerate(onsite_energies(p)):
        if energy != 0.0:
            H = H + energy * (plus[k] @ minus[k])
    for term in exchange_terms(p):
        hop = plus[term.a] @ minus[term.b]
        H = H + term.weight * hop + np.conj(term.weight) * hop.conj().T
    for k, drive in enumerate(drive_strengths(p)):
        if drive != 0.0:
            H = H + drive * (plus[k] + minus[k])
    H = H.tocsr()
    H.eliminate_zeros()
    get_model_logger().debug(f"Full Hamiltonian: N_T={n}, dim={dim}, nnz={H.nnz}")
    return H


def build_full_h(p: ModelParams) -> np.ndarray:
    """
    Full 2^N_T Hamiltonian as a dense matrix.

    Args:
        p: Model parameters

    Returns:
        Complex (2^N_T, 2^N_T) matrix

    Raises:
        SizeError: N_T above FULL_SPACE_MAX_SITES
    """
    if p.n_total > FULL_SPACE_MAX_SITES:
        raise SizeError(
            f"N_T={p.n_total} exceeds the dense full-space guard {FULL_SPACE_MAX_SITES}"
        )
    return build_full_h_sparse(p).toarray()


def one_excitation_indices(n_sites: int) -> np.ndarray:
    """Full-space basis indices of the states with a single excited site, in site order."""
    return np.array([1 << (n_sites - 1 - k) for k in range(n_sites)], dtype=np.int64)


def one_excitation_block(H_full, n_sites: int) -> np.ndarray:
    """Restriction of a full-space operator to the one-excitation sector."""
    idx = one_excitation_indices(n_sites)
    if sp.issparse(H_full):
        return H_full.tocsr()[idx][:, idx].toarray()
    return np.asarray(H_full)[np.ix_(idx, idx)]


def excitation_number(n_sites: int) -> np.ndarray:
    """Diagonal of the total excitation-number operator."""
    indices = np.arange(2 ** n_sites)
    return np.array([bin(i).count('1') for i in indices], dtype=float)


