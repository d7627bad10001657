"""Wootters concurrence, fast single-excitation path and peak statistics."""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.errors import ParameterError, ValidationError
from ..model.params import SiteOrdering
from .reduced_state import partial_trace_atoms

PEAK_TOL = 1e-4
EIGEN_FLOOR = 1e-10

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def spin_flip(rho: np.ndarray) -> np.ndarray:
    """(sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    return SIGMA_YY @ np.conj(rho) @ SIGMA_YY


def concurrence(rho: np.ndarray) -> float:
    """
    Wootters concurrence of a two-qubit density matrix.

    Uses the eigenvalues of rho * rho_tilde directly; values below
    EIGEN_FLOOR (roundoff, including small negatives) are set to zero
    before taking square roots.

    Args:
        rho: 4x4 density matrix

    Returns:
        Concurrence in [0, 1]
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError(f"Concurrence needs a 4x4 density matrix, got {rho.shape}")
    eigenvalues = np.linalg.eigvals(rho @ spin_flip(rho)).real
    eigenvalues[eigenvalues < EIGEN_FLOOR] = 0.0
    lam = np.sort(np.sqrt(eigenvalues))[::-1]
    return float(min(1.0, max(0.0, lam[0] - lam[1] - lam[2] - lam[3])))


def concurrence_pure_single_exc(a: complex, b: complex) -> float:
    """
    C = 2|ab| for a|10> + b|01> + c|00> with arbitrary cavity weight in c.

    Args:
        a: Amplitude of atom n1 excited
        b: Amplitude of atom n2 excited

    Returns:
        Concurrence
    """
    weight = abs(a) ** 2 + abs(b) ** 2
    if weight > 1.0 + 1e-10:
        raise ParameterError(f"|a|^2 + |b|^2 = {weight:.6f} exceeds 1")
    return float(2.0 * abs(a) * abs(b))


def single_excitation_concurrence(states: np.ndarray, ordering: SiteOrdering) -> np.ndarray:
    """Vectorized 2|a b| over a (times, N_T) stack of single-excitation states."""
    states = np.atleast_2d(states)
    a1, a2 = ordering.atom_index[0], ordering.atom_index[1]
    return np.clip(2.0 * np.abs(states[:, a1]) * np.abs(states[:, a2]), 0.0, 1.0)


def concurrence_from_states(states: np.ndarray, ordering: SiteOrdering) -> np.ndarray:
    """Concurrence for each row of a state stack (single-excitation or full space)."""
    states = np.atleast_2d(states)
    if states.shape[1] == ordering.n_total:
        return single_excitation_concurrence(states, ordering)
    return np.array([concurrence(partial_trace_atoms(psi, ordering)) for psi in states])


def concurrence_from_density(rhos: Iterable[np.ndarray], ordering: SiteOrdering) -> np.ndarray:
    """Concurrence for a sequence of density matrices of any supported size."""
    return np.array([concurrence(partial_trace_atoms(rho, ordering)) for rho in rhos])


def _peak(times: np.ndarray, c: np.ndarray, peak_tol: float) -> Tuple[float, float]:
    if c.size == 0:
        raise ParameterError("Cannot take peak statistics of an empty trace")
    c_max = float(np.max(c))
    first = int(np.argmax(c >= c_max - peak_tol))
    return c_max, float(times[first])


@dataclass(frozen=True)
class ConcurrenceTrace:
    """Concurrence sampled on a time grid with its first-occurrence peak."""

    times: np.ndarray
    c: np.ndarray
    c_max: float
    t_max: float
    peak_tol: float = PEAK_TOL

    @classmethod
    def from_values(
        cls, times: Sequence[float], c: Sequence[float], peak_tol: float = PEAK_TOL
    ) -> 'ConcurrenceTrace':
        times = np.asarray(times, dtype=float)
        values = np.clip(np.asarray(c, dtype=float), 0.0, 1.0)
        if times.shape != values.shape:
            raise ParameterError(f"times {times.shape} and values {values.shape} differ in shape")
        c_max, t_max = _peak(times, values, peak_tol)
        return cls(times=times, c=values, c_max=c_max, t_max=t_max, peak_tol=peak_tol)

    def window(self, t_stop: float) -> 'ConcurrenceTrace':
        """Restrict to times <= t_stop and recompute the peak."""
        mask = self.times <= t_stop + 1e-12
        return ConcurrenceTrace.from_values(self.times[mask], self.c[mask], self.peak_tol)

    def __len__(self) -> int:
        return int(self.times.size)


def peak_stats(trace: ConcurrenceTrace, peak_tol: Optional[float] = None) -> Tuple[float, float]:
    """
    Maximum concurrence C_m and the earliest time reaching it.

    Args:
        trace: Concurrence trace
        peak_tol: Times with c >= C_m - peak_tol count as attaining the peak

    Returns:
        (C_m, t_m)
    """
    tol = trace.peak_tol if peak_tol is None else peak_tol
    return _peak(np.asarray(trace.times), np.asarray(trace.c), tol)


def concurrence_trace(
    states: Union[np.ndarray, Sequence[np.ndarray]],
    ordering: SiteOrdering,
    times: Sequence[float],
    peak_tol: float = PEAK_TOL,
) -> ConcurrenceTrace:
    """
    ConcurrenceTrace from evolved states or density matrices.

    Args:
        states: (times, dim) state stack or sequence of density matrices
        ordering: Site ordering
        times: Time grid matching states
        peak_tol: Peak tolerance

    Returns:
        ConcurrenceTrace
    """
    first = np.asarray(states[0])
    if first.ndim == 2:
        values = concurrence_from_density(states, ordering)
    else:
        values = concurrence_from_states(np.asarray(states), ordering)
    return ConcurrenceTrace.from_values(times, values, peak_tol)
