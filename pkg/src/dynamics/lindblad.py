"""Lindblad master-equation evolution with spin amplitude damping.

d rho/dt = -i[H, rho] + sum_k Gamma_k (s-_k rho s+_k - {s+_k s-_k, rho}/2)

Two representations are supported: the full 2^N_T space (any H, including
driving) and the vacuum plus one-excitation sector of dimension N_T + 1,
which is closed under this dissipator whenever H conserves excitations.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..core.errors import AccuracyError, ParameterError, SizeError, ValidationError
from ..entanglement.concurrence import concurrence
from ..entanglement.reduced_state import is_valid_density, partial_trace_atoms
from ..model.params import SiteOrdering
from ..utils.logger import get_dynamics_logger
from .propagator import _check_times

LINDBLAD_MAX_SITES = 10
STEP_HALVING_TOL = 1e-6
DENSITY_TOL = 1e-8

logger = get_dynamics_logger()


@dataclass(frozen=True)
class DissipationParams:
    """Decay rates of the cavity spins and the atoms."""

    gamma_c: Tuple[float, ...]
    gamma_n: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'gamma_c', tuple(float(g) for g in self.gamma_c))
        object.__setattr__(self, 'gamma_n', tuple(float(g) for g in self.gamma_n))
        if any(g < 0 for g in self.gamma_c + self.gamma_n):
            raise ParameterError("decay rates must be nonnegative")

    @classmethod
    def uniform(cls, L: int, N: int, gamma: float) -> 'DissipationParams':
        return cls(gamma_c=(gamma,) * L, gamma_n=(gamma,) * N)

    @classmethod
    def none(cls, L: int, N: int) -> 'DissipationParams':
        return cls.uniform(L, N, 0.0)

    @property
    def max_rate(self) -> float:
        return max(self.gamma_c + self.gamma_n, default=0.0)

    def site_rates(self, ordering: SiteOrdering) -> np.ndarray:
        """Rates in site-ordering order."""
        if len(self.gamma_c) != len(ordering.cavity_index) or len(self.gamma_n) != len(ordering.atom_index):
            raise ParameterError(
                f"DissipationParams has {len(self.gamma_c)}+{len(self.gamma_n)} rates, "
                f"ordering has {len(ordering.cavity_index)}+{len(ordering.atom_index)} sites"
            )
        rates = np.zeros(ordering.n_total)
        rates[list(ordering.cavity_index)] = self.gamma_c
        rates[list(ordering.atom_index)] = self.gamma_n
        return rates


@dataclass(frozen=True)
class _JumpChannel:
    rate: float
    src: np.ndarray
    dst: np.ndarray


class LindbladGenerator:
    """
    Right-hand side of the master equation in matrix form.

    Each lowering operator is stored as an index map src -> dst over the basis,
    so s- rho s+ is a gather/scatter and s+ s- is a diagonal projector.
    """

    def __init__(self, H, channels: Sequence[_JumpChannel]):
        self.H = sp.csr_matrix(H, dtype=complex) if sp.issparse(H) else np.asarray(H, dtype=complex)
        active = [ch for ch in channels if ch.rate > 0.0]
        self.channels = [ch for ch in active if ch.src.size > 1]
        # Single-element maps (the sector basis) are applied together.
        point = [ch for ch in active if ch.src.size == 1]
        self.point_src = np.array([int(ch.src[0]) for ch in point], dtype=int)
        self.point_dst = np.array([int(ch.dst[0]) for ch in point], dtype=int)
        self.point_rate = np.array([ch.rate for ch in point], dtype=float)
        self.H_dag = self.H.conj().T
        dim = self.H.shape[0]
        self.damping = np.zeros(dim)
        for ch in active:
            self.damping[ch.src] += 0.5 * ch.rate

    @property
    def dim(self) -> int:
        return int(self.H.shape[0])

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        h_rho = self.H @ rho
        rho_h = (self.H_dag @ rho.conj().T).conj().T
        out = -1j * (h_rho - rho_h)
        out -= self.damping[:, None] * rho + rho * self.damping[None, :]
        for ch in self.channels:
            out[np.ix_(ch.dst, ch.dst)] += ch.rate * rho[np.ix_(ch.src, ch.src)]
        if self.point_src.size:
            np.add.at(out, (self.point_dst, self.point_dst), self.point_rate * rho[self.point_src, self.point_src])
        return out


def full_space_channels(rates: np.ndarray) -> List[_JumpChannel]:
    """Amplitude-damping index maps for every site of the full 2^N_T space."""
    n = rates.size
    indices = np.arange(2 ** n)
    channels = []
    for k, rate in enumerate(rates):
        mask = 1 << (n - 1 - k)
        src = indices[(indices & mask) != 0]
        channels.append(_JumpChannel(rate=float(rate), src=src, dst=src - mask))
    return channels


def sector_channels(rates: np.ndarray) -> List[_JumpChannel]:
    """Amplitude damping |site k> -> |vacuum> in the (N_T + 1) sector basis."""
    return [
        _JumpChannel(rate=float(rate), src=np.array([k + 1]), dst=np.array([0]))
        for k, rate in enumerate(rates)
    ]


def _max_element(H) -> float:
    if sp.issparse(H):
        return float(abs(H).max()) if H.nnz else 0.0
    return float(np.max(np.abs(H))) if H.size else 0.0


def default_step(H, max_rate: float) -> float:
    """min(0.01/J, 0.1/Gamma_max) with J the largest matrix element of H."""
    candidates = []
    scale = _max_element(H)
    if scale > 0:
        candidates.append(0.01 / scale)
    if max_rate > 0:
        candidates.append(0.1 / max_rate)
    return min(candidates) if candidates else 0.01


def _rk4_step(generator: LindbladGenerator, rho: np.ndarray, h: float) -> np.ndarray:
    k1 = generator(rho)
    k2 = generator(rho + 0.5 * h * k1)
    k3 = generator(rho + 0.5 * h * k2)
    k4 = generator(rho + h * k3)
    return rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _hermitize(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().T)


def integrate(
    generator: LindbladGenerator, rho0: np.ndarray, times: np.ndarray, h_max: float
) -> List[np.ndarray]:
    """
    Fixed-step RK4 from t = 0, recording rho at each requested time.

    Each interval between output times is split into ceil(span / h_max)
    equal substeps.
    """
    rho = rho0.astype(complex)
    t = 0.0
    out = []
    for target in times:
        span = target - t
        if span > 0:
            n_steps = max(1, math.ceil(span / h_max - 1e-12))
            h = span / n_steps
            for _ in range(n_steps):
                rho = _rk4_step(generator, rho, h)
            rho = _hermitize(rho)
            t = target
        out.append(rho.copy())
    return out


def _validate_density(rho0: np.ndarray, dim: int) -> np.ndarray:
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValidationError(f"rho0 has shape {rho0.shape}, expected ({dim}, {dim})")
    if not is_valid_density(rho0, DENSITY_TOL):
        raise ValidationError("rho0 is not a valid density matrix")
    return rho0


def _final_measure(rho: np.ndarray, ordering: Optional[SiteOrdering]) -> Tuple[str, np.ndarray]:
    if ordering is not None and len(ordering.atom_index) == 2:
        return 'concurrence', np.array([concurrence(partial_trace_atoms(rho, ordering))])
    return 'max |rho|', rho


def _run_with_halving_check(
    generator: LindbladGenerator,
    rho0: np.ndarray,
    times: np.ndarray,
    h: float,
    ordering: Optional[SiteOrdering],
    check_convergence: bool,
) -> List[np.ndarray]:
    result = integrate(generator, rho0, times, h)
    if not check_convergence:
        return result
    refined = integrate(generator, rho0, times[-1:], h / 2.0)
    label, coarse_value = _final_measure(result[-1], ordering)
    _, fine_value = _final_measure(refined[-1], ordering)
    change = float(np.max(np.abs(coarse_value - fine_value)))
    logger.debug(f"Step halving check ({label}): change {change:.3e} at h={h:.3e}")
    if change > STEP_HALVING_TOL:
        raise AccuracyError(
            f"Halving the Lindblad step h={h:.3e} changed the final {label} by {change:.3e}"
        )
    return result


def evolve_lindblad(
    H,
    rho0: np.ndarray,
    d: DissipationParams,
    times: Sequence[float],
    ordering: Optional[SiteOrdering] = None,
    step: Optional[float] = None,
    check_convergence: bool = True,
) -> List[np.ndarray]:
    """
    Full-space master-equation evolution.

    Args:
        H: Full 2^N_T Hamiltonian (dense or sparse)
        rho0: Initial density matrix
        d: Decay rates
        times: Sorted, nonnegative output times
        ordering: Site ordering (used to map rates onto tensor factors and for
            the concurrence-based halving check); may be omitted only for a
            bare chain without atom rates
        step: RK4 step; defaults to min(0.01/J, 0.1/Gamma_max)
        check_convergence: Repeat with half the step and compare the end state

    Returns:
        Density matrices at each time

    Raises:
        SizeError: N_T > LINDBLAD_MAX_SITES
        ParameterError: atom rates without an ordering, or a rate count mismatch
        AccuracyError: step halving changes the final concurrence by > 1e-6
    """
    times = _check_times(times)
    dim = H.shape[0]
    n_sites = int(round(math.log2(dim))) if dim > 0 else 0
    if 2 ** n_sites != dim:
        raise ValidationError(f"Full-space Hamiltonian dimension {dim} is not a power of 2")
    if n_sites > LINDBLAD_MAX_SITES:
        raise SizeError(f"Lindblad evolution limited to N_T <= {LINDBLAD_MAX_SITES}, got {n_sites}")
    rho0 = _validate_density(rho0, dim)

    if ordering is not None:
        rates = d.site_rates(ordering)
    elif d.gamma_n:
        raise ParameterError("Atom decay rates need a site ordering to be placed on their tensor factors")
    else:
        rates = np.array(d.gamma_c, dtype=float)
    if rates.size != n_sites:
        raise ParameterError(f"{rates.size} decay rates for {n_sites} sites")

    generator = LindbladGenerator(H, full_space_channels(rates))
    h = step if step is not None else default_step(H, d.max_rate)
    logger.debug(f"Lindblad full space: N_T={n_sites}, step={h:.3e}, points={times.size}")
    return _run_with_halving_check(generator, rho0, times, h, ordering, check_convergence)


def sector_hamiltonian(h1: np.ndarray) -> np.ndarray:
    """Vacuum (energy 0) plus the single-excitation block."""
    h1 = np.asarray(h1, dtype=complex)
    n = h1.shape[0]
    H = np.zeros((n + 1, n + 1), dtype=complex)
    H[1:, 1:] = h1
    return H


def evolve_lindblad_sector(
    h1: np.ndarray,
    psi0: np.ndarray,
    d: DissipationParams,
    times: Sequence[float],
    ordering: SiteOrdering,
    step: Optional[float] = None,
    check_convergence: bool = True,
) -> List[np.ndarray]:
    """
    Master equation restricted to vacuum plus one excitation.

    Args:
        h1: Single-excitation Hamiltonian (N_T, N_T), undriven
        psi0: Initial single-excitation state (length N_T) or sector state (N_T + 1)
        d: Decay rates
        times: Sorted, nonnegative output times
        ordering: Site ordering of h1
        step: RK4 step override
        check_convergence: Apply the step-halving check

    Returns:
        (N_T + 1)-dimensional density matrices, index 0 the vacuum
    """
    times = _check_times(times)
    n = ordering.n_total
    if np.asarray(h1).shape != (n, n):
        raise ValidationError(f"h1 has shape {np.asarray(h1).shape}, expected ({n}, {n})")
    psi = np.asarray(psi0, dtype=complex)
    if psi.size == n:
        psi = np.concatenate([[0.0], psi])
    if psi.size != n + 1:
        raise ValidationError(f"psi0 has length {psi.size}, expected {n} or {n + 1}")
    rho0 = _validate_density(np.outer(psi, psi.conj()), n + 1)

    H = sector_hamiltonian(h1)
    generator = LindbladGenerator(H, sector_channels(d.site_rates(ordering)))
    h = step if step is not None else default_step(H, d.max_rate)
    logger.debug(f"Lindblad sector: N_T={n}, step={h:.3e}, points={times.size}")
    return _run_with_halving_check(generator, rho0, times, h, ordering, check_convergence)
