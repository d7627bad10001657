"""Full-model versus effective-model comparisons."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ParameterError
from ..dynamics.propagator import evolve_unitary, excitation_state
from ..entanglement.concurrence import ConcurrenceTrace, concurrence_trace
from ..model.hamiltonian import build_single_excitation_h
from ..model.params import ModelParams
from ..utils.logger import get_subsystem_logger
from .analytic import analytic_period
from .effective import case_tag, effective_dynamics, effective_model

logger = get_subsystem_logger('perturbation')

DEFAULT_DT = 0.1


@dataclass(frozen=True)
class OracleComparison:
    """Concurrence of the full and effective models on one grid."""

    case_tag: str
    full: ConcurrenceTrace
    effective: ConcurrenceTrace

    @property
    def times(self) -> np.ndarray:
        return self.full.times

    @property
    def abs_diff(self) -> np.ndarray:
        return np.abs(self.full.c - self.effective.c)

    @property
    def max_diff(self) -> float:
        return float(np.max(self.abs_diff))

    def max_diff_until(self, t_end: float) -> float:
        """Largest |C_full - C_eff| on the grid points with Jt <= t_end."""
        mask = self.times <= t_end + 1e-9
        if not mask.any():
            raise ParameterError(f"No grid point at or before Jt={t_end}")
        return float(np.max(self.abs_diff[mask]))

    def rows(self) -> List[Tuple[float, float, float, float]]:
        """Table rows (Jt, C_full, C_eff, abs_diff)."""
        return list(zip(self.times.tolist(), self.full.c.tolist(), self.effective.c.tolist(),
                        self.abs_diff.tolist()))


def full_trace(p: ModelParams, times: Sequence[float]) -> ConcurrenceTrace:
    """Single-excitation concurrence with atom n1 initially excited."""
    states = evolve_unitary(build_single_excitation_h(p), excitation_state(p.ordering, 0), times)
    return concurrence_trace(states, p.ordering, times)


def oracle_times(p: ModelParams, dt: float = DEFAULT_DT) -> np.ndarray:
    """One analytic period of the closed-form concurrence for p."""
    if p.g_left[0] <= 0:
        raise ParameterError("The oracle window needs g > 0")
    period = analytic_period(case_tag(p), p.g_left[0], p.J_c[0], p.phi[0])
    return np.arange(0.0, period + dt / 2, dt)


def compare_full_effective(p: ModelParams, times: Optional[Sequence[float]] = None) -> OracleComparison:
    """
    Evolve the full single-excitation model and its effective model side by side.

    Args:
        p: Uniform two-atom model
        times: Time grid (default: one analytic period at Jdt = 0.1)

    Returns:
        OracleComparison
    """
    grid = oracle_times(p) if times is None else np.asarray(times, dtype=float)
    model = effective_model(p)
    comparison = OracleComparison(
        case_tag=model.case_tag, full=full_trace(p, grid), effective=effective_dynamics(model, grid)
    )
    logger.debug(f"L={p.L} pos={p.pos} case={model.case_tag}: max |C_full - C_eff| = {comparison.max_diff:.4f}")
    return comparison


@dataclass(frozen=True)
class DistanceSweep:
    """Full and effective concurrence for every scanned atom pair."""

    times: np.ndarray
    pairs: Tuple[Tuple[int, int], ...]
    full: np.ndarray
    effective: np.ndarray

    @property
    def mean_full(self) -> np.ndarray:
        return self.full.mean(axis=0)

    @property
    def mean_effective(self) -> np.ndarray:
        return self.effective.mean(axis=0)

    @property
    def distances(self) -> Tuple[int, ...]:
        return tuple(j - i for i, j in self.pairs)


def distance_sweep(
    L: int, g: float, phi: float, times: Sequence[float], first_pos: int = 1
) -> DistanceSweep:
    """
    Scan the second atom over every position at least two bonds from the first.

    Args:
        L: Cavity length
        g: Coupling amplitude
        phi: Hopping phase of both atoms
        times: Time grid
        first_pos: Left-neighbour position of atom n1

    Returns:
        DistanceSweep with per-pair traces and their average
    """
    seconds = list(range(first_pos + 2, L))
    if not seconds:
        raise ParameterError(f"No admissible second position for L={L}, first_pos={first_pos}")
    grid = np.asarray(times, dtype=float)
    pairs, full, effective = [], [], []
    for second in seconds:
        p = ModelParams.uniform(L, pos=(first_pos, second), g=g, phi=phi)
        comparison = compare_full_effective(p, grid)
        pairs.append((first_pos, second))
        full.append(comparison.full.c)
        effective.append(comparison.effective.c)
    return DistanceSweep(times=grid, pairs=tuple(pairs), full=np.array(full), effective=np.array(effective))


@dataclass(frozen=True)
class CouplingSweepPoint:
    g: float
    c_max_full: float
    t_max_full: float
    c_max_effective: float
    t_max_effective: float


def coupling_sweep(
    L: int, pos: Tuple[int, int], g_values: Sequence[float], phi: float, dt: float = DEFAULT_DT
) -> List[CouplingSweepPoint]:
    """
    C_m and t_m of the full and effective models versus g/J.

    Each point uses its own grid spanning one analytic period, since the
    effective time scale grows as J/g^2.
    """
    points = []
    for g in g_values:
        p = ModelParams.uniform(L, pos=pos, g=g, phi=phi)
        comparison = compare_full_effective(p, oracle_times(p, dt))
        points.append(CouplingSweepPoint(
            g=float(g),
            c_max_full=comparison.full.c_max,
            t_max_full=comparison.full.t_max,
            c_max_effective=comparison.effective.c_max,
            t_max_effective=comparison.effective.t_max,
        ))
    return points
