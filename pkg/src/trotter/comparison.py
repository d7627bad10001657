"""Trotterized versus exact dynamics, error scaling and gate-time accounting."""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..core.errors import ParameterError
from ..dynamics.propagator import embed_single_excitation, evolve_unitary, excitation_state
from ..entanglement.concurrence import ConcurrenceTrace, concurrence_trace
from ..model.hamiltonian import build_full_h
from ..model.params import ModelParams
from ..utils.logger import get_subsystem_logger
from ..utils.parallel import ordered_map
from .circuit import DEFAULT_TIMING, TimingModel, simulate_circuit
from .trotterize import step_times, trotter_step

logger = get_subsystem_logger('trotter')

ERROR_METRICS = ('state', 'concurrence')
SCALING_DTS = (2.0, 1.0, 0.5, 0.25)
FIRST_ORDER_RATIO = (1.6, 2.4)


@dataclass(frozen=True)
class TrotterRun:
    """
    One Trotterized trajectory next to the exact one on the step grid.

    Attributes:
        params: Model that was simulated
        dt: Step length
        n_steps: Number of steps
        exact: Exact concurrence at the step times
        trotter: Circuit concurrence at the step times
        state_error: Largest phase-aligned state distance over the steps
        step_ns: Duration of one step under the timing model
    """

    params: ModelParams
    dt: float
    n_steps: int
    exact: ConcurrenceTrace
    trotter: ConcurrenceTrace
    state_error: float
    step_ns: float

    @property
    def times(self) -> np.ndarray:
        return self.exact.times

    @property
    def concurrence_error(self) -> float:
        return float(np.max(np.abs(self.exact.c - self.trotter.c)))

    @property
    def total_ns(self) -> float:
        return self.n_steps * self.step_ns

    @property
    def total_us(self) -> float:
        return self.total_ns / 1000.0


def phase_aligned_distance(psi: np.ndarray, phi: np.ndarray) -> float:
    """min over alpha of |psi - e^{i alpha} phi| for normalized states."""
    overlap = abs(np.vdot(phi, psi))
    return float(np.sqrt(max(0.0, 2.0 - 2.0 * overlap)))


def _trajectories(p: ModelParams, dt: float, t_final: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    times, n_steps = step_times(dt, t_final)
    psi0 = embed_single_excitation(excitation_state(p.ordering, 0))
    step = trotter_step(p, dt)
    states = [psi0]
    for _ in range(n_steps):
        states.append(simulate_circuit(step, states[-1]))
    exact = evolve_unitary(build_full_h(p), psi0, times)
    return times, np.array(states), exact, n_steps


def trotter_vs_exact(
    p: ModelParams, dt: float, t_final: float, timing: TimingModel = DEFAULT_TIMING
) -> TrotterRun:
    """
    Simulate the Trotter circuit from atom n1 excited and compare with exp(-iHt).

    Args:
        p: Model parameters
        dt: Trotter step
        t_final: Horizon; floor(t_final/dt) steps are applied
        timing: Device timing model for the duration budget

    Returns:
        TrotterRun
    """
    times, trotter_states, exact_states, n_steps = _trajectories(p, dt, t_final)
    order = p.ordering
    distance = max(phase_aligned_distance(a, b) for a, b in zip(trotter_states, exact_states))
    step = trotter_step(p, dt)
    run = TrotterRun(
        params=p,
        dt=dt,
        n_steps=n_steps,
        exact=concurrence_trace(exact_states, order, times),
        trotter=concurrence_trace(trotter_states, order, times),
        state_error=distance,
        step_ns=step.duration_ns(timing),
    )
    logger.debug(f"Trotter dt={dt}: {n_steps} steps, state error {distance:.3e}, "
                 f"C_m {run.trotter.c_max:.4f} vs exact {run.exact.c_max:.4f}")
    return run


def _run_point(job: Tuple[ModelParams, float, float]) -> TrotterRun:
    p, dt, t_final = job
    return trotter_vs_exact(p, dt, t_final)


def trotter_scan(
    base: ModelParams, phis: Sequence[float], dts: Sequence[float], t_final: float, jobs: int = 1
) -> List[TrotterRun]:
    """
    trotter_vs_exact over every (phi, dt) pair, phi outermost.

    Args:
        base: Model whose hopping phases are replaced
        phis: Phases applied to every atom
        dts: Trotter steps
        t_final: Horizon
        jobs: Worker processes

    Returns:
        TrotterRun per pair, in scan order
    """
    jobs_list = [
        (base.replace(phi=(float(phi),) * base.N), float(dt), t_final)
        for phi in phis for dt in dts
    ]
    logger.info(f"Trotter scan: {len(jobs_list)} points up to Jt={t_final}")
    return ordered_map(_run_point, jobs_list, jobs)


@dataclass(frozen=True)
class ErrorScaling:
    """Trotter errors over successively smaller steps."""

    dts: Tuple[float, ...]
    errors: Tuple[float, ...]
    metric: str

    @property
    def ratios(self) -> Tuple[float, ...]:
        """errors[k] / errors[k+1] for each successive pair of steps."""
        return tuple(a / b if b > 0 else float('inf') for a, b in zip(self.errors, self.errors[1:]))

    @property
    def first_order(self) -> bool:
        low, high = FIRST_ORDER_RATIO
        return all(low <= r <= high for r in self.ratios)


def trotter_error_scaling(
    p: ModelParams, t_final: float, dts: Sequence[float] = SCALING_DTS, metric: str = 'state'
) -> ErrorScaling:
    """
    Largest deviation from exact dynamics over [0, t_final] for each dt.

    Args:
        p: Model parameters
        t_final: Horizon
        dts: Decreasing step lengths
        metric: 'state' (phase-aligned distance) or 'concurrence' (|C_trotter - C_exact|)

    Returns:
        ErrorScaling
    """
    if metric not in ERROR_METRICS:
        raise ParameterError(f"metric must be one of {ERROR_METRICS}, got {metric!r}")
    errors = []
    for dt in dts:
        run = trotter_vs_exact(p, float(dt), t_final)
        errors.append(run.state_error if metric == 'state' else run.concurrence_error)
    scaling = ErrorScaling(dts=tuple(float(d) for d in dts), errors=tuple(errors), metric=metric)
    logger.info(f"Trotter {metric} errors {['%.3e' % e for e in errors]}, ratios "
                f"{['%.2f' % r for r in scaling.ratios]}")
    return scaling
