"""Seeded on-site disorder ensembles of the single-excitation model.

Every realization owns a child of one numpy SeedSequence. The child is
reduced to a 64-bit integer that seeds a PCG64 generator, so any row of an
ensemble table can be replayed alone with ``numpy.random.default_rng(seed)``.
The generator first draws W (scatter ensembles only) and then the L cavity
detunings, uniform on [-W, W].
"""

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import spearmanr

from ..core.errors import ParameterError
from ..dynamics.propagator import evolve_unitary, excitation_state
from ..entanglement.concurrence import ConcurrenceTrace, concurrence_trace
from ..entanglement.localization import ipr, return_probabilities
from ..model.hamiltonian import build_single_excitation_h
from ..model.params import ModelParams
from ..utils.logger import get_subsystem_logger
from ..utils.parallel import ordered_map

logger = get_subsystem_logger('disorder')

DEFAULT_REALIZATIONS = 200
DEFAULT_T_FINAL = 200.0
DEFAULT_DT = 0.5
IPR_EDGES = np.linspace(-2.5, 2.5, 26)
CSV_COLUMNS = ('realization_id', 'seed', 'W', 'C_m', 'Jt_m', 'ipr_mean')
REPLAY_DELTA_C = (-0.71, 0.86, 0.19, 0.42, 0.50, -0.24, 0.19, -0.45, 0.18, -1.00)


def default_times(t_final: float = DEFAULT_T_FINAL, dt: float = DEFAULT_DT) -> np.ndarray:
    return np.arange(0.0, t_final + dt / 2, dt)


@dataclass(frozen=True)
class DisorderSpec:
    """Box disorder of half-width W on the cavity on-site energies."""

    W: float
    n_realizations: int = DEFAULT_REALIZATIONS
    seed: int = 0

    def __post_init__(self):
        if self.W < 0:
            raise ParameterError(f"W must be >= 0, got {self.W}")
        if self.n_realizations < 1:
            raise ParameterError(f"n_realizations must be positive, got {self.n_realizations}")
        if self.seed < 0:
            raise ParameterError(f"seed must be nonnegative, got {self.seed}")

    def realization_seeds(self) -> List[int]:
        """One 64-bit seed per realization, spawned from the ensemble seed."""
        children = np.random.SeedSequence(self.seed).spawn(self.n_realizations)
        return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


@dataclass(frozen=True)
class Realization:
    """Diagnostics of one disorder draw."""

    realization_id: int
    seed: int
    W: float
    delta_c: Tuple[float, ...]
    c_max: float
    t_max: float
    ipr_mean: float
    energies: np.ndarray
    iprs: np.ndarray

    def row(self) -> Dict[str, float]:
        return {
            'realization_id': self.realization_id, 'seed': self.seed, 'W': self.W,
            'C_m': self.c_max, 'Jt_m': self.t_max, 'ipr_mean': self.ipr_mean,
        }


@dataclass(frozen=True)
class IPRHistogram:
    """Pooled (energy, IPR) points binned by energy."""

    edges: np.ndarray
    counts: np.ndarray
    mean_ipr: np.ndarray
    energies: np.ndarray
    iprs: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def rows(self) -> List[Tuple[float, float, int, float]]:
        """(bin_low, bin_high, count, mean IPR) with NaN for empty bins."""
        return [
            (float(lo), float(hi), int(n), float(m))
            for lo, hi, n, m in zip(self.edges[:-1], self.edges[1:], self.counts, self.mean_ipr)
        ]


def _histogram(energies: np.ndarray, iprs: np.ndarray, edges: np.ndarray) -> IPRHistogram:
    counts, _ = np.histogram(energies, bins=edges)
    sums, _ = np.histogram(energies, bins=edges, weights=iprs)
    with np.errstate(invalid='ignore', divide='ignore'):
        mean = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return IPRHistogram(edges=np.asarray(edges, dtype=float), counts=counts, mean_ipr=mean,
                        energies=energies, iprs=iprs)


@dataclass(frozen=True)
class EnsembleResult:
    """Per-realization diagnostics plus the ensemble-averaged concurrence."""

    times: np.ndarray
    realizations: Tuple[Realization, ...]
    traces: np.ndarray
    mean_trace: ConcurrenceTrace

    def __len__(self) -> int:
        return len(self.realizations)

    @property
    def mean_c_max(self) -> float:
        """Maximum over time of the averaged concurrence."""
        return self.mean_trace.c_max

    @property
    def c_max(self) -> np.ndarray:
        return np.array([r.c_max for r in self.realizations])

    @property
    def ipr_means(self) -> np.ndarray:
        return np.array([r.ipr_mean for r in self.realizations])

    def ipr_histogram(self, edges: Sequence[float] = IPR_EDGES) -> IPRHistogram:
        energies = np.concatenate([r.energies for r in self.realizations])
        iprs = np.concatenate([r.iprs for r in self.realizations])
        return _histogram(energies, iprs, np.asarray(edges, dtype=float))

    def rows(self) -> List[Dict[str, float]]:
        return [r.row() for r in self.realizations]


def _check_base(base: ModelParams) -> None:
    if base.is_driven:
        raise ParameterError("Disorder ensembles run in the single-excitation sector; set omega=0")
    if base.N != 2:
        raise ParameterError(f"Disorder ensembles need two atoms, got N={base.N}")


def _draw(seed: int, L: int, w_low: float, w_high: float) -> Tuple[float, np.ndarray]:
    rng = np.random.default_rng(seed)
    W = w_low if w_high == w_low else float(rng.uniform(w_low, w_high))
    return W, rng.uniform(-W, W, size=L)


def _run_realization(job: Tuple[ModelParams, int, int, float, float, np.ndarray]) -> Tuple[Realization, np.ndarray]:
    base, realization_id, seed, w_low, w_high, times = job
    W, delta_c = _draw(seed, base.L, w_low, w_high)
    p = base.replace(delta_c=tuple(delta_c.tolist()))
    H = build_single_excitation_h(p)
    trace = concurrence_trace(evolve_unitary(H, excitation_state(p.ordering, 0), times), p.ordering, times)
    spectrum = ipr(H)
    realization = Realization(
        realization_id=realization_id, seed=seed, W=W, delta_c=p.delta_c,
        c_max=trace.c_max, t_max=trace.t_max, ipr_mean=spectrum.mean,
        energies=spectrum.energies, iprs=spectrum.iprs,
    )
    return realization, trace.c


def _run_jobs(
    base: ModelParams, seeds: Sequence[int], w_low: float, w_high: float, times: np.ndarray, n_jobs: int
) -> EnsembleResult:
    jobs = [(base, i, seed, w_low, w_high, times) for i, seed in enumerate(seeds)]
    results = ordered_map(_run_realization, jobs, n_jobs)
    realizations = tuple(r for r, _ in results)
    traces = np.array([c for _, c in results])
    mean_trace = ConcurrenceTrace.from_values(times, traces.mean(axis=0))
    return EnsembleResult(times=times, realizations=realizations, traces=traces, mean_trace=mean_trace)


def run_ensemble(
    base: ModelParams, spec: DisorderSpec, times: Optional[Sequence[float]] = None, jobs: int = 1
) -> EnsembleResult:
    """
    Evolve n_realizations disorder draws from atom n1 excited.

    Args:
        base: Undriven two-atom model; its delta_c is replaced by each draw
        spec: Disorder width, ensemble size and seed
        times: Time grid (default Jt in [0, 200] at Jdt = 0.5)
        jobs: Worker processes (1 runs in-process)

    Returns:
        EnsembleResult; identical for identical (base, spec, times) whatever jobs is
    """
    _check_base(base)
    grid = default_times() if times is None else np.asarray(times, dtype=float)
    logger.info(f"Running {spec.n_realizations} realizations at W={spec.W} (seed={spec.seed}, jobs={jobs})")
    result = _run_jobs(base, spec.realization_seeds(), spec.W, spec.W, grid, jobs)
    logger.info(f"W={spec.W}: max of mean concurrence {result.mean_c_max:.4f}")
    return result


def _ipr_job(job: Tuple[ModelParams, int, float]) -> Tuple[np.ndarray, np.ndarray]:
    base, seed, W = job
    _, delta_c = _draw(seed, base.L, W, W)
    spectrum = ipr(build_single_excitation_h(base.replace(delta_c=tuple(delta_c.tolist()))))
    return spectrum.energies, spectrum.iprs


def ipr_energy_histogram(
    spec: DisorderSpec, base: ModelParams, edges: Sequence[float] = IPR_EDGES, jobs: int = 1
) -> IPRHistogram:
    """
    Pool eigenstate (energy, IPR) points over realizations and bin them by energy.

    Uses the same per-realization draws as run_ensemble for the same spec,
    without any time evolution.
    """
    _check_base(base)
    results = ordered_map(_ipr_job, [(base, seed, spec.W) for seed in spec.realization_seeds()], jobs)
    energies = np.concatenate([e for e, _ in results])
    iprs = np.concatenate([i for _, i in results])
    return _histogram(energies, iprs, np.asarray(edges, dtype=float))


@dataclass(frozen=True)
class ScatterResult:
    ensemble: EnsembleResult
    spearman_rho: float
    p_value: float


def scatter_ensemble(
    base: ModelParams,
    n: int,
    w_range: Tuple[float, float] = (0.0, 2.0),
    seed: int = 0,
    times: Optional[Sequence[float]] = None,
    jobs: int = 1,
) -> ScatterResult:
    """
    C_m versus mean IPR with W drawn uniformly per realization.

    Returns:
        ScatterResult with the Spearman rank correlation of (C_m, mean IPR)
    """
    _check_base(base)
    w_low, w_high = (float(w) for w in w_range)
    if w_low < 0 or w_high < w_low:
        raise ParameterError(f"w_range must satisfy 0 <= low <= high, got {w_range}")
    seeds = DisorderSpec(W=w_high, n_realizations=n, seed=seed).realization_seeds()
    grid = default_times() if times is None else np.asarray(times, dtype=float)
    logger.info(f"Running {n} scatter realizations with W in [{w_low}, {w_high}]")
    ensemble = _run_jobs(base, seeds, w_low, w_high, grid, jobs)
    rho, p_value = spearmanr(ensemble.c_max, ensemble.ipr_means)
    logger.info(f"Spearman(C_m, mean IPR) = {rho:.3f} (p={p_value:.2g})")
    return ScatterResult(ensemble=ensemble, spearman_rho=float(rho), p_value=float(p_value))


@dataclass(frozen=True)
class RealizationReplay:
    """Concurrence, atom return probabilities and mean IPR of one explicit draw."""

    trace: ConcurrenceTrace
    r1: np.ndarray
    r2: np.ndarray
    ipr_mean: float


def replay_realization(
    delta_c: Sequence[float], base: ModelParams, times: Optional[Sequence[float]] = None
) -> RealizationReplay:
    """
    Rerun one disorder realization from its cavity detunings.

    Raises:
        ParameterError: delta_c length differs from L
    """
    if len(delta_c) != base.L:
        raise ParameterError(f"delta_c has length {len(delta_c)}, expected L={base.L}")
    _check_base(base)
    grid = default_times() if times is None else np.asarray(times, dtype=float)
    p = base.replace(delta_c=tuple(float(d) for d in delta_c))
    H = build_single_excitation_h(p)
    states = evolve_unitary(H, excitation_state(p.ordering, 0), grid)
    r1, r2 = return_probabilities(states, p.ordering)
    return RealizationReplay(
        trace=concurrence_trace(states, p.ordering, grid), r1=r1, r2=r2, ipr_mean=ipr(H).mean,
    )


def write_ensemble_csv(result: EnsembleResult, path: Path) -> Path:
    """realization_id, seed, W, C_m, Jt_m, ipr_mean per realization."""
    path = Path(path)
    with path.open('w', newline='', encoding='utf-8') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(result.rows())
    return path


def write_delta_sidecar(result: EnsembleResult, path: Path) -> Path:
    """Per-realization cavity detunings keyed by realization id."""
    path = Path(path)
    payload = {
        str(r.realization_id): {'seed': r.seed, 'W': r.W, 'delta_c': list(r.delta_c)}
        for r in result.realizations
    }
    path.write_text(json.dumps(payload, indent=2), encoding='utf-8')
    return path
