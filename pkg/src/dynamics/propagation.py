"""Spatial spreading of a single excitation emitted by one atom."""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import ParameterError
from ..model.hamiltonian import build_single_excitation_h
from ..model.params import ModelParams
from ..utils.logger import get_dynamics_logger
from .propagator import evolve_unitary, site_excitation


@dataclass(frozen=True)
class PropagationResult:
    """Site occupations over time and the cavity weight on each side of the emitter.

    occupations[k, j] is the population of site k (ordering index) at times[j].
    """

    times: np.ndarray
    labels: Tuple[str, ...]
    occupations: np.ndarray
    left_weight: np.ndarray
    right_weight: np.ndarray

    def directionality(self, index: int = -1) -> float:
        """right / left cavity weight at one time index (inf when left is zero)."""
        left = float(self.left_weight[index])
        right = float(self.right_weight[index])
        return float('inf') if left == 0.0 else right / left


def propagate_excitation(p: ModelParams, site0: int, times: Sequence[float]) -> PropagationResult:
    """
    Evolve one excitation placed on site0 and record every site's occupation.

    Args:
        p: Model parameters (driving ignored)
        site0: Ordering index of the initially excited site, normally an atom
        times: Sorted, nonnegative times

    Returns:
        PropagationResult; left/right weights sum cavity occupations before and
        after site0 in the ordering
    """
    n = p.n_total
    if site0 < 0 or site0 >= n:
        raise ParameterError(f"site0={site0} outside [0, {n})")
    states = evolve_unitary(build_single_excitation_h(p), site_excitation(n, site0), times)
    occupations = (np.abs(states) ** 2).T

    cavity = np.array(p.ordering.cavity_index)
    left = cavity[cavity < site0]
    right = cavity[cavity > site0]
    result = PropagationResult(
        times=np.asarray(times, dtype=float),
        labels=p.ordering.labels,
        occupations=occupations,
        left_weight=occupations[left].sum(axis=0),
        right_weight=occupations[right].sum(axis=0),
    )
    get_dynamics_logger().debug(
        f"Propagation from {p.ordering.labels[site0]}: final left={result.left_weight[-1]:.4f}, "
        f"right={result.right_weight[-1]:.4f}"
    )
    return result
