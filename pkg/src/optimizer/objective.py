"""Angle parameterizations and the C_m objective for engineered cavities.

On-site mode maps L + N angles to Delta = r cos(theta) over (c_1..c_L, n_1..n_N).
Hopping mode maps (L-1) + 2N angles to r cos^2(theta/2) over
(J_c1..J_c(L-1), g_1L, g_1R, g_2L, g_2R, ...). Both keep every mapped value
inside its bound for any real theta.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..core.errors import ParameterError
from ..dynamics.propagator import evolve_unitary, excitation_state
from ..entanglement.concurrence import ConcurrenceTrace, concurrence_trace
from ..model.hamiltonian import build_single_excitation_h
from ..model.params import ModelParams

MODES = ('onsite', 'hopping')
OBJECTIVE_DT = 0.05


@dataclass(frozen=True)
class ObjectiveSpec:
    """
    What to engineer and how hard.

    Attributes:
        mode: 'onsite' or 'hopping'
        r: Bound r_Delta (|Delta| <= r) or r_J (0 <= J, g <= r)
        t_f: Stopping time; C_m is taken over [0, t_f]
    """

    mode: str
    r: float
    t_f: float

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.r < 0:
            raise ParameterError(f"r must be >= 0, got {self.r}")
        if self.t_f <= 0:
            raise ParameterError(f"t_f must be positive, got {self.t_f}")


def n_angles(mode: str, base: ModelParams) -> int:
    if mode == 'onsite':
        return base.L + base.N
    if mode == 'hopping':
        return base.L - 1 + 2 * base.N
    raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")


def _check_angles(mode: str, base: ModelParams, theta: Sequence[float]) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    expected = n_angles(mode, base)
    if theta.shape != (expected,):
        raise ParameterError(f"{mode} mode needs {expected} angles, got shape {theta.shape}")
    return theta


def map_angles(mode: str, r: float, base: ModelParams, theta: Sequence[float]) -> ModelParams:
    """
    Model parameters for a decision vector.

    Args:
        mode: 'onsite' or 'hopping'
        r: Bound
        base: Model whose remaining fields are kept
        theta: Angles in the mode's layout

    Returns:
        ModelParams with the engineered fields replaced
    """
    theta = _check_angles(mode, base, theta)
    if mode == 'onsite':
        values = r * np.cos(theta)
        return base.replace(delta_c=tuple(values[:base.L]), delta_n=tuple(values[base.L:]))
    values = r * np.cos(theta / 2.0) ** 2
    hops = values[:base.L - 1]
    couplings = values[base.L - 1:].reshape(base.N, 2)
    return base.replace(J_c=tuple(hops), g_left=tuple(couplings[:, 0]), g_right=tuple(couplings[:, 1]))


def engineered_values(mode: str, params: ModelParams) -> np.ndarray:
    """The engineered fields of params in the mode's angle layout."""
    if mode == 'onsite':
        return np.array(params.delta_c + params.delta_n, dtype=float)
    if mode == 'hopping':
        pairs = [v for pair in zip(params.g_left, params.g_right) for v in pair]
        return np.array(params.J_c + tuple(pairs), dtype=float)
    raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")


def angles_for_params(mode: str, r: float, params: ModelParams) -> np.ndarray:
    """
    Inverse of map_angles, clipping values that lie outside the bound.

    Raises:
        ParameterError: r <= 0
    """
    if r <= 0:
        raise ParameterError(f"Angles are undetermined for r={r}")
    ratio = engineered_values(mode, params) / r
    if mode == 'onsite':
        return np.arccos(np.clip(ratio, -1.0, 1.0))
    return 2.0 * np.arccos(np.sqrt(np.clip(ratio, 0.0, 1.0)))


def objective_times(t_f: float, dt: float = OBJECTIVE_DT) -> np.ndarray:
    """Uniform grid on [0, t_f] with spacing at most dt, both ends included."""
    if t_f <= 0:
        raise ParameterError(f"t_f must be positive, got {t_f}")
    return np.linspace(0.0, t_f, int(math.ceil(t_f / dt)) + 1)


def evaluate(p: ModelParams, t_f: float, dt: float = OBJECTIVE_DT) -> ConcurrenceTrace:
    """Unitary single-excitation concurrence over [0, t_f] from atom n1 excited."""
    times = objective_times(t_f, dt)
    states = evolve_unitary(build_single_excitation_h(p), excitation_state(p.ordering, 0), times)
    return concurrence_trace(states, p.ordering, times)


def objective(spec: ObjectiveSpec, base: ModelParams, theta: Sequence[float]) -> float:
    """C_m over [0, t_f] for the mapped parameters."""
    return evaluate(map_angles(spec.mode, spec.r, base, theta), spec.t_f).c_max


class Objective:
    """Negated C_m for a minimizer, with an evaluation counter."""

    def __init__(self, spec: ObjectiveSpec, base: ModelParams):
        if base.is_driven:
            raise ParameterError("The objective evolves the single-excitation sector; set omega=0")
        self.spec = spec
        self.base = base
        self.n_evals = 0

    def __call__(self, theta: np.ndarray) -> float:
        self.n_evals += 1
        return -objective(self.spec, self.base, theta)
