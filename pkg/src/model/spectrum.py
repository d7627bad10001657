"""Cavity-only diagonalization and momentum-space chirality diagnostics."""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .params import ModelParams

UNIFORM_TOL = 1e-15


@dataclass(frozen=True)
class CavitySpectrum:
    """Magnon energies and real mode coefficients of the bare cavity.

    modes[k - 1, i - 1] is the weight of cavity spin i in mode k.
    """

    energies: np.ndarray
    modes: np.ndarray
    analytic: bool


@dataclass(frozen=True)
class MomentumCoupling:
    """Atom coupling to periodic-chain plane waves, K in [-pi, pi)."""

    K: np.ndarray
    g_K: np.ndarray
    asymmetry: float

    def pairs(self) -> List[Tuple[float, float]]:
        return list(zip(self.K.tolist(), self.g_K.tolist()))


def _is_uniform(values) -> bool:
    arr = np.asarray(values, dtype=float)
    return arr.size == 0 or float(np.ptp(arr)) <= UNIFORM_TOL


def analytic_spectrum(L: int, delta: float = 0.0, J: float = 1.0) -> CavitySpectrum:
    """eps_k = delta + 2J cos(pi k/(L+1)) with sine modes, k = 1..L."""
    k = np.arange(1, L + 1)
    i = np.arange(1, L + 1)
    energies = delta + 2.0 * J * np.cos(np.pi * k / (L + 1))
    modes = math.sqrt(2.0 / (L + 1)) * np.sin(np.pi * np.outer(k, i) / (L + 1))
    return CavitySpectrum(energies=energies, modes=modes, analytic=True)


def cavity_spectrum(p: ModelParams) -> CavitySpectrum:
    """
    Diagonalize the bare cavity H_c.

    Uniform on-site energies and hoppings use the closed form; anything else
    falls back to a tridiagonal eigendecomposition, ordered by decreasing
    energy so that index k matches the closed-form labelling for J > 0.

    Args:
        p: Model parameters (only the cavity part is used)

    Returns:
        CavitySpectrum
    """
    if _is_uniform(p.delta_c) and _is_uniform(p.J_c):
        J = p.J_c[0] if p.J_c else 0.0
        return analytic_spectrum(p.L, p.delta_c[0], J)
    return numerical_spectrum(p)


def numerical_spectrum(p: ModelParams) -> CavitySpectrum:
    """Tridiagonal eigendecomposition regardless of uniformity."""
    energies, vectors = eigh_tridiagonal(np.asarray(p.delta_c), np.asarray(p.J_c))
    order = np.argsort(energies)[::-1]
    return CavitySpectrum(energies=energies[order], modes=vectors[:, order].T, analytic=False)


def parity_gap(L: int, J: float = 1.0) -> float:
    """Smallest |eps_k| at delta = 0; zero for odd L."""
    if L % 2:
        return 0.0
    return 2.0 * J * math.cos(math.pi * L / (2 * (L + 1)))


def momentum_coupling(g: float, phi: float, L: int) -> MomentumCoupling:
    """
    g_K = (2g/sqrt(L)) cos(K/2 + phi) on the periodic momentum grid.

    Args:
        g: Coupling amplitude
        phi: Hopping phase
        L: Number of momenta (lattice constant 1)

    Returns:
        MomentumCoupling with A = sum_{K>0}|g_K|^2 - sum_{K<0}|g_K|^2
    """
    j = np.arange(-(L // 2), L - L // 2)
    K = 2.0 * np.pi * j / L
    g_K = (2.0 * g / math.sqrt(L)) * np.cos(K / 2.0 + phi)
    weights = np.abs(g_K) ** 2
    asymmetry = float(weights[K > 0].sum() - weights[K < 0].sum())
    return MomentumCoupling(K=K, g_K=g_K, asymmetry=asymmetry)
