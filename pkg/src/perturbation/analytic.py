"""Closed-form concurrence, optimal times and driving-dip predictions."""

import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..core.errors import CaseError, ParameterError, UnsupportedCaseError
from ..entanglement.concurrence import PEAK_TOL, ConcurrenceTrace

CASE_NUMBERS = {'even-even': 1, 'odd-odd': 2, 'even-odd': 3, 'odd-even': 4}
ODD_CAVITY = 'odd-cavity'
CASE_TAGS = tuple(CASE_NUMBERS) + (ODD_CAVITY,)
DIP_DISTINCT_TOL = 1e-12


def _check_tag(case_tag: str) -> int:
    if case_tag == ODD_CAVITY:
        raise UnsupportedCaseError(
            "No closed-form concurrence for odd cavities; evolve the three-level effective model instead"
        )
    if case_tag not in CASE_NUMBERS:
        raise CaseError(f"Unknown case tag: {case_tag!r} (expected one of {', '.join(CASE_TAGS)})")
    return CASE_NUMBERS[case_tag]


def analytic_concurrence(
    case_tag: str, g: float, J: float, phi: float, times: Sequence[float], peak_tol: float = PEAK_TOL
) -> ConcurrenceTrace:
    """
    Concurrence of the two-level effective model in closed form.

    Cases 1 and 2 (equal position parities): C = |sin(2 g^2 t / J)|.
    Cases 3 and 4: C = 2 sqrt(alpha (1 - alpha)) with
    alpha = sin^2(g^2 sqrt(1 + cos^2 2phi) t / J) / (1 + cos^2 2phi).

    Args:
        case_tag: One of 'even-even', 'odd-odd', 'even-odd', 'odd-even'
        g: Coupling amplitude
        J: Cavity hopping
        phi: Hopping phase
        times: Time grid
        peak_tol: Peak tolerance for the returned trace

    Returns:
        ConcurrenceTrace

    Raises:
        UnsupportedCaseError: odd-cavity tag
        CaseError: unknown tag
    """
    case = _check_tag(case_tag)
    if J == 0:
        raise ParameterError("J must be nonzero")
    t = np.asarray(times, dtype=float)
    rate = g * g / J
    if case in (1, 2):
        c = np.abs(np.sin(2.0 * rate * t))
    else:
        c2 = math.cos(2.0 * phi) ** 2
        alpha = np.sin(rate * math.sqrt(1.0 + c2) * t) ** 2 / (1.0 + c2)
        c = 2.0 * np.sqrt(np.clip(alpha * (1.0 - alpha), 0.0, None))
    return ConcurrenceTrace.from_values(t, c, peak_tol)


def optimal_time(g: float, J: float, phi: float, k: int = 0, branch: str = '-') -> float:
    """
    T_C = J ((2k+1) pi -/+ arccos(cos^2 2phi)) / (2 g^2 sqrt(1 + cos^2 2phi)).

    branch '-' with k = 0 is the first maximum for cases 3 and 4.
    """
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    if branch not in ('-', '+'):
        raise ParameterError(f"branch must be '-' or '+', got {branch!r}")
    if g == 0:
        return math.inf
    c2 = math.cos(2.0 * phi) ** 2
    shift = math.acos(min(1.0, c2))
    angle = (2 * k + 1) * math.pi + (-shift if branch == '-' else shift)
    return J * angle / (2.0 * g * g * math.sqrt(1.0 + c2))


def analytic_period(case_tag: str, g: float, J: float, phi: float) -> float:
    """Period of the closed-form concurrence (case 1 period for odd cavities)."""
    rate = g * g / abs(J)
    if case_tag == ODD_CAVITY or CASE_NUMBERS.get(case_tag) in (1, 2):
        return math.pi / (2.0 * rate)
    _check_tag(case_tag)
    return math.pi / (rate * math.sqrt(1.0 + math.cos(2.0 * phi) ** 2))


@dataclass(frozen=True)
class DipPrediction:
    """Driving strength at which a cavity mode becomes resonant with the dressed atom."""

    k: int
    omega_k: float


def dip_strengths(L: int, J: float = 1.0, delta: float = 0.0) -> List[DipPrediction]:
    """
    Omega_k = sqrt(J c_k (delta + J c_k)) with c_k = cos(pi k / (L + 1)).

    Negative radicands are dropped. Only distinct values below 2|J| are kept
    (the smallest k wins ties); J = 0 yields a single dip at zero.

    Args:
        L: Cavity length
        J: Cavity hopping
        delta: On-site energy

    Returns:
        DipPrediction list sorted by omega_k
    """
    if L < 2:
        raise ParameterError(f"L must be >= 2, got {L}")
    if J == 0:
        return [DipPrediction(k=1, omega_k=0.0)]
    dips: List[DipPrediction] = []
    for k in range(1, L + 1):
        c_k = math.cos(math.pi * k / (L + 1))
        radicand = J * c_k * (delta + J * c_k)
        if radicand < -DIP_DISTINCT_TOL:
            continue
        omega = math.sqrt(max(radicand, 0.0))
        if omega >= 2.0 * abs(J):
            continue
        if any(abs(omega - d.omega_k) <= DIP_DISTINCT_TOL for d in dips):
            continue
        dips.append(DipPrediction(k=k, omega_k=omega))
    return sorted(dips, key=lambda d: d.omega_k)
