"""Powell's conjugate-direction minimizer with Brent line searches.

The loop follows the classic modified Powell scheme: line-minimize along each
direction of the set, then try the extrapolated direction x_k - x_{k-1} and
swap it in for the direction of largest decrease when the usual test allows.
Each line search is ``scipy.optimize.minimize_scalar(method='brent')``; a step
is only taken when it strictly lowers the function, so the best value never
gets worse.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..core.errors import ParameterError
from ..utils.logger import get_optimizer_logger

logger = get_optimizer_logger()


class _BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class PowellResult:
    """
    Outcome of one Powell run.

    Attributes:
        x: Best point found
        fun: Function value at x
        n_evals: Function evaluations spent
        n_iterations: Completed sweeps over the direction set
        history: Best-so-far value after every evaluation (non-increasing)
        converged: The ftol test ended the run
        budget_exhausted: The evaluation budget ended the run
    """

    x: np.ndarray
    fun: float
    n_evals: int
    n_iterations: int
    history: Tuple[float, ...]
    converged: bool
    budget_exhausted: bool


class _Tracker:
    """Counts evaluations, enforces the budget and remembers the best point."""

    def __init__(self, func: Callable[[np.ndarray], float], max_evals: int):
        self.func = func
        self.max_evals = max_evals
        self.n_evals = 0
        self.best_x: Optional[np.ndarray] = None
        self.best_f = math.inf
        self.history: List[float] = []

    def __call__(self, x: np.ndarray) -> float:
        if self.n_evals >= self.max_evals:
            raise _BudgetExhausted()
        self.n_evals += 1
        value = float(self.func(x))
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float)
        self.history.append(self.best_f)
        return value


class PowellSolver:
    """Derivative-free minimizer over an unconstrained real vector."""

    def __init__(
        self,
        max_evals: int = 1000,
        xtol: float = 1e-4,
        ftol: float = 1e-6,
        max_iterations: Optional[int] = None,
    ):
        """
        Initialize the solver.

        Args:
            max_evals: Evaluation budget
            xtol: Line-search tolerance on the step length
            ftol: Relative decrease per sweep below which the run stops
            max_iterations: Optional cap on direction-set sweeps
        """
        if max_evals < 1:
            raise ParameterError(f"max_evals must be positive, got {max_evals}")
        self.max_evals = max_evals
        self.xtol = xtol
        self.ftol = ftol
        self.max_iterations = max_iterations

    def _line_search(
        self, f: _Tracker, x: np.ndarray, fx: float, direction: np.ndarray
    ) -> Tuple[float, np.ndarray, np.ndarray]:
        if not np.any(direction):
            return fx, x, np.zeros_like(x)

        def along(alpha: float) -> float:
            return f(x + alpha * direction)

        try:
            res = minimize_scalar(along, bracket=(0.0, 1.0), method='brent', options={'xtol': self.xtol})
        except (RuntimeError, ValueError):
            # No valid bracket (flat or monotone along this direction): search one period.
            span = math.pi / float(np.max(np.abs(direction)))
            res = minimize_scalar(along, bounds=(-span, span), method='bounded',
                                  options={'xatol': self.xtol})
        if np.isfinite(res.fun) and res.fun < fx:
            step = float(res.x) * direction
            return float(res.fun), x + step, step
        return fx, x, np.zeros_like(x)

    def minimize(
        self,
        func: Callable[[np.ndarray], float],
        x0: np.ndarray,
        directions: Optional[np.ndarray] = None,
    ) -> PowellResult:
        """
        Minimize func from x0.

        Args:
            func: Scalar function of a 1-D array
            x0: Starting point
            directions: Initial direction set (default: identity)

        Returns:
            PowellResult; on budget exhaustion the best point so far with the flag set
        """
        x = np.asarray(x0, dtype=float).ravel().copy()
        n = x.size
        direc = np.eye(n) if directions is None else np.array(directions, dtype=float)
        f = _Tracker(func, self.max_evals)
        iterations = 0
        converged = False
        exhausted = False
        try:
            fval = f(x)
            x_prev = x.copy()
            while True:
                fx = fval
                biggest, delta = 0, 0.0
                for i in range(n):
                    before = fval
                    fval, x, _ = self._line_search(f, x, fval, direc[i])
                    if before - fval > delta:
                        biggest, delta = i, before - fval
                iterations += 1
                if 2.0 * (fx - fval) <= self.ftol * (abs(fx) + abs(fval)) + 1e-20:
                    converged = True
                    break
                if self.max_iterations is not None and iterations >= self.max_iterations:
                    break

                extrapolated = x - x_prev
                x_prev = x.copy()
                fx2 = f(x + extrapolated)
                if fx > fx2:
                    t = 2.0 * (fx + fx2 - 2.0 * fval) * (fx - fval - delta) ** 2 - delta * (fx - fx2) ** 2
                    if t < 0.0:
                        fval, x, step = self._line_search(f, x, fval, extrapolated)
                        if np.any(step):
                            direc[biggest] = direc[-1]
                            direc[-1] = step
        except _BudgetExhausted:
            exhausted = True
            logger.debug(f"Powell stopped on its budget of {self.max_evals} evaluations")

        return PowellResult(
            x=f.best_x if f.best_x is not None else x,
            fun=f.best_f,
            n_evals=f.n_evals,
            n_iterations=iterations,
            history=tuple(f.history),
            converged=converged,
            budget_exhausted=exhausted,
        )
