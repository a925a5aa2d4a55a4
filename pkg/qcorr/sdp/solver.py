"""
Dense log-det barrier path-following solver for small LMI problems.

For a barrier weight ``tau`` the centering problem is::

    minimize  tau * c.x - sum_b log det F_b(x)

solved with damped Newton steps. ``tau`` grows by ``1/mu`` per outer iteration until the duality-gap bound
``m / tau`` (m = total block size) drops below ``gap_tol``. Complex Hermitian blocks are replaced by their
real symmetric embedding so every factorization is a real Cholesky.
"""
from __future__ import annotations

import logging
from typing import Callable, List, Optional, Sequence

import numpy as np
import scipy.linalg

from qcorr.event_type import Event, EventSource
from qcorr.exceptions import IterationLimitError, SolverError
from qcorr.linalg import real_symmetric_embedding
from qcorr.sdp.problem import (
    FeasibilityResult, LMIBlock, LMIProblem, SDPSolution, SolverOptions, SolveStatus
)
from qcorr.utils import Stopwatch, repr_format

logger = logging.getLogger(__name__)

_ARMIJO_ALPHA = 0.25
_BACKTRACK_BETA = 0.5
_MIN_STEP = 1e-14
_DIVERGENCE_NORM = 1e12


class IterationEventArgs:
    """
    Emitted once per outer iteration

    :ivar phase: "phase1" while searching for a strictly feasible point, "phase2" while optimizing
    """
    def __init__(self, phase: str, iteration: int, tau: float, objective: float, min_eig: float,
                 t: Optional[float] = None):
        self.phase = phase
        self.iteration = iteration
        self.tau = tau
        self.mu = 1.0 / tau
        self.objective = objective
        self.min_eig = min_eig
        self.t = t

    def to_dict(self):
        return {
            "phase": self.phase,
            "iteration": self.iteration,
            "mu": self.mu,
            "objective": self.objective,
            "min_eig": self.min_eig,
            "t": self.t,
        }

    def __repr__(self):
        return repr_format(self, **self.to_dict())


class _RealBlock:
    """A block in real symmetric form, the representation the Newton iteration works on"""
    def __init__(self, block: LMIBlock):
        if block.is_complex:
            self.f0 = real_symmetric_embedding(block.f0)
            self.fk = np.array([real_symmetric_embedding(f) for f in block.fk]).reshape(block.nvars, *self.f0.shape)
        else:
            self.f0 = block.f0.real.copy()
            self.fk = block.fk.real.copy()
        self.size = self.f0.shape[0]

    def evaluate(self, x) -> np.ndarray:
        return self.f0 + np.tensordot(x, self.fk, axes=1)


class _Barrier:
    def __init__(self, objective: np.ndarray, blocks: Sequence[_RealBlock]):
        self.objective = objective
        self.blocks = list(blocks)
        self.total_size = sum(b.size for b in self.blocks)

    def cholesky_factors(self, x) -> Optional[List[np.ndarray]]:
        """Lower Cholesky factor of every block, or None if any block is not positive definite"""
        factors = []
        for b in self.blocks:
            try:
                factors.append(np.linalg.cholesky(b.evaluate(x)))
            except np.linalg.LinAlgError:
                return None
        return factors

    def value(self, x, tau: float, factors=None) -> float:
        factors = factors if factors is not None else self.cholesky_factors(x)
        if factors is None:
            return np.inf
        log_det = sum(2.0 * np.sum(np.log(np.diag(lf))) for lf in factors)
        return tau * float(self.objective @ x) - log_det

    def newton_system(self, x, tau: float, factors):
        n = self.objective.size
        grad = tau * self.objective.copy()
        hess = np.zeros((n, n))
        for b, lf in zip(self.blocks, factors):
            m = b.size
            stacked = b.fk.transpose(1, 0, 2).reshape(m, n * m)
            half = scipy.linalg.solve_triangular(lf, stacked, lower=True)
            half = half.reshape(m, n, m).transpose(2, 1, 0).reshape(m, n * m)
            g = scipy.linalg.solve_triangular(lf, half, lower=True).reshape(m, n, m).transpose(1, 0, 2)
            g_flat = g.reshape(n, m * m)
            grad -= np.trace(g, axis1=1, axis2=2)
            hess += g_flat @ g_flat.T
        return grad, hess


def _newton_step(grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    try:
        return scipy.linalg.solve(hess, -grad, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError):
        logger.warning("Singular Newton system, falling back to least squares")
        return np.linalg.lstsq(hess, -grad, rcond=None)[0]


class BarrierSolver:
    """
    Interior-point solver for :class:`LMIProblem`. Instances hold no state between solves besides their
    options and event subscriptions, so separate instances may run concurrently

    :param options: Solver tolerances, defaults to :class:`SolverOptions()`
    """
    def __init__(self, options: SolverOptions = None):
        self.options = options or SolverOptions()
        self._on_iteration = EventSource("On Iteration", logger)

    @property
    def on_iteration(self) -> Event[BarrierSolver, IterationEventArgs]:
        """
        Event fired after every outer iteration with :class:`IterationEventArgs`
        """
        return self._on_iteration

    def solve(self, problem: LMIProblem, x0=None) -> SDPSolution:
        """
        Minimizes ``problem.objective . x`` over the LMI-feasible set

        :param problem: The problem
        :param x0: Optional strictly feasible starting point. Without one a phase I search is run first
        :return: the solution; its status is ``infeasible_certified`` if phase I proves no feasible point
                 exists and ``iteration_limit`` if ``max_iter`` outer iterations were not enough
        :raises SolverError: if the problem is feasible but has no strictly feasible point, or is unbounded
        """
        opts = self.options
        stopwatch = Stopwatch()
        with stopwatch:
            iterations = 0
            if x0 is None or problem.min_block_eig(x0) <= 0:
                if x0 is not None:
                    logger.debug("Supplied start point is not strictly feasible, running phase I")
                phase1 = self._phase1(problem, x0, stop_when_strict=True)
                iterations += phase1.iterations
                if phase1.t_star >= 0:
                    if phase1.t_star > opts.infeasible_tol:
                        logger.info(f"Problem infeasible, phase I t*={phase1.t_star:.3e}")
                        return SDPSolution(SolveStatus.infeasible_certified, phase1.x, problem.objective_value(phase1.x),
                                           problem.min_block_eig(phase1.x), iterations)
                    raise SolverError(f"No strictly feasible point found (phase I t*={phase1.t_star:.3e})")
                x0 = phase1.x
            blocks = [_RealBlock(b) for b in problem.blocks]
            barrier = _Barrier(problem.objective, blocks)
            x, n_outer, converged, tau = self._path_follow(barrier, np.asarray(x0, dtype=float), "phase2",
                                                           lambda x_: problem.objective_value(x_),
                                                           lambda x_: problem.min_block_eig(x_))
            iterations += n_outer
        gap = barrier.total_size / tau
        status = SolveStatus.optimal if converged else SolveStatus.iteration_limit
        solution = SDPSolution(status, x, problem.objective_value(x), problem.min_block_eig(x), iterations, gap)
        logger.debug(f"Solved {problem!r} in {stopwatch.elapsed:.3f}s: {solution!r}")
        return solution

    def feasibility(self, problem: LMIProblem, x0=None) -> FeasibilityResult:
        """
        Solves ``min t`` such that every block plus ``t * I`` is positive semi-definite.
        The objective of ``problem`` is ignored

        :return: result with t* and a verdict from the feasible/infeasible thresholds
        """
        result = self._phase1(problem, x0, stop_when_strict=False)
        logger.info(f"Feasibility verdict {result.verdict.description}, t*={result.t_star:.3e}")
        return result

    def _phase1(self, problem: LMIProblem, x0, stop_when_strict: bool) -> FeasibilityResult:
        opts = self.options
        n = problem.nvars
        x0 = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float)
        t0 = max(-problem.min_block_eig(x0), 0.0) + 1.0

        blocks = []
        for b in problem.blocks:
            rb = _RealBlock(b)
            shift = np.eye(rb.size)[np.newaxis]
            rb.fk = np.concatenate([rb.fk, shift], axis=0)
            blocks.append(rb)
        floor = _RealBlock(LMIBlock([[opts.t_floor]], [[[0.0]]] * n + [[[1.0]]], "t-floor"))
        blocks.append(floor)
        objective = np.zeros(n + 1)
        objective[-1] = 1.0
        barrier = _Barrier(objective, blocks)

        stop = (lambda z: z[-1] < 0) if stop_when_strict else None
        z, n_outer, converged, _ = self._path_follow(barrier, np.append(x0, t0), "phase1",
                                                     lambda z_: float(z_[-1]),
                                                     lambda z_: problem.min_block_eig(z_[:-1]),
                                                     stop=stop)
        if not converged and not (stop and stop(z)):
            raise IterationLimitError(f"Feasibility search hit the iteration limit after {n_outer} iterations")
        t_star = float(z[-1])
        return FeasibilityResult(opts.verdict(t_star), t_star, z[:-1], n_outer)

    def _path_follow(self, barrier: _Barrier, x: np.ndarray, phase: str, objective_fn: Callable,
                     min_eig_fn: Callable, stop: Callable = None):
        opts = self.options
        tau = opts.tau0
        for outer in range(1, opts.max_iter + 1):
            x = self._center(barrier, x, tau, stop)
            if self._on_iteration.has_handlers:
                t = float(x[-1]) if phase == "phase1" else None
                self._on_iteration.notify(self, IterationEventArgs(phase, outer, tau, objective_fn(x), min_eig_fn(x), t))
            if stop is not None and stop(x):
                return x, outer, True, tau
            if barrier.total_size / tau < opts.gap_tol:
                return x, outer, True, tau
            tau /= opts.mu
        logger.warning(f"{phase} reached the iteration limit ({opts.max_iter})")
        return x, opts.max_iter, False, tau

    def _center(self, barrier: _Barrier, x: np.ndarray, tau: float, stop: Callable = None) -> np.ndarray:
        opts = self.options
        factors = barrier.cholesky_factors(x)
        if factors is None:
            raise SolverError("Centering started from a point outside the interior")
        value = barrier.value(x, tau, factors)
        for _ in range(opts.max_newton):
            grad, hess = barrier.newton_system(x, tau, factors)
            dx = _newton_step(grad, hess)
            decrement = float(-grad @ dx)
            if decrement / 2 <= opts.newton_tol:
                break
            step = 1.0
            while step > _MIN_STEP:
                candidate = x + step * dx
                cand_factors = barrier.cholesky_factors(candidate)
                if cand_factors is not None:
                    cand_value = barrier.value(candidate, tau, cand_factors)
                    if cand_value <= value - _ARMIJO_ALPHA * step * decrement:
                        break
                step *= _BACKTRACK_BETA
            else:
                logger.debug(f"Line search stalled at tau={tau:.3e}")
                break
            x, factors, value = candidate, cand_factors, cand_value
            if np.linalg.norm(x) > _DIVERGENCE_NORM:
                raise SolverError("Iterates diverge, the problem looks unbounded")
            if stop is not None and stop(x):
                break
        return x


def solve(problem: LMIProblem, options: SolverOptions = None, x0=None) -> SDPSolution:
    """Convenience wrapper around :meth:`BarrierSolver.solve`"""
    return BarrierSolver(options).solve(problem, x0)


def feasibility(problem: LMIProblem, options: SolverOptions = None) -> FeasibilityResult:
    """Convenience wrapper around :meth:`BarrierSolver.feasibility`"""
    return BarrierSolver(options).feasibility(problem)


def require_optimal(solution: SDPSolution) -> SDPSolution:
    """
    Raises if the solution did not reach optimality

    :raises IterationLimitError: when the iteration limit was hit
    :raises SolverError: when the problem was certified infeasible
    """
    if solution.status == SolveStatus.iteration_limit:
        raise IterationLimitError(f"iteration limit after {solution.iterations} iterations", solution)
    if solution.status == SolveStatus.infeasible_certified:
        raise SolverError("problem certified infeasible")
    return solution
