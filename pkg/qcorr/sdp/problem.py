from __future__ import annotations

import logging
from typing import List, Sequence

import numpy as np
import scipy.linalg

from qcorr.exceptions import DimensionError, NotHermitianError
from qcorr.linalg import as_matrix, is_hermitian
from qcorr.utils import IntEnumWithDescription, repr_format

logger = logging.getLogger(__name__)

__all__ = [
    "LMIBlock",
    "LMIProblem",
    "AffineReparameterization",
    "SolveStatus",
    "FeasibilityVerdict",
    "SDPSolution",
    "FeasibilityResult",
    "SolverOptions",
]


class LMIBlock:
    """
    One affine matrix inequality ``F0 + sum_k x_k F_k >= 0``.

    :param f0: Constant Hermitian term
    :param fk: One Hermitian matrix per problem variable, all the size of ``f0``
    :param name: Optional label used in logs and traces
    """
    def __init__(self, f0, fk: Sequence, name: str = ""):
        f0 = as_matrix(f0)
        if f0.shape[0] != f0.shape[1]:
            raise DimensionError(f"LMI block '{name}' is not square: {f0.shape}")
        if not is_hermitian(f0):
            raise NotHermitianError(f"LMI block '{name}' has a non-Hermitian constant term")
        mats = []
        for i, f in enumerate(fk):
            f = as_matrix(f)
            if f.shape != f0.shape:
                raise DimensionError(f"LMI block '{name}' coefficient {i} has shape {f.shape}, expected {f0.shape}")
            if not is_hermitian(f):
                raise NotHermitianError(f"LMI block '{name}' coefficient {i} is not Hermitian")
            mats.append(f)
        self.name = name
        self.f0 = f0
        self.fk = np.array(mats, dtype=complex).reshape(len(mats), *f0.shape)
        self.is_complex = bool(np.any(self.f0.imag != 0) or np.any(self.fk.imag != 0))

    @property
    def size(self) -> int:
        return self.f0.shape[0]

    @property
    def nvars(self) -> int:
        return self.fk.shape[0]

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.f0 + np.tensordot(x, self.fk, axes=1)

    def __repr__(self):
        return repr_format(self, name=self.name, size=self.size, nvars=self.nvars, is_complex=self.is_complex)


class LMIProblem:
    """
    Minimize ``objective . x`` subject to every block being positive semi-definite.
    Linear equalities are not part of this form; use :meth:`with_equalities` to eliminate them first
    """
    def __init__(self, objective, blocks: Sequence[LMIBlock], variable_names: Sequence[str] = None):
        objective = np.asarray(objective, dtype=float).ravel()
        if not np.all(np.isfinite(objective)):
            raise ValueError("LMI objective must be finite")
        if not blocks:
            raise DimensionError("LMI problem needs at least one block")
        for b in blocks:
            if b.nvars != objective.size:
                raise DimensionError(f"Block '{b.name}' has {b.nvars} coefficients, problem has {objective.size} variables")
        self.objective = objective
        self.blocks: List[LMIBlock] = list(blocks)
        self.variable_names = list(variable_names) if variable_names else [f"x{i}" for i in range(objective.size)]

    @property
    def nvars(self) -> int:
        return self.objective.size

    def objective_value(self, x) -> float:
        return float(self.objective @ np.asarray(x, dtype=float))

    def min_block_eig(self, x) -> float:
        return min(float(np.linalg.eigvalsh(b.evaluate(x))[0]) for b in self.blocks)

    @classmethod
    def with_equalities(cls, objective, blocks: Sequence[LMIBlock], a_eq, b_eq):
        """
        Eliminates ``a_eq . x = b_eq`` by writing ``x = x_p + N y`` with N a null-space basis.

        :return: tuple of the reduced problem over y and the reparameterization used to lift y back to x
        """
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.asarray(b_eq, dtype=float).ravel()
        x_p, *_ = np.linalg.lstsq(a_eq, b_eq, rcond=None)
        if np.max(np.abs(a_eq @ x_p - b_eq), initial=0.0) > 1e-9:
            raise DimensionError("Equality constraints are inconsistent")
        reparam = AffineReparameterization(x_p, scipy.linalg.null_space(a_eq))
        objective = np.asarray(objective, dtype=float)
        reduced = []
        for b in blocks:
            f0 = b.f0 + np.tensordot(x_p, b.fk, axes=1)
            fk = np.tensordot(reparam.basis.T, b.fk, axes=1)
            reduced.append(LMIBlock(f0, list(fk), b.name))
        problem = cls(reparam.basis.T @ objective, reduced)
        logger.debug(f"Eliminated {a_eq.shape[0]} equalities, {problem.nvars} of {objective.size} variables remain")
        return problem, reparam

    def __repr__(self):
        return repr_format(self, nvars=self.nvars, blocks=[b.name or b.size for b in self.blocks])


class AffineReparameterization:
    def __init__(self, offset, basis):
        self.offset = np.asarray(offset, dtype=float)
        self.basis = np.asarray(basis, dtype=float)

    def lift(self, y) -> np.ndarray:
        return self.offset + self.basis @ np.asarray(y, dtype=float)


class SolveStatus(IntEnumWithDescription):
    optimal = 0, "optimal"
    infeasible_certified = 1, "infeasible-certified"
    iteration_limit = 2, "iteration-limit"


class FeasibilityVerdict(IntEnumWithDescription):
    feasible = 0, "feasible"
    infeasible = 1, "infeasible"
    inconclusive = 2, "inconclusive"


class SDPSolution:
    """
    Result of :func:`qcorr.sdp.solve`

    :ivar status: the :class:`SolveStatus`
    :ivar x: the final iterate
    :ivar objective: objective value at ``x``
    :ivar min_block_eig: smallest eigenvalue over all blocks at ``x``
    :ivar iterations: number of barrier (outer) iterations, phase I included
    :ivar gap: duality-gap bound at exit
    """
    def __init__(self, status: SolveStatus, x, objective: float, min_block_eig: float, iterations: int,
                 gap: float = float("nan")):
        self.status = status
        self.x = np.asarray(x, dtype=float)
        self.objective = float(objective)
        self.min_block_eig = float(min_block_eig)
        self.iterations = int(iterations)
        self.gap = float(gap)

    @property
    def is_optimal(self) -> bool:
        return self.status == SolveStatus.optimal

    def to_dict(self):
        return {
            "status": self.status.description,
            "x": self.x.tolist(),
            "objective": self.objective,
            "min_block_eig": self.min_block_eig,
            "iterations": self.iterations,
            "gap": self.gap,
        }

    @classmethod
    def from_dict(cls, data) -> SDPSolution:
        return cls(SolveStatus.from_description(data["status"]), data["x"], data["objective"],
                   data["min_block_eig"], data["iterations"], data.get("gap", float("nan")))

    def __repr__(self):
        return repr_format(self, status=self.status.description, objective=self.objective,
                           min_block_eig=self.min_block_eig, iterations=self.iterations)


class FeasibilityResult:
    """
    Outcome of the t-augmented feasibility problem.
    Unpacks as ``(feasible, t_star)`` so callers can write ``feasible, t = feasibility(p)``
    """
    def __init__(self, verdict: FeasibilityVerdict, t_star: float, x, iterations: int):
        self.verdict = verdict
        self.t_star = float(t_star)
        self.x = np.asarray(x, dtype=float)
        self.iterations = int(iterations)

    @property
    def feasible(self) -> bool:
        return self.verdict == FeasibilityVerdict.feasible

    @property
    def infeasible(self) -> bool:
        return self.verdict == FeasibilityVerdict.infeasible

    def __iter__(self):
        return iter((self.feasible, self.t_star))

    def to_dict(self):
        return {"verdict": self.verdict.description, "t_star": self.t_star, "iterations": self.iterations}

    def __repr__(self):
        return repr_format(self, verdict=self.verdict.description, t_star=self.t_star)


class SolverOptions:
    """
    Tolerances and limits for the barrier solver

    :param max_iter: Outer (barrier parameter) iterations before giving up
    :param max_newton: Newton steps per centering
    :param mu: Reduction factor of the barrier weight 1/tau per outer iteration
    :param gap_tol: Stop when the duality-gap bound drops below this
    :param newton_tol: Centering stops when half the squared Newton decrement drops below this
    :param feasible_tol: t* at or below this means feasible
    :param infeasible_tol: t* above this means infeasible; values in between are inconclusive
    :param t_floor: Lower bound on t in the feasibility problem, keeps it bounded
    :param tau0: Initial barrier weight on the objective
    """
    def __init__(self, max_iter: int = 200, max_newton: int = 60, mu: float = 0.2, gap_tol: float = 1e-9,
                 newton_tol: float = 1e-10, feasible_tol: float = 1e-6, infeasible_tol: float = 1e-4,
                 t_floor: float = 1e3, tau0: float = 1.0):
        if not 0 < mu < 1:
            raise ValueError("mu must be in (0, 1)")
        self.max_iter = max_iter
        self.max_newton = max_newton
        self.mu = mu
        self.gap_tol = gap_tol
        self.newton_tol = newton_tol
        self.feasible_tol = feasible_tol
        self.infeasible_tol = infeasible_tol
        self.t_floor = t_floor
        self.tau0 = tau0

    def verdict(self, t_star: float) -> FeasibilityVerdict:
        if t_star <= self.feasible_tol:
            return FeasibilityVerdict.feasible
        if t_star > self.infeasible_tol:
            return FeasibilityVerdict.infeasible
        return FeasibilityVerdict.inconclusive

    def __repr__(self):
        return repr_format(self, **vars(self))

