"""
Decomposable entanglement witnesses built from measured local observables.

Given product observables ``O_k`` with measured values ``m_k`` the witness is
``W = I/d + sum_k c_k (O_k - Tr(O_k)/d I)``, which keeps Tr W = 1. The coefficients are chosen by the SDP::

    minimize   Tr(W rho) = 1/d + sum_k c_k (m_k - Tr(O_k)/d)
    subject to W = P + Q^{T_A},  P >= 0,  Q >= 0

Every decomposable W is non-negative on separable states, so a negative optimum certifies entanglement.
"""
from __future__ import annotations

import logging
from typing import List, Sequence, Union

import numpy as np
import scipy.linalg

from qcorr.circuits.observables import GELL_MANN, PAULI, ProductObservable
from qcorr.exceptions import DimensionError
from qcorr.linalg import (
    DensityMatrix, PureState, dagger, matrix_to_dict, partial_transpose_matrix, to_density
)
from qcorr.sdp import BarrierSolver, LMIBlock, LMIProblem, SolverOptions, require_optimal
from qcorr.states import haar_unitary, make_rng
from qcorr.utils import Stopwatch, repr_format

logger = logging.getLogger(__name__)

__all__ = [
    "DETECTION_TOL", "WitnessReport", "witness_sdp", "hermitian_basis", "correlation_operators",
    "random_local_observable", "random_measurement_protocol",
]

DETECTION_TOL = 1e-6
_RANK_TOL = 1e-10

_LOCAL_REFERENCE = {2: PAULI["Z"], 3: GELL_MANN["L3"]}


class WitnessReport:
    """
    Result of one witness optimization

    :ivar min_ctm: Optimal Tr(W rho), in the trace-one witness normalization
    :ivar coeffs: Coefficient per operator, 0 for operators linearly dependent on earlier ones
    :ivar witness: W
    :ivar p: The PSD part P
    :ivar q: The PSD part Q, entering as its partial transpose
    :ivar operators: Operators used, in order
    :ivar detected: min_ctm below the detection tolerance
    :ivar rounds: Measurement rounds used by the random protocol, or the operator count
    """
    def __init__(self, min_ctm: float, coeffs, witness, p, q, operators: Sequence[ProductObservable],
                 detected: bool, rounds: int, transpose_side: int = 0):
        self.min_ctm = float(min_ctm)
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.witness = witness
        self.p = p
        self.q = q
        self.operators = list(operators)
        self.detected = detected
        self.rounds = rounds
        self.transpose_side = transpose_side

    @property
    def dims(self):
        return self.operators[0].dims if self.operators else None

    def witness_value(self, rho: Union[DensityMatrix, PureState]) -> float:
        """Tr(W rho) for another state"""
        return to_density(rho).expectation(self.witness)

    def decomposition_residual(self) -> float:
        """max |W - P - Q^{T_A}|"""
        q_pt = partial_transpose_matrix(self.q, self.dims, self.transpose_side)
        return float(np.max(np.abs(self.witness - self.p - q_pt)))

    def to_dict(self):
        return {
            "min_ctm": self.min_ctm,
            "detected": self.detected,
            "rounds": self.rounds,
            "coeffs": self.coeffs.tolist(),
            "operators": [o.to_dict() for o in self.operators],
            "witness": matrix_to_dict(self.witness),
            "p": matrix_to_dict(self.p),
            "q": matrix_to_dict(self.q),
            "transpose_side": self.transpose_side,
        }

    def __repr__(self):
        return repr_format(self, min_ctm=self.min_ctm, detected=self.detected, rounds=self.rounds)


def hermitian_basis(d: int) -> List[np.ndarray]:
    """
    The d^2 matrices E_jj, (E_jk + E_kj)/sqrt(2) and i(E_jk - E_kj)/sqrt(2), orthonormal under Tr(A B)
    """
    basis = []
    for j in range(d):
        m = np.zeros((d, d), dtype=complex)
        m[j, j] = 1
        basis.append(m)
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = m[k, j] = 1 / np.sqrt(2)
            basis.append(m)
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = 1j / np.sqrt(2)
            m[k, j] = -1j / np.sqrt(2)
            basis.append(m)
    return basis


def _independent_columns(mats: Sequence[np.ndarray]) -> List[int]:
    if not mats:
        return []
    vecs = np.array([np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats]).T
    _, r, piv = scipy.linalg.qr(vecs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0:
        return []
    rank = int(np.sum(diag > _RANK_TOL * diag[0]))
    return sorted(int(i) for i in piv[:rank])


def witness_sdp(ops: Sequence[ProductObservable], m: Sequence[float], transpose_side: int = 0,
                options: SolverOptions = None, tol: float = DETECTION_TOL,
                dims: Sequence[int] = None) -> WitnessReport:
    """
    Optimal decomposable witness in the span of the identity and ``ops``

    :param ops: Local product observables, all on the same dims
    :param m: Measured expectation values, one per operator
    :param transpose_side: Subsystem transposed in Q^{T_A}
    :param options: Solver options
    :param tol: Detection threshold, detected iff min_ctm < -tol
    :param dims: Subsystem dims, only needed when ``ops`` is empty
    :raises IterationLimitError: if the solver does not converge
    """
    ops = list(ops)
    m = np.asarray(m, dtype=float).ravel()
    if len(ops) != m.size:
        raise DimensionError(f"Got {len(ops)} operators and {m.size} measured values")
    if ops:
        dims = ops[0].dims
        if any(o.dims != dims for o in ops):
            raise DimensionError("All operators must act on the same subsystem dims")
    elif dims is None:
        raise DimensionError("dims are required when no operators are given")
    dims = tuple(dims)
    d = int(np.prod(dims))
    eye = np.eye(d)

    centered = [o.matrix() - o.trace() / d * eye for o in ops]
    m_centered = np.array([mk - o.trace() / d for mk, o in zip(m, ops)])
    keep = _independent_columns(centered)
    if len(keep) < len(ops):
        logger.debug(f"Dropping {len(ops) - len(keep)} linearly dependent operator(s)")

    basis = hermitian_basis(d)
    basis_pt = [partial_transpose_matrix(b, dims, transpose_side) for b in basis]
    n_c = len(keep)
    zeros = np.zeros((d, d))
    q_block = LMIBlock(zeros, [zeros] * n_c + basis, "Q")
    p_block = LMIBlock(eye / d, [centered[k] for k in keep] + [-b for b in basis_pt], "P")
    objective = np.concatenate([m_centered[keep], np.zeros(len(basis))])
    problem = LMIProblem(objective, [p_block, q_block])

    x0 = np.zeros(problem.nvars)
    x0[n_c:n_c + d] = 1 / (2 * d)

    stopwatch = Stopwatch()
    with stopwatch:
        solution = require_optimal(BarrierSolver(options).solve(problem, x0))
    x = solution.x
    coeffs = np.zeros(len(ops))
    coeffs[keep] = x[:n_c]
    q = np.tensordot(x[n_c:], np.array(basis), axes=1)
    witness = eye / d + np.tensordot(coeffs, np.array(centered), axes=1) if ops else eye / d
    p = witness - partial_transpose_matrix(q, dims, transpose_side)
    min_ctm = 1 / d + solution.objective
    detected = min_ctm < -tol
    logger.debug(f"Witness SDP over {len(ops)} operator(s): min_ctm={min_ctm:.6g} detected={detected} "
                 f"({stopwatch.elapsed:.3f}s, {solution.iterations} iterations)")
    return WitnessReport(min_ctm, coeffs, witness, (p + dagger(p)) / 2, (q + dagger(q)) / 2, ops, detected,
                         len(ops), transpose_side)


def correlation_operators(dims: Sequence[int]) -> List[ProductObservable]:
    """
    The three correlation operators tried first by the random protocol:
    XX, YY, ZZ for two qubits and X.L1, Y.L2, Z.L3 for a qubit and a qutrit
    """
    dims = tuple(dims)
    if dims == (2, 2):
        return [ProductObservable(w) for w in ("XX", "YY", "ZZ")]
    if dims == (2, 3):
        return [ProductObservable(pair) for pair in (["X", "L1"], ["Y", "L2"], ["Z", "L3"])]
    raise DimensionError(f"Correlation operators are defined for 2x2 and 2x3, got {dims}")


def random_local_observable(dims: Sequence[int], rng: np.random.Generator) -> ProductObservable:
    """
    Product of Haar-rotated reference observables: U Z U^dag on qubits, V L3 V^dag on qutrits
    """
    factors = []
    for d in dims:
        if d not in _LOCAL_REFERENCE:
            raise DimensionError(f"No reference observable for dimension {d}")
        u = haar_unitary(d, rng)
        f = u @ _LOCAL_REFERENCE[d] @ dagger(u)
        factors.append((f + dagger(f)) / 2)
    return ProductObservable(factors)


def random_measurement_protocol(rho: Union[DensityMatrix, PureState], seed: int = None, max_rounds: int = 8,
                                correlation_first: bool = True, rng: np.random.Generator = None,
                                options: SolverOptions = None, tol: float = DETECTION_TOL) -> WitnessReport:
    """
    Adds one local measurement per round and re-solves the witness SDP until the state is detected

    :param rho: A 2x2 or 2x3 state
    :param seed: Seed for the observable sampler
    :param max_rounds: Upper bound on measurements; an undetected result after it is a valid outcome
    :param correlation_first: Use the three correlation operators before any random observable
    :param rng: Caller-owned generator, takes precedence over ``seed``
    :return: the report of the last round
    """
    rho = to_density(rho)
    if rho.dims not in ((2, 2), (2, 3)):
        raise DimensionError(f"The protocol supports 2x2 and 2x3 states, got {rho.dims}")
    rng = rng if rng is not None else make_rng(seed)
    pending = correlation_operators(rho.dims) if correlation_first else []
    ops: List[ProductObservable] = []
    report = None
    for round_no in range(1, max_rounds + 1):
        ops.append(pending.pop(0) if pending else random_local_observable(rho.dims, rng))
        m = [o.expectation(rho) for o in ops]
        report = witness_sdp(ops, m, options=options, tol=tol)
        report.rounds = round_no
        logger.debug(f"Round {round_no}: min_ctm={report.min_ctm:.6g}")
        if report.detected:
            logger.info(f"Entanglement detected after {round_no} measurement(s)")
            break
    else:
        logger.info(f"Not detected after {max_rounds} measurement(s)")
    return report
