"""
Qubit-qutrit witness in the Pauli x Gell-Mann operator basis, and Monte Carlo detection fractions over the
two-parameter U x U invariant family.

An operator on 2x3 is written as::

    W = 1/6 (I + sum_i u_i s_i x I + sqrt(3) sum_j v_j I x L_j + sum_ij beta_ij s_i x L_j)

so u_i = Tr(W s_i x I), v_j = sqrt(3)/2 Tr(W I x L_j) and beta_ij = 3/2 Tr(W s_i x L_j).
"""
from __future__ import annotations

import functools
import itertools
import logging
from typing import Dict, List, Sequence, Tuple

import numpy as np

from qcorr.circuits.observables import GELL_MANN, PAULI, ProductObservable
from qcorr.exceptions import ConfigError, DimensionError
from qcorr.linalg import as_matrix, kron, partial_transpose_matrix, projector
from qcorr.sdp import SolverOptions
from qcorr.states import TwoParamQubitQutrit, make_rng, qubit_qutrit_operator
from qcorr.utils import Stopwatch, repr_format
from qcorr.utils.parallel import parallel_map
from qcorr.witnesses.sdp_witness import DETECTION_TOL, witness_sdp

logger = logging.getLogger(__name__)

__all__ = [
    "QubitQutritDecomposition", "qubit_qutrit_witness", "decompose_qubit_qutrit", "canonical_operators",
    "canonical_weights", "pt_spectrum", "DetectionReport", "SubsetFraction", "detection_fraction_report",
    "detection_fraction", "SCHEMES", "DOMAINS", "OPERATOR_LABELS",
]

DIMS = (2, 3)
_SIGMAS = [PAULI["X"], PAULI["Y"], PAULI["Z"]]
_LAMBDAS = [GELL_MANN[f"L{j}"] for j in range(1, 9)]
_COEFF_TOL = 1e-12

SCHEMES = ("restricted", "truncated", "sdp")
DOMAINS = ("box", "physical")
DEFAULT_ANGLES = 180
OPERATOR_LABELS = ("L", "B1", "B2", "B3")

_UNIT_CORNERS = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))
_SEPARABLE_CORNERS = ((0.0, 0.0), (0.5, 0.0), (0.0, 0.5))


class QubitQutritDecomposition:
    """
    :ivar u: Qubit Bloch coefficients, length 3
    :ivar v: Qutrit coefficients, length 8
    :ivar beta: Correlation coefficients, 3 x 8
    """
    def __init__(self, u, v, beta):
        self.u = np.asarray(u, dtype=float)
        self.v = np.asarray(v, dtype=float)
        self.beta = np.asarray(beta, dtype=float)

    def reconstruct(self) -> np.ndarray:
        w = np.eye(6, dtype=complex)
        for i, s in enumerate(_SIGMAS):
            w += self.u[i] * kron(s, np.eye(3))
        for j, lam in enumerate(_LAMBDAS):
            w += np.sqrt(3) * self.v[j] * kron(np.eye(2), lam)
        for i, s in enumerate(_SIGMAS):
            for j, lam in enumerate(_LAMBDAS):
                w += self.beta[i, j] * kron(s, lam)
        return w / 6

    def nonzero(self, tol: float = _COEFF_TOL) -> Dict[str, float]:
        """Nonzero coefficients keyed ``u1``, ``v8``, ``beta11`` ... (1-based)"""
        out = {}
        for i, x in enumerate(self.u):
            if abs(x) > tol:
                out[f"u{i + 1}"] = float(x)
        for j, x in enumerate(self.v):
            if abs(x) > tol:
                out[f"v{j + 1}"] = float(x)
        for (i, j), x in np.ndenumerate(self.beta):
            if abs(x) > tol:
                out[f"beta{i + 1}{j + 1}"] = float(x)
        return out

    def to_dict(self):
        return {"u": self.u.tolist(), "v": self.v.tolist(), "beta": self.beta.tolist()}

    def __repr__(self):
        return repr_format(self, **self.nonzero())


def decompose_qubit_qutrit(op) -> QubitQutritDecomposition:
    """
    Coefficients of a 6 x 6 Hermitian operator. The identity component is not returned; the expansion
    assumes unit trace
    """
    w = as_matrix(op)
    if w.shape != (6, 6):
        raise DimensionError(f"Expected a 6x6 operator, got {w.shape}")

    def tr(a):
        return float(np.real(np.trace(w @ a)))

    u = [tr(kron(s, np.eye(3))) for s in _SIGMAS]
    v = [np.sqrt(3) / 2 * tr(kron(np.eye(2), lam)) for lam in _LAMBDAS]
    beta = [[1.5 * tr(kron(s, lam)) for lam in _LAMBDAS] for s in _SIGMAS]
    return QubitQutritDecomposition(u, v, beta)


def qubit_qutrit_witness() -> Tuple[np.ndarray, QubitQutritDecomposition]:
    """
    W = (|eta><eta|)^{T_A} with eta = (|00> + |11>)/sqrt(2), and its decomposition
    """
    eta = np.zeros(6, dtype=complex)
    eta[0] = eta[4] = 1 / np.sqrt(2)
    w = partial_transpose_matrix(projector(eta), DIMS, 0)
    return w, decompose_qubit_qutrit(w)


def canonical_operators() -> List[ProductObservable]:
    """
    The four operators carrying the canonical witness: I x L8, X x L1, Y x L2, Z x L3
    """
    return [
        ProductObservable(["I", "L8"], dims=DIMS),
        ProductObservable(["X", "L1"]),
        ProductObservable(["Y", "L2"]),
        ProductObservable(["Z", "L3"]),
    ]


def canonical_weights() -> np.ndarray:
    """
    Weights w_k with W = I/6 + sum_k w_k O_k over :func:`canonical_operators`
    """
    _, d = qubit_qutrit_witness()
    return np.array([np.sqrt(3) * d.v[7], d.beta[0, 0], d.beta[1, 1], d.beta[2, 2]]) / 6


def pt_spectrum(alpha: float, gamma: float) -> Tuple[float, float, float]:
    """
    Distinct eigenvalues of the partial transpose of the family member: (alpha, (1-2a-2g)/2, (1-2a+2g)/6)
    """
    return alpha, (1 - 2 * alpha - 2 * gamma) / 2, (1 - 2 * alpha + 2 * gamma) / 6


def _sample_params(samples: int, domain: str, rng: np.random.Generator) -> np.ndarray:
    """Entangled (alpha, gamma) points drawn uniformly from the chosen domain"""
    out = np.empty((0, 2))
    while out.shape[0] < samples:
        n = 2 * (samples - out.shape[0]) + 16
        pts = np.column_stack([rng.uniform(0, 0.5, n), rng.uniform(0, 1, n)])
        if domain == "physical":
            pts = pts[1 - 2 * pts[:, 0] - pts[:, 1] >= 0]
        pts = pts[2 * pts[:, 0] + 2 * pts[:, 1] > 1]
        out = np.vstack([out, pts])
    return out[:samples]


def _expectations(params: np.ndarray, ops: Sequence[ProductObservable]) -> np.ndarray:
    """Tr(rho(alpha, gamma) O_k) for every sample, using that rho is affine in (alpha, gamma)"""
    corners = [qubit_qutrit_operator(TwoParamQubitQutrit(a, g, validate=False)) for a, g in _UNIT_CORNERS]
    values = np.array([[np.real(np.trace(c @ o.matrix())) for o in ops] for c in corners])
    return values[0] + params[:, :1] * (values[1] - values[0]) + params[:, 1:] * (values[2] - values[0])


class SubsetFraction:
    """
    :ivar witness: "truncated" or "sdp", the witness that produced the fraction
    """
    def __init__(self, labels: Sequence[str], fraction: float, witness: str):
        self.labels = tuple(labels)
        self.fraction = float(fraction)
        self.witness = witness

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def certifies(self) -> bool:
        """False when no sampled entangled state is detected"""
        return self.fraction > 0

    def to_dict(self):
        return {"subset": "+".join(self.labels), "size": self.size, "fraction": self.fraction,
                "witness": self.witness}

    def __repr__(self):
        return repr_format(self, subset="+".join(self.labels), fraction=round(self.fraction, 4),
                           witness=self.witness)


class DetectionReport:
    """
    Detected fraction of entangled samples for every subset of the canonical operators of the evaluated sizes
    """
    def __init__(self, scheme: str, domain: str, samples: int, seed, subsets: Sequence[SubsetFraction]):
        self.scheme = scheme
        self.domain = domain
        self.samples = samples
        self.seed = seed
        self.subsets = list(subsets)

    def _of_size(self, size: int) -> List[SubsetFraction]:
        candidates = [s for s in self.subsets if s.size == size]
        if not candidates:
            raise ValueError(f"No subsets of size {size}")
        return candidates

    def best(self, size: int) -> SubsetFraction:
        return max(self._of_size(size), key=lambda s: s.fraction)

    def worst(self, size: int) -> SubsetFraction:
        """
        Smallest fraction among the subsets of ``size`` that certify at least one sample.
        A subset detecting nothing builds no witness and is skipped
        """
        candidates = [s for s in self._of_size(size) if s.certifies]
        if not candidates:
            raise ValueError(f"No subset of size {size} detects any sample")
        return min(candidates, key=lambda s: s.fraction)

    def fraction(self, labels: Sequence[str]) -> float:
        key = tuple(sorted(labels, key=OPERATOR_LABELS.index))
        for s in self.subsets:
            if s.labels == key:
                return s.fraction
        raise KeyError("+".join(labels))

    def to_dict(self):
        sizes = sorted({s.size for s in self.subsets})
        return {
            "scheme": self.scheme,
            "domain": self.domain,
            "samples": self.samples,
            "seed": self.seed,
            "subsets": [s.to_dict() for s in self.subsets],
            "best": {size: self.best(size).fraction for size in sizes},
            "worst": {size: self.worst(size).fraction for size in sizes
                      if any(s.certifies for s in self._of_size(size))},
        }

    def __repr__(self):
        return repr_format(self, scheme=self.scheme, domain=self.domain, samples=self.samples)


def _truncated_detected(m: np.ndarray, weights: np.ndarray, tol: float) -> np.ndarray:
    return 1 / 6 + m @ weights < -tol


def _flags_separable(m_separable: np.ndarray, weights: np.ndarray, tol: float) -> bool:
    """The truncated witness is affine on the family, so checking the separable triangle's corners suffices"""
    return bool(np.any(_truncated_detected(m_separable, weights, tol)))


class _MinimaTable:
    """
    min over decomposable witnesses of sum_k c_k m_k along each direction of the family's expectation span,
    tabulated on an angle grid. The optimum is positively homogeneous in m, so the table covers every sample
    """
    def __init__(self, basis: np.ndarray, angles: np.ndarray, minima: np.ndarray):
        self.basis = basis
        self.angles = angles
        self.minima = minima

    def evaluate(self, m: np.ndarray) -> np.ndarray:
        y = m @ self.basis
        if self.basis.shape[1] == 1:
            return np.where(y[:, 0] >= 0, y[:, 0] * self.minima[0], -y[:, 0] * self.minima[1])
        radius = np.hypot(y[:, 0], y[:, 1])
        theta = np.mod(np.arctan2(y[:, 1], y[:, 0]), 2 * np.pi)
        return radius * np.interp(theta, self.angles, self.minima, period=2 * np.pi)


def _family_span(idx: Tuple[int, ...]) -> np.ndarray:
    """
    Orthonormal basis of the span of the subset's expectations over the whole family. Every sample is a
    linear combination of the three unit corners, so the basis does not depend on the samples
    """
    ops = canonical_operators()
    corners = _expectations(np.array(_UNIT_CORNERS, dtype=float), [ops[i] for i in idx])
    _, s, vt = np.linalg.svd(corners, full_matrices=False)
    rank = int(np.sum(s > 1e-9 * max(s[0], 1e-300))) if s.size else 0
    return vt[:rank].T


def _build_minima_table(idx: Tuple[int, ...], n_angles: int, options: SolverOptions = None) -> _MinimaTable:
    ops = [canonical_operators()[i] for i in idx]
    basis = _family_span(idx)
    rank = basis.shape[1]
    if rank == 0 or rank > 2:
        raise DimensionError(f"Expectation span of rank {rank} cannot be tabulated")
    if rank == 1:
        angles = np.array([0.0, np.pi])
    else:
        angles = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)

    def solve(angle):
        direction = basis @ np.array([np.cos(angle), np.sin(angle)])[:rank]
        return witness_sdp(ops, direction, options=options).min_ctm - 1 / 6

    with Stopwatch() as stopwatch:
        minima = np.array(parallel_map(solve, angles))
    logger.debug(f"Tabulated {len(angles)} directions for {'+'.join(OPERATOR_LABELS[i] for i in idx)} "
                 f"in {stopwatch.elapsed:.2f}s")
    return _MinimaTable(basis, angles, minima)


@functools.lru_cache(maxsize=None)
def _default_minima_table(idx: Tuple[int, ...], n_angles: int) -> _MinimaTable:
    """Tables for default solver options, shared across reports and calls"""
    return _build_minima_table(idx, n_angles)


def _sdp_detected(idx: Tuple[int, ...], m: np.ndarray, tol: float, n_angles: int,
                  options: SolverOptions) -> np.ndarray:
    if not np.any(m):
        return np.zeros(m.shape[0], dtype=bool)
    if _family_span(idx).shape[1] > 2:
        logger.warning("Expectation span has rank > 2, solving one SDP per sample")
        ops = [canonical_operators()[i] for i in idx]
        values = parallel_map(lambda row: witness_sdp(ops, row, options=options).min_ctm, list(m))
        return np.array(values) < -tol
    if options is None:
        table = _default_minima_table(idx, n_angles)
    else:
        table = _build_minima_table(idx, n_angles, options)
    return 1 / 6 + table.evaluate(m) < -tol


def detection_fraction_report(samples: int = 100000, seed: int = None, scheme: str = "restricted",
                              domain: str = "box", n_angles: int = DEFAULT_ANGLES, options: SolverOptions = None,
                              tol: float = DETECTION_TOL, sizes: Sequence[int] = None) -> DetectionReport:
    """
    Monte Carlo detection fractions for every subset of the canonical operators

    :param samples: Number of entangled samples
    :param seed: Seed for the sampler
    :param scheme: "restricted" keeps the subset's terms of the canonical witness (unit trace by construction)
                   and, when that operator flags a separable member of the family, uses the optimal
                   decomposable witness in the subset's span instead.
                   "truncated" always keeps the subset's canonical terms.
                   "sdp" always uses the optimal decomposable witness in the span of the subset
    :param domain: "box" samples (alpha, gamma) in [0, 1/2] x [0, 1], "physical" additionally requires beta >= 0
    :param n_angles: Angle grid size for the optimal witness tables
    :param sizes: Subset sizes to evaluate, all by default
    """
    if scheme not in SCHEMES:
        raise ConfigError(f"Unknown scheme '{scheme}', expected one of {SCHEMES}")
    if domain not in DOMAINS:
        raise ConfigError(f"Unknown domain '{domain}', expected one of {DOMAINS}")
    rng = make_rng(seed)
    params = _sample_params(samples, domain, rng)
    ops = canonical_operators()
    m_all = _expectations(params, ops)
    m_separable = _expectations(np.array(_SEPARABLE_CORNERS, dtype=float), ops)
    weights = canonical_weights()

    if sizes is None:
        sizes = range(1, len(ops) + 1)
    subsets = []
    for size in sorted(set(sizes)):
        for idx in itertools.combinations(range(len(ops)), size):
            cols = list(idx)
            witness = scheme
            if scheme == "restricted":
                witness = "sdp" if _flags_separable(m_separable[:, cols], weights[cols], tol) else "truncated"
            if witness == "truncated":
                detected = _truncated_detected(m_all[:, cols], weights[cols], tol)
            else:
                detected = _sdp_detected(idx, m_all[:, cols], tol, n_angles, options)
            subsets.append(SubsetFraction([OPERATOR_LABELS[i] for i in idx], np.mean(detected), witness))
            logger.debug(f"{scheme}/{domain} subset {subsets[-1]}")
    return DetectionReport(scheme, domain, samples, seed, subsets)


def detection_fraction(n_ops: int, samples: int = 100000, seed: int = None, domain: str = "box",
                       **kwargs) -> float:
    """
    Worst-case fraction of entangled family members detected by a valid unit-trace witness built from
    ``n_ops`` of the canonical coefficients, over the subsets that detect anything.
    The witness is the canonical one restricted to the measured coefficients, replaced by the optimal
    decomposable witness in their span when the restriction flags a separable member of the family
    """
    if not 1 <= n_ops <= len(OPERATOR_LABELS):
        raise ValueError(f"n_ops must be 1..{len(OPERATOR_LABELS)}, got {n_ops}")
    report = detection_fraction_report(samples, seed, "restricted", domain, sizes=[n_ops], **kwargs)
    return report.worst(n_ops).fraction
