"""
Three-qubit pure-state entanglement classification.

Two pipelines are provided. The decision table uses four Pauli correlations and is valid for states in the
five-parameter generic form. The concurrence classifier uses the three squared concurrences G_l and applies to
any pure state. Reported correlations are Pauli-word expectations (sigma units).
"""
from __future__ import annotations

import logging
from typing import Dict, List, Tuple, Union

import numpy as np

from qcorr.circuits.observables import ProductObservable, pauli_word
from qcorr.exceptions import ClassificationError, DimensionError
from qcorr.linalg import DensityMatrix, PureState, hermitian_eig, to_density
from qcorr.measures.three_qubit import concurrence_sq, g_pauli, three_tangle
from qcorr.states import GenericParams, generic, make_rng
from qcorr.utils import IntEnumWithDescription, repr_format

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_TOL", "NOISY_TOL", "EntanglementClass", "ClassificationVerdict", "decision_observables",
    "concurrences", "classify_decision_table", "classify_general", "mixedness_error", "tangle_from_observable",
    "classify_random",
]

DEFAULT_TOL = 1e-6
NOISY_TOL = 0.1
PURITY_TOL = 1e-9

DECISION_WORDS = ("XXX", "XXZ", "XZX", "ZXX")


class EntanglementClass(IntEnumWithDescription):
    ghz = 0, "GHZ"
    w = 1, "W"
    bs1 = 2, "BS1"
    bs2 = 3, "BS2"
    bs3 = 4, "BS3"
    separable = 5, "Separable"

    @classmethod
    def biseparable(cls, qubit: int) -> EntanglementClass:
        """Class of states with ``qubit`` (1-based) in a product with the other two"""
        return {1: cls.bs1, 2: cls.bs2, 3: cls.bs3}[qubit]

    @property
    def is_genuine(self) -> bool:
        return self in (EntanglementClass.ghz, EntanglementClass.w)


class ClassificationVerdict:
    """
    :ivar label: The class
    :ivar evidence: Named values the decision was based on
    :ivar tol: Zero threshold used
    :ivar method: "decision-table" or "concurrence"
    """
    def __init__(self, label: EntanglementClass, evidence: Dict[str, float], tol: float, method: str):
        self.label = label
        self.evidence = dict(evidence)
        self.tol = tol
        self.method = method

    def to_dict(self):
        return {
            "class": self.label.description,
            "method": self.method,
            "tol": self.tol,
            "evidence": {k: float(v) for k, v in self.evidence.items()},
        }

    @classmethod
    def from_dict(cls, data) -> ClassificationVerdict:
        return cls(EntanglementClass.from_description(data["class"]), data["evidence"], data["tol"], data["method"])

    def __eq__(self, other):
        if not isinstance(other, ClassificationVerdict):
            return NotImplemented
        return self.label == other.label and self.method == other.method

    def __repr__(self):
        return repr_format(self, label=self.label.description, method=self.method)


def _pure_three_qubit(psi: Union[PureState, DensityMatrix]) -> PureState:
    if tuple(psi.dims) != (2, 2, 2):
        raise DimensionError(f"Expected a three-qubit state, got dims {psi.dims}")
    if isinstance(psi, PureState):
        return psi
    rho = to_density(psi)
    w, v = hermitian_eig(rho.mat)
    if w[-1] < 1 - PURITY_TOL:
        raise ClassificationError(f"State is not pure (largest eigenvalue {w[-1]:.6g})")
    return PureState(v[:, -1], (2, 2, 2), normalize=True)


def decision_observables(psi: Union[PureState, DensityMatrix]) -> Dict[str, float]:
    """<XXX>, <XXZ>, <XZX>, <ZXX> keyed by word"""
    return {word: pauli_word(word).expectation(psi) for word in DECISION_WORDS}


def concurrences(psi: Union[PureState, DensityMatrix]) -> Tuple[float, float, float]:
    """(G1, G2, G3) of a pure state"""
    psi = _pure_three_qubit(psi)
    return tuple(concurrence_sq(psi, l) for l in (1, 2, 3))


def tangle_from_observable(psi: Union[PureState, DensityMatrix]) -> float:
    """<XXX>^2, equal to the three-tangle for generic-form states"""
    return pauli_word("XXX").expectation(psi) ** 2


def classify_decision_table(psi: Union[PureState, DensityMatrix], tol: float = DEFAULT_TOL) -> ClassificationVerdict:
    """
    Decision table: <XXX> != 0 gives GHZ; otherwise all of <XXZ>, <XZX>, <ZXX> nonzero gives W; exactly one
    nonzero gives BS3, BS2 or BS1 respectively; anything else is Separable
    """
    psi = _pure_three_qubit(psi)
    obs = decision_observables(psi)
    o, o1, o2, o3 = (obs[w] for w in DECISION_WORDS)
    nonzero = [abs(x) > tol for x in (o1, o2, o3)]
    if abs(o) > tol:
        label = EntanglementClass.ghz
    elif all(nonzero):
        label = EntanglementClass.w
    elif sum(nonzero) == 1:
        # O1 = <XXZ> is the BS3 witness, O3 = <ZXX> the BS1 witness
        label = EntanglementClass.biseparable(3 - nonzero.index(True))
    else:
        if any(nonzero):
            logger.warning(f"Decision-table values {obs} fit no row, reporting Separable")
        label = EntanglementClass.separable
    return ClassificationVerdict(label, obs, tol, "decision-table")


def classify_general(psi: Union[PureState, DensityMatrix], tol: float = DEFAULT_TOL,
                     use_pauli: bool = False) -> ClassificationVerdict:
    """
    Concurrence classifier for any pure state. Two or more vanishing G_l give Separable, exactly one gives the
    matching biseparable class, none gives a genuinely entangled state which is GHZ when the three-tangle is
    nonzero and W otherwise

    :param use_pauli: Evaluate G_l from Pauli expectations instead of amplitudes
    """
    psi = _pure_three_qubit(psi)
    if use_pauli:
        g = [g_pauli(psi, l) for l in (1, 2, 3)]
    else:
        g = [concurrence_sq(psi, l) for l in (1, 2, 3)]
    vanishing = [x <= tol for x in g]
    tau = three_tangle(psi)
    evidence = {"G1": g[0], "G2": g[1], "G3": g[2], "tau": tau, "XXX": pauli_word("XXX").expectation(psi)}
    if sum(vanishing) >= 2:
        label = EntanglementClass.separable
    elif sum(vanishing) == 1:
        label = EntanglementClass.biseparable(vanishing.index(True) + 1)
    elif tau > tol:
        label = EntanglementClass.ghz
    else:
        label = EntanglementClass.w
    return ClassificationVerdict(label, evidence, tol, "concurrence")


def mixedness_error(rho: Union[DensityMatrix, PureState], obs: Union[ProductObservable, str],
                    tol: float = DEFAULT_TOL) -> float:
    """
    Fractional error from mixedness, (1 - l1) - sum_{j>1} l_j o_j / o_1, where l_j are the eigenvalues of rho
    in descending order and o_j the expectations of ``obs`` in the matching eigenvectors

    :raises ClassificationError: if o_1 vanishes
    """
    rho = to_density(rho)
    obs = pauli_word(obs) if isinstance(obs, str) else obs
    w, v = hermitian_eig(rho.mat)
    w, v = w[::-1], v[:, ::-1]
    m = obs.matrix()
    o = np.real(np.einsum("ij,ik,kj->j", np.conj(v), m, v))
    if abs(o[0]) < tol:
        raise ClassificationError(f"Observable expectation in the dominant eigenvector is {o[0]:.3e}")
    return float((1 - w[0]) - np.sum(w[1:] * o[1:]) / o[0])


def classify_random(n: int, seed: int = None, tol: float = DEFAULT_TOL) -> List[Tuple[GenericParams, ClassificationVerdict,
                                                                                    ClassificationVerdict]]:
    """
    Classifies ``n`` random generic-form states with both pipelines

    :return: list of (parameters, decision-table verdict, concurrence verdict)
    """
    rng = make_rng(seed)
    rows = []
    for _ in range(n):
        params = GenericParams.random(rng)
        psi = generic(params)
        rows.append((params, classify_decision_table(psi, tol), classify_general(psi, tol)))
    return rows
