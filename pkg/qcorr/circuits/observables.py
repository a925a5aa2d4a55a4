"""
Local product observables.

Expectations are reported in sigma units: every factor is a Pauli (or Gell-Mann) matrix, not a spin
angular momentum ``I = sigma/2``. Product-operator values written as ``2 I_x I_x`` equal the sigma-unit
value ``<sigma_x sigma_x>`` divided by 2.
"""
from __future__ import annotations

import itertools
import logging
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from qcorr.exceptions import DimensionError
from qcorr.linalg import DensityMatrix, PureState, as_matrix, expectation, is_hermitian, kron, matrix_from_dict, matrix_to_dict
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

__all__ = [
    "PAULI", "GELL_MANN", "SINGLE_OPERATORS",
    "ProductObservable", "pauli_word", "all_pauli_words", "pauli_word_index", "pauli_word_from_index",
]

PAULI: Dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

GELL_MANN: Dict[str, np.ndarray] = {
    "L1": np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex),
    "L2": np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex),
    "L3": np.diag([1, -1, 0]).astype(complex),
    "L4": np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex),
    "L5": np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex),
    "L6": np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex),
    "L7": np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex),
    "L8": np.diag([1, 1, -2]).astype(complex) / np.sqrt(3),
}
"""Gell-Mann matrices, normalized to Tr(L_i L_j) = 2 delta_ij"""

SINGLE_OPERATORS = {**PAULI, **GELL_MANN}

_PAULI_ORDER = "IXYZ"


def _label_dim(label: str) -> int:
    if label in GELL_MANN:
        return 3
    if label in PAULI:
        return 2
    raise ValueError(f"Unknown operator label '{label}'")


class ProductObservable:
    """
    A tensor product of single-subsystem Hermitian operators with a real prefactor.

    Factors are either labels (``I``, ``X``, ``Y``, ``Z`` for qubits, ``L1`` .. ``L8`` for qutrits) or explicit
    Hermitian matrices, e.g. randomly rotated local observables. A string such as ``"XXZ"`` is read as one
    Pauli label per character.

    :param factors: Labels or matrices, one per subsystem
    :param prefactor: Real scalar multiplying the product
    :param dims: Subsystem dimensions; only needed to give ``I`` a dimension other than 2
    """
    def __init__(self, factors: Union[str, Sequence], prefactor: float = 1.0, dims: Sequence[int] = None):
        if isinstance(factors, str):
            factors = list(factors)
        if not factors:
            raise DimensionError("Product observable needs at least one factor")
        if dims is not None and len(dims) != len(factors):
            raise DimensionError("One dimension per factor is required")
        labels: List[str] = []
        mats: List[np.ndarray] = []
        for i, f in enumerate(factors):
            if isinstance(f, str):
                d = dims[i] if dims is not None else _label_dim(f)
                if f == "I":
                    mats.append(np.eye(d, dtype=complex))
                else:
                    if _label_dim(f) != d:
                        raise DimensionError(f"Operator {f} does not act on dimension {d}")
                    mats.append(SINGLE_OPERATORS[f])
                labels.append(f)
            else:
                m = as_matrix(f)
                if not is_hermitian(m):
                    raise ValueError(f"Factor {i} is not Hermitian")
                mats.append(m)
                labels.append("M")
        self._labels = tuple(labels)
        self._factors = tuple(mats)
        self.prefactor = float(prefactor)
        self.dims = tuple(m.shape[0] for m in mats)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    @property
    def factors(self) -> Tuple[np.ndarray, ...]:
        return self._factors

    @property
    def word(self) -> str:
        """
        **Read Only**

        Compact label: ``"XXZ"`` for Pauli words, dot-separated otherwise (``"X.L3"``)
        """
        if all(len(lbl) == 1 for lbl in self._labels):
            return "".join(self._labels)
        return ".".join(self._labels)

    @property
    def is_pauli_word(self) -> bool:
        return all(lbl in PAULI for lbl in self._labels) and all(d == 2 for d in self.dims)

    @property
    def support(self) -> Tuple[int, ...]:
        """Subsystems where the factor is not the identity"""
        return tuple(i for i, (lbl, m) in enumerate(zip(self._labels, self._factors))
                     if not (lbl == "I" or (lbl == "M" and np.allclose(m, np.eye(m.shape[0])))))

    def matrix(self) -> np.ndarray:
        return self.prefactor * kron(*self._factors)

    def trace(self) -> float:
        return self.prefactor * float(np.prod([np.trace(m).real for m in self._factors]))

    def expectation(self, state: Union[DensityMatrix, PureState]) -> float:
        """
        <O> in the given state

        :raises DimensionError: if the state dimensions do not match
        """
        if tuple(state.dims) != self.dims:
            raise DimensionError(f"Observable acts on {self.dims}, state has dims {state.dims}")
        return expectation(state, self.matrix())

    def scaled(self, factor: float) -> ProductObservable:
        obs = ProductObservable.__new__(ProductObservable)
        obs._labels, obs._factors, obs.dims = self._labels, self._factors, self.dims
        obs.prefactor = self.prefactor * factor
        return obs

    def to_dict(self):
        data = {"word": list(self._labels), "prefactor": self.prefactor, "dims": list(self.dims)}
        if "M" in self._labels:
            data["matrices"] = [matrix_to_dict(m) for m in self._factors]
        return data

    @classmethod
    def from_dict(cls, data) -> ProductObservable:
        if "matrices" in data:
            factors = [matrix_from_dict(m) for m in data["matrices"]]
        else:
            factors = data["word"]
        return cls(factors, data.get("prefactor", 1.0), data.get("dims"))

    def __eq__(self, other):
        if not isinstance(other, ProductObservable):
            return NotImplemented
        return self.dims == other.dims and np.allclose(self.matrix(), other.matrix())

    def __hash__(self):
        return hash((self.word, self.prefactor, self.dims))

    def __repr__(self):
        return repr_format(self, word=self.word, prefactor=self.prefactor)


def pauli_word(word: str, prefactor: float = 1.0) -> ProductObservable:
    """Pauli word such as ``"XXZ"`` with an optional prefactor"""
    word = word.upper()
    if any(ch not in PAULI for ch in word):
        raise ValueError(f"'{word}' is not a Pauli word")
    return ProductObservable(word, prefactor)


def all_pauli_words(n: int, include_identity: bool = False) -> List[str]:
    """All n-qubit Pauli words ordered by their base-4 index (I=0, X=1, Y=2, Z=3, qubit 1 most significant)"""
    words = ["".join(p) for p in itertools.product(_PAULI_ORDER, repeat=n)]
    return words if include_identity else words[1:]


def pauli_word_index(word: str) -> int:
    idx = 0
    for ch in word:
        idx = 4 * idx + _PAULI_ORDER.index(ch)
    return idx


def pauli_word_from_index(index: int, n: int) -> str:
    if not 0 <= index < 4 ** n:
        raise ValueError(f"Index {index} out of range for {n} qubits")
    chars = []
    for _ in range(n):
        chars.append(_PAULI_ORDER[index % 4])
        index //= 4
    return "".join(reversed(chars))
