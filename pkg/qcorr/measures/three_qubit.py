"""
Three-qubit pure-state invariants: bipartite squared concurrences and the three-tangle
"""
from __future__ import annotations

import logging
from typing import Dict, Union

import numpy as np

from qcorr.circuits.observables import pauli_word
from qcorr.exceptions import DimensionError
from qcorr.linalg import DensityMatrix, PureState, to_density

logger = logging.getLogger(__name__)

__all__ = ["concurrence_sq", "g_pauli", "g_pauli_terms", "three_tangle", "hyperdeterminant_terms"]

# (word on qubit 1 | qubits 2 3, weight): the squared-concurrence polynomial for the 1|23 cut
_G1_TERMS = (
    ("IIZ", -1), ("IZI", -1), ("IZZ", -1),
    ("ZII", -3), ("ZIZ", 1), ("ZZI", 1), ("ZZZ", 1),
    ("XII", -3), ("XIZ", 1), ("XZI", 1), ("XZZ", 1),
    ("YII", -3), ("YIZ", 1), ("YZI", 1), ("YZZ", 1),
)


def _check_three_qubits(state: Union[PureState, DensityMatrix]):
    if tuple(state.dims) != (2, 2, 2):
        raise DimensionError(f"Expected a three-qubit state, got dims {state.dims}")


def _check_cut(l: int):
    if l not in (1, 2, 3):
        raise ValueError(f"Cut index must be 1, 2 or 3, got {l}")


def concurrence_sq(psi: PureState, l: int) -> float:
    """
    Squared concurrence across the cut l|rest of a pure state

    :param psi: Three-qubit pure state
    :param l: Qubit on one side of the cut, 1-based
    :return: G_l = p0 p1 - |<a_0|a_1>|^2, in [0, 1/4]
    """
    _check_three_qubits(psi)
    _check_cut(l)
    t = np.moveaxis(psi.amp.reshape(2, 2, 2), l - 1, 0).reshape(2, 4)
    p0 = float(np.vdot(t[0], t[0]).real)
    p1 = float(np.vdot(t[1], t[1]).real)
    c = np.vdot(t[1], t[0])
    return max(p0 * p1 - abs(c) ** 2, 0.0)


def _permute_word(word: str, l: int) -> str:
    """Moves the character written for qubit 1 onto qubit l"""
    rest = list(word[1:])
    rest.insert(l - 1, word[0])
    return "".join(rest)


def g_pauli_terms(l: int = 1) -> Dict[str, int]:
    """
    The Pauli words and weights of the squared-concurrence polynomial for the cut l|rest
    """
    _check_cut(l)
    return {_permute_word(w, l): weight for w, weight in _G1_TERMS}


def g_pauli(rho: Union[DensityMatrix, PureState], l: int = 1) -> float:
    """
    Squared concurrence from Pauli expectations:
    (1/16) (3 + sum_w weight_w <w>^2). Exact for pure states
    """
    _check_three_qubits(rho)
    state = to_density(rho)
    total = 3.0
    for word, weight in g_pauli_terms(l).items():
        total += weight * pauli_word(word).expectation(state) ** 2
    return total / 16


def hyperdeterminant_terms(psi: PureState):
    """
    (d1, d2, d3) of Cayley's hyperdeterminant over the amplitudes a_ijk
    """
    _check_three_qubits(psi)
    a = psi.amp.reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return complex(d1), complex(d2), complex(d3)


def three_tangle(psi: PureState) -> float:
    """
    tau = 4 |d1 - 2 d2 + 4 d3|
    """
    d1, d2, d3 = hyperdeterminant_terms(psi)
    return float(4 * abs(d1 - 2 * d2 + 4 * d3))
