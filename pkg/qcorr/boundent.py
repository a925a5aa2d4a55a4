"""
Detection of PPT (bound) entanglement in the qubit-ququart family.

The ququart is carried by qubits 2 and 3. Three correlations are measured::

    B1 = I x X x X,   B2 = I x Y x Y,   B3 = Z x Z x Z

and every state satisfying all four inequalities ``|<B1> +- <B2> +- <B3>| <= 1`` passes the test. The family
violates it for 0 < b < 1/sqrt(17) while staying PPT across the 2|4 cut.
"""
from __future__ import annotations

import itertools
import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.optimize

from qcorr.circuits.observables import pauli_word
from qcorr.exceptions import DimensionError, SolverError
from qcorr.linalg import PSD_TOL, DensityMatrix, PureState
from qcorr.measures.entanglement import negativity, ppt_check
from qcorr.states import horodecki_b
from qcorr.utils import repr_format
from qcorr.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

__all__ = [
    "OBSERVABLES", "VIOLATION_TOL", "BoundEntReport", "b_expectations", "inequality_value", "closed_form_value",
    "detect", "detection_threshold", "sweep", "parse_sweep",
]

OBSERVABLES = ("IXX", "IYY", "ZZZ")
VIOLATION_TOL = 1e-9
QUBIT_CUT = 0


class BoundEntReport:
    """
    :ivar b: Family parameter
    :ivar expectations: (<B1>, <B2>, <B3>)
    :ivar inequality_value: Largest of the four signed sums
    :ivar violated: inequality_value > 1
    :ivar ppt_min_eig: Minimum eigenvalue of the partial transpose across the 2|4 cut
    :ivar negativity: Negativity across the same cut
    """
    def __init__(self, b: float, expectations: Tuple[float, float, float], inequality_value: float,
                 ppt_min_eig: float, negativity: float):
        self.b = float(b)
        self.expectations = tuple(float(e) for e in expectations)
        self.inequality_value = float(inequality_value)
        self.violated = self.inequality_value > 1 + VIOLATION_TOL
        self.ppt_min_eig = float(ppt_min_eig)
        self.negativity = float(negativity)

    @property
    def ppt(self) -> bool:
        return self.ppt_min_eig >= -PSD_TOL

    @property
    def bound_entangled(self) -> bool:
        """**Read Only** Violation of the inequalities by a PPT state strictly inside the family"""
        return self.violated and self.ppt and 0 < self.b < 1

    def to_dict(self):
        return {
            "b": self.b,
            "B1": self.expectations[0],
            "B2": self.expectations[1],
            "B3": self.expectations[2],
            "inequality_value": self.inequality_value,
            "violated": self.violated,
            "ppt_min_eig": self.ppt_min_eig,
            "negativity": self.negativity,
            "bound_entangled": self.bound_entangled,
        }

    def __repr__(self):
        return repr_format(self, b=self.b, value=round(self.inequality_value, 6), violated=self.violated)


def b_expectations(rho: Union[DensityMatrix, PureState]) -> Tuple[float, float, float]:
    if tuple(rho.dims) != (2, 2, 2):
        raise DimensionError(f"Expected a qubit-ququart state on three qubits, got dims {rho.dims}")
    return tuple(pauli_word(w).expectation(rho) for w in OBSERVABLES)


def inequality_value(e1: float, e2: float, e3: float) -> float:
    """max over signs of |e1 +- e2 +- e3|"""
    return max(abs(e1 + s2 * e2 + s3 * e3) for s2, s3 in itertools.product((1, -1), repeat=2))


def closed_form_value(b: float) -> float:
    """(2 sqrt(1 - b^2) + 1 - b) / (1 + 7b), the inequality value of the family"""
    return (2 * np.sqrt(max(1 - b * b, 0.0)) + 1 - b) / (1 + 7 * b)


def detect(b: float) -> BoundEntReport:
    rho = horodecki_b(b)
    expectations = b_expectations(rho)
    _, min_eig = ppt_check(rho, QUBIT_CUT)
    report = BoundEntReport(b, expectations, inequality_value(*expectations), min_eig, negativity(rho, QUBIT_CUT))
    logger.debug(f"{report!r}")
    return report


def detection_threshold(lo: float = 0.1, hi: float = 0.5) -> float:
    """
    Root of inequality_value(b) = 1, expected at 1/sqrt(17)

    :raises SolverError: if there is no sign change on [lo, hi]
    """
    def excess(b):
        return inequality_value(*b_expectations(horodecki_b(b))) - 1

    f_lo, f_hi = excess(lo), excess(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise SolverError(f"No sign change of the inequality excess on [{lo}, {hi}]")
    return float(scipy.optimize.brentq(excess, lo, hi, xtol=1e-12))


def sweep(bs: Sequence[float], workers: int = None) -> List[BoundEntReport]:
    """Reports for every b, in input order"""
    return parallel_map(detect, list(bs), workers)


def parse_sweep(text: str) -> List[float]:
    """
    ``start:stop:step`` with an inclusive stop, e.g. ``0.04:0.2:0.04``
    """
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValueError(f"Sweep must be start:stop:step, got '{text}'")
    if step <= 0:
        raise ValueError("Sweep step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(max(n, 0))]
