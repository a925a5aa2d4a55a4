"""
Nonclassicality witness map for two-qubit states without a product eigenbasis.

The map value ``MV(rho) = c_opt - <00|rho|00> <1+|rho|1+>`` is non-negative on every state diagonal in some
product basis, so a negative value certifies nonclassical correlations even for separable states.
"""
from __future__ import annotations

import logging
from typing import List, Sequence, Tuple, Union

import numpy as np
import scipy.optimize

from qcorr.circuits.gates import cnot, controlled_hadamard
from qcorr.circuits.observables import ProductObservable
from qcorr.exceptions import DimensionError, SolverError
from qcorr.linalg import DensityMatrix, PureState, projector, to_density
from qcorr.measures.discord import discord
from qcorr.states import basis_state, dephase, ncc_sigma, superposition
from qcorr.utils import repr_format
from qcorr.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

__all__ = [
    "A_HAT", "ncc_objective", "ncc_c_opt", "ncc_c_opt_numeric", "ncc_map_value", "ncc_map_from_magnetizations",
    "ncc_circuit_magnetizations", "mv_zero_crossing", "MVPoint", "mv_dynamics",
]

A_HAT = (2 + np.sqrt(2)) / 4
_XATOL = 1e-12


def ncc_objective(a: float) -> float:
    """a (1 + 2 sqrt(a (1 - a))) / 8, maximized over a in [0, 1] by c_opt"""
    return a * (1 + 2 * np.sqrt(max(a * (1 - a), 0.0))) / 8


def ncc_c_opt() -> float:
    return ncc_objective(A_HAT)


def ncc_c_opt_numeric() -> Tuple[float, float]:
    """
    Cross-check of the closed form by bounded 1-D maximization

    :return: (c_opt, maximizer)
    """
    res = scipy.optimize.minimize_scalar(lambda a: -ncc_objective(a), bounds=(0.0, 1.0), method="bounded",
                                         options={"xatol": _XATOL})
    if not res.success:
        raise SolverError(f"c_opt maximization failed: {res.message}")
    return -float(res.fun), float(res.x)


def _check_two_qubits(rho):
    if tuple(rho.dims) != (2, 2):
        raise DimensionError(f"Expected a two-qubit state, got dims {rho.dims}")


_P00 = projector(basis_state("00").amp)
_P1PLUS = projector(superposition({"10": 1, "11": 1}).amp)


def ncc_map_value(rho: Union[DensityMatrix, PureState], c_opt: float = None) -> float:
    """
    MV = c_opt - Tr(rho |00><00|) Tr(rho |1+><1+|). Negative values certify NCC
    """
    _check_two_qubits(rho)
    rho = to_density(rho)
    c_opt = ncc_c_opt() if c_opt is None else c_opt
    return c_opt - rho.expectation(_P00) * rho.expectation(_P1PLUS)


def ncc_map_from_magnetizations(z1: float, z2: float, z2p: float, c_opt: float = None) -> float:
    """
    Map value from three magnetizations read after CH12 (z1, z2) and after a further CNOT12 (z2p)
    """
    for z in (z1, z2, z2p):
        if not -1 - 1e-12 <= z <= 1 + 1e-12:
            raise ValueError(f"Magnetization {z} outside [-1, 1]")
    c_opt = ncc_c_opt() if c_opt is None else c_opt
    return c_opt - (1 + z1 + z2 + z2p) * (1 - z1 + z2 - z2p) / 16


_Z1 = ProductObservable("ZI")
_Z2 = ProductObservable("IZ")


def ncc_circuit_magnetizations(rho: Union[DensityMatrix, PureState]) -> Tuple[float, float, float]:
    """
    Simulates the readout circuit: controlled-Hadamard (qubit 1 controls 2), read <Z1> and <Z2>,
    then CNOT12 and read <Z2> again
    """
    _check_two_qubits(rho)
    rho = to_density(rho)
    after_ch = rho.evolve(controlled_hadamard(0, 1, 2).unitary)
    after_cnot = after_ch.evolve(cnot(0, 1, 2).unitary)
    return _Z1.expectation(after_ch), _Z2.expectation(after_ch), _Z2.expectation(after_cnot)


def mv_zero_crossing(rho0: Union[DensityMatrix, PureState] = None, qubit: int = 1) -> float:
    """
    Dephasing strength at which the map value of ``rho0`` changes sign, by Brent's method on [0, 1]

    :param rho0: Initial state, the canonical NCC state by default
    :param qubit: 0-based qubit being dephased
    :raises SolverError: if MV does not change sign on [0, 1]
    """
    rho0 = ncc_sigma() if rho0 is None else rho0

    def mv(lam):
        return ncc_map_value(dephase(rho0, qubit, lam))

    lo, hi = mv(0.0), mv(1.0)
    if np.sign(lo) == np.sign(hi):
        raise SolverError(f"Map value does not change sign on [0, 1] ({lo:.4g}, {hi:.4g})")
    return float(scipy.optimize.brentq(mv, 0.0, 1.0, xtol=1e-14))


class MVPoint:
    def __init__(self, lam: float, mv: float, discord: float):
        self.lam = lam
        self.mv = mv
        self.discord = discord

    def to_dict(self):
        return {"lambda": self.lam, "mv": self.mv, "discord": self.discord}

    def __repr__(self):
        return repr_format(self, **self.to_dict())


def mv_dynamics(rho0: Union[DensityMatrix, PureState], lambdas: Sequence[float], qubit: int = 1,
                side: str = "B", workers: int = None) -> List[MVPoint]:
    """
    Map value and discord along a dephasing sweep

    :param rho0: Initial two-qubit state
    :param lambdas: Dephasing strengths in [0, 1]
    :param qubit: 0-based qubit being dephased
    :param side: Measured side for discord
    :param workers: Worker count, capped by QCORR_THREADS
    """
    _check_two_qubits(rho0)

    def point(lam):
        rho = dephase(rho0, qubit, lam)
        return MVPoint(float(lam), ncc_map_value(rho), discord(rho, side=side).discord)

    points = parallel_map(point, list(lambdas), workers)
    logger.debug(f"MV sweep over {len(points)} point(s)")
    return points
