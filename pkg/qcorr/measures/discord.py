"""
Quantum discord of two-qubit states under projective measurements on one side.

The measured qubit is projected onto ``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`` and its orthogonal
complement. The conditional entropy is minimized by a coarse grid over (theta, phi) followed by
Nelder-Mead refinement from the best grid cells. Entropies are in bits.
"""
from __future__ import annotations

import logging
from typing import Tuple, Union

import numpy as np
import scipy.optimize

from qcorr.exceptions import DimensionError
from qcorr.linalg import DensityMatrix, PureState, partial_trace, to_density
from qcorr.measures.entanglement import von_neumann_entropy
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

__all__ = ["DiscordResult", "discord", "discord_grid", "conditional_entropy", "SIDES"]

SIDES = ("A", "B")
GRID_SIZE = 64
ORACLE_GRID_SIZE = 129
N_REFINE = 3
_NM_OPTIONS = {"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000}


class DiscordResult:
    """
    :ivar discord: D = I - J, in bits
    :ivar theta_opt: Polar angle of the optimal projector
    :ivar phi_opt: Azimuth of the optimal projector
    :ivar mutual_info: I(A:B)
    :ivar classical_corr: J, the measurement-induced classical correlation
    :ivar side: Measured subsystem, "A" or "B"
    """
    def __init__(self, discord: float, theta_opt: float, phi_opt: float, mutual_info: float, classical_corr: float,
                 side: str = "A"):
        self.discord = discord
        self.theta_opt = theta_opt
        self.phi_opt = phi_opt
        self.mutual_info = mutual_info
        self.classical_corr = classical_corr
        self.side = side

    def to_dict(self):
        return {
            "discord": self.discord,
            "theta_opt": self.theta_opt,
            "phi_opt": self.phi_opt,
            "mutual_info": self.mutual_info,
            "classical_corr": self.classical_corr,
            "side": self.side,
        }

    @classmethod
    def from_dict(cls, data) -> DiscordResult:
        return cls(data["discord"], data["theta_opt"], data["phi_opt"], data["mutual_info"], data["classical_corr"],
                   data.get("side", "A"))

    def __repr__(self):
        return repr_format(self, discord=self.discord, side=self.side)


def _measured_first(rho: Union[DensityMatrix, PureState], side: str) -> np.ndarray:
    rho = to_density(rho)
    if rho.n_subsystems != 2:
        raise DimensionError(f"Discord needs a bipartite state, got dims {rho.dims}")
    if side not in SIDES:
        raise ValueError(f"Side must be one of {SIDES}, got '{side}'")
    da, db = rho.dims
    t = rho.mat.reshape(da, db, da, db)
    if side == "B":
        t = t.transpose(1, 0, 3, 2)
        da, db = db, da
    if da != 2:
        raise DimensionError("The measured subsystem must be a qubit")
    return t


def _projector_vectors(theta, phi) -> Tuple[np.ndarray, np.ndarray]:
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    v0 = np.stack([c + 0j, e * s], axis=-1)
    v1 = np.stack([-np.conj(e) * s, c + 0j], axis=-1)
    return v0, v1


def _conditional_entropies(t: np.ndarray, theta, phi) -> np.ndarray:
    """Vectorized sum_j p_j S(rho_unmeasured | j) over arrays of angles"""
    total = np.zeros(np.broadcast(np.asarray(theta), np.asarray(phi)).shape)
    for v in _projector_vectors(theta, phi):
        cond = np.einsum("...a,aibj,...b->...ij", np.conj(v), t, v)
        cond = (cond + np.conj(np.swapaxes(cond, -1, -2))) / 2
        p = np.real(np.trace(cond, axis1=-2, axis2=-1))
        w = np.clip(np.linalg.eigvalsh(cond), 0, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(w > 0, -w * np.log2(np.where(w > 0, w, 1)), 0.0)
            ent = np.sum(terms, axis=-1) + p * np.log2(np.where(p > 0, p, 1))
        total += np.where(p > 0, ent, 0.0)
    return total


def conditional_entropy(rho: Union[DensityMatrix, PureState], theta: float, phi: float, side: str = "A") -> float:
    """
    Post-measurement conditional entropy for the projector pair at (theta, phi) on ``side``
    """
    return float(_conditional_entropies(_measured_first(rho, side), theta, phi))


def _marginal_entropies(rho: DensityMatrix):
    s_a = von_neumann_entropy(partial_trace(rho, [0]))
    s_b = von_neumann_entropy(partial_trace(rho, [1]))
    return s_a, s_b, von_neumann_entropy(rho)


def _result(rho: DensityMatrix, side: str, min_cond: float, theta: float, phi: float) -> DiscordResult:
    s_a, s_b, s_ab = _marginal_entropies(rho)
    mutual = s_a + s_b - s_ab
    s_unmeasured = s_b if side == "A" else s_a
    classical = s_unmeasured - min_cond
    value = min(max(mutual - classical, 0.0), mutual + 1e-12)
    return DiscordResult(value, float(theta) % (2 * np.pi), float(phi) % (2 * np.pi), mutual, classical, side)


def _grid(n: int):
    thetas = np.linspace(0, np.pi, n)
    phis = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.meshgrid(thetas, phis, indexing="ij")


def discord_grid(rho: Union[DensityMatrix, PureState], n: int = ORACLE_GRID_SIZE, side: str = "A") -> DiscordResult:
    """
    Brute-force minimization over an n x n (theta, phi) grid, no refinement
    """
    rho = to_density(rho)
    t = _measured_first(rho, side)
    th, ph = _grid(n)
    values = _conditional_entropies(t, th, ph)
    idx = np.unravel_index(np.argmin(values), values.shape)
    return _result(rho, side, float(values[idx]), th[idx], ph[idx])


def discord(rho: Union[DensityMatrix, PureState], side: str = "A", grid_size: int = GRID_SIZE,
            n_refine: int = N_REFINE) -> DiscordResult:
    """
    One-way quantum discord with the measurement on ``side``

    :param rho: Two-qubit state (the unmeasured side may be any dimension)
    :param side: "A" measures the first subsystem, "B" the second
    :param grid_size: Points per angle in the coarse search
    :param n_refine: Number of best grid cells refined with Nelder-Mead
    """
    rho = to_density(rho)
    t = _measured_first(rho, side)
    th, ph = _grid(grid_size)
    values = _conditional_entropies(t, th, ph).ravel()
    best = np.argsort(values)[:n_refine]
    min_cond, arg = float(values[best[0]]), (th.ravel()[best[0]], ph.ravel()[best[0]])

    def objective(x):
        return float(_conditional_entropies(t, x[0], x[1]))

    for i in best:
        res = scipy.optimize.minimize(objective, [th.ravel()[i], ph.ravel()[i]], method="Nelder-Mead",
                                      options=_NM_OPTIONS)
        if res.fun < min_cond:
            min_cond, arg = float(res.fun), tuple(res.x)
    result = _result(rho, side, min_cond, *arg)
    logger.debug(f"Discord on side {side}: {result.discord:.6g} at theta={result.theta_opt:.4f}, phi={result.phi_opt:.4f}")
    return result
