"""
Bipartite entanglement quantifiers and separability criteria.

A bipartite cut is given either as the subsystem index (or indices) to partially transpose, or for
realignment as the number of leading subsystems forming side A.
"""
from __future__ import annotations

import logging
from typing import Iterable, Tuple, Union

import numpy as np

from qcorr.exceptions import DimensionError
from qcorr.linalg import (
    PSD_TOL, DensityMatrix, PureState, hermitian_eig, partial_trace, partial_transpose, psd_sqrt, singular_values,
    to_density
)

logger = logging.getLogger(__name__)

__all__ = [
    "CCNR_TOL", "MAJORIZATION_TOL",
    "ppt_check", "negativity", "realign", "ccnr", "majorization_check", "fidelity",
    "reduced_purity", "von_neumann_entropy", "entropy_bits",
]

CCNR_TOL = 1e-9
MAJORIZATION_TOL = 1e-9

State = Union[DensityMatrix, PureState]


def _pt_spectrum(rho: DensityMatrix, cut: Union[int, Iterable[int]]) -> np.ndarray:
    if rho.n_subsystems < 2:
        raise DimensionError("A bipartite cut needs at least two subsystems")
    return hermitian_eig(partial_transpose(rho, cut))[0]


def ppt_check(rho: State, cut: Union[int, Iterable[int]] = 0, tol: float = PSD_TOL) -> Tuple[bool, float]:
    """
    Peres-Horodecki test

    :param rho: The state
    :param cut: Subsystem(s) to transpose
    :param tol: Eigenvalues down to ``-tol`` count as zero
    :return: (is_ppt, minimum eigenvalue of the partial transpose)
    """
    w = _pt_spectrum(to_density(rho), cut)
    min_eig = float(w[0])
    return min_eig >= -tol, min_eig


def negativity(rho: State, cut: Union[int, Iterable[int]] = 0) -> float:
    """
    (||rho^T||_1 - 1) / 2, i.e. the summed magnitude of the negative partial-transpose eigenvalues
    """
    w = _pt_spectrum(to_density(rho), cut)
    return max(float((np.sum(np.abs(w)) - 1) / 2), 0.0)


def _split_dims(dims, split: int) -> Tuple[int, int]:
    if not 1 <= split < len(dims):
        raise DimensionError(f"Split {split} does not leave both sides non-empty for dims {dims}")
    return int(np.prod(dims[:split])), int(np.prod(dims[split:]))


def realign(rho: State, split: int = 1) -> np.ndarray:
    """
    Realigned matrix R with <ij|R|kl> = <ik|rho|jl>, where i, j index side A (the first ``split`` subsystems)
    """
    rho = to_density(rho)
    da, db = _split_dims(rho.dims, split)
    t = rho.mat.reshape(da, db, da, db)
    return t.transpose(0, 2, 1, 3).reshape(da * da, db * db)


def ccnr(rho: State, split: int = 1, tol: float = CCNR_TOL) -> Tuple[float, bool]:
    """
    Computable cross-norm / realignment criterion

    :return: (sum of the realigned singular values, True if the sum certifies entanglement)
    """
    total = float(np.sum(singular_values(realign(rho, split))))
    return total, total > 1 + tol


def majorization_check(rho: State, part: Union[int, Iterable[int]] = 0, tol: float = MAJORIZATION_TOL) -> bool:
    """
    Checks that the spectrum of ``rho`` is majorized by the spectrum of the reduced state on ``part``.
    A False result certifies entanglement

    :param part: Subsystem(s) kept in the reduced state
    """
    rho = to_density(rho)
    keep = [part] if isinstance(part, (int, np.integer)) else list(part)
    p = np.sort(rho.eigvalsh())[::-1]
    q = np.sort(partial_trace(rho, keep).eigvalsh())[::-1]
    q = np.concatenate([q, np.zeros(p.size - q.size)])
    return bool(np.all(np.cumsum(p) <= np.cumsum(q) + tol))


def fidelity(rho1: State, rho2: State) -> float:
    """
    Uhlmann-Jozsa fidelity (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, evaluated as the squared nuclear norm
    of sqrt(rho1) sqrt(rho2)
    """
    rho1, rho2 = to_density(rho1), to_density(rho2)
    if rho1.dims != rho2.dims:
        raise DimensionError(f"Fidelity needs matching dims, got {rho1.dims} and {rho2.dims}")
    s = singular_values(psd_sqrt(rho1.mat) @ psd_sqrt(rho2.mat))
    return float(np.sum(s) ** 2)


def reduced_purity(rho: State, keep: Union[int, Iterable[int]]) -> float:
    keep = [keep] if isinstance(keep, (int, np.integer)) else list(keep)
    return partial_trace(to_density(rho), keep).purity()


def entropy_bits(eigenvalues) -> float:
    """Shannon entropy in bits of a probability vector, with 0 log 0 = 0"""
    p = np.clip(np.real(np.asarray(eigenvalues)), 0, None)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: State) -> float:
    return entropy_bits(to_density(rho).eigvalsh())
