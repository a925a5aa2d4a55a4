from __future__ import annotations

import numpy as np

from qcorr.linalg import DensityMatrix
from qcorr.states import haar_random_pure, make_rng, random_separable

TEST_SEED = 1234


def rng(seed: int = TEST_SEED) -> np.random.Generator:
    return make_rng(seed)


def random_mixed(dims, seed: int = TEST_SEED, rank: int = None) -> DensityMatrix:
    """Random full-rank (or given rank) density matrix from a Ginibre draw"""
    gen = make_rng(seed)
    d = int(np.prod(dims))
    k = rank or d
    g = gen.standard_normal((d, k)) + 1j * gen.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real, dims)


def random_pure_states(n_qubits: int, count: int, seed: int = TEST_SEED):
    gen = make_rng(seed)
    return [haar_random_pure(n_qubits, rng=gen) for _ in range(count)]


def random_separables(dims, count: int, seed: int = TEST_SEED):
    gen = make_rng(seed)
    return [random_separable(dims, gen) for _ in range(count)]
