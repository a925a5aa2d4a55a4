from __future__ import annotations

import unittest

import numpy as np

from qcorr.circuits.observables import PAULI
from qcorr.exceptions import DimensionError, InvalidStateError, NotHermitianError
from qcorr.linalg import (
    DensityMatrix, PureState, hermitian_eig, kron, local_operator, partial_trace, partial_transpose,
    partial_transpose_matrix, psd_sqrt, real_symmetric_embedding, singular_values, trace_norm
)
from qcorr.states import TwoParamQubitQutrit, bell, ghz, qubit_qutrit

from tests.integrated.base import QcorrTestCase, TestParams
from tests.integrated.helpers import random_mixed


class TestDensityMatrix(QcorrTestCase):
    def test_rejects_invalid_matrices(self):
        with self.assertRaises(InvalidStateError):
            DensityMatrix([[0.5, 0.5j], [0.1j, 0.5]])
        with self.assertRaises(InvalidStateError):
            DensityMatrix(np.eye(2))
        with self.assertRaises(InvalidStateError):
            DensityMatrix(np.diag([1.2, -0.2]))
        with self.assertRaises(DimensionError):
            DensityMatrix(np.eye(4) / 4, (2, 3))

    def test_small_negative_eigenvalue_is_noise(self):
        rho = DensityMatrix(np.diag([1 + 1e-11, -1e-11]))
        self.assertEqual((2,), rho.dims)

    def test_matrix_is_read_only(self):
        rho = bell(1).density_matrix()
        with self.assertRaises(ValueError):
            rho.mat[0, 0] = 0

    def test_default_dims(self):
        self.assertEqual((2, 2, 2), DensityMatrix(np.eye(8) / 8).dims)
        self.assertEqual((6,), DensityMatrix(np.eye(6) / 6).dims)

    def test_mixture(self):
        rho = DensityMatrix.mixture([0.5, 0.5], [bell(1), bell(2)])
        self.assertMatrixClose(np.diag([0.5, 0, 0, 0.5]), rho.mat)
        with self.assertRaises(InvalidStateError):
            DensityMatrix.mixture([1.5, -0.5], [bell(1), bell(2)])
        with self.assertRaises(DimensionError):
            DensityMatrix.mixture([0.5, 0.5], [bell(1), ghz()])

    def test_dict_round_trip(self):
        rho = random_mixed((2, 3))
        self.assertEqual(rho, DensityMatrix.from_dict(rho.to_dict()))

    def test_purity(self):
        self.assertDeltaWithin(1.0, ghz().density_matrix().purity(), 1e-12)
        self.assertDeltaWithin(0.25, DensityMatrix.maximally_mixed((2, 2)).purity(), 1e-12)


class TestPureState(QcorrTestCase):
    def test_normalization(self):
        with self.assertRaises(InvalidStateError):
            PureState([1, 1])
        psi = PureState([1, 1], normalize=True)
        self.assertDeltaWithin(1.0, np.linalg.norm(psi.amp), 1e-12)
        with self.assertRaises(InvalidStateError):
            PureState([0, 0], normalize=True)

    def test_dict_round_trip(self):
        psi = PureState([1, 1j, 0, 1], normalize=True)
        again = PureState.from_dict(psi.to_dict())
        self.assertDeltaWithin(1.0, abs(psi.overlap(again)), 1e-12)

    def test_evolve(self):
        psi = PureState([1, 0])
        flipped = psi.evolve(PAULI["X"])
        self.assertMatrixClose([0, 1], flipped.amp)


class TestPartialOperations(QcorrTestCase):
    def test_partial_trace_of_bell_is_maximally_mixed(self):
        rho = bell(1).density_matrix()
        for keep in (0, 1):
            self.assertMatrixClose(np.eye(2) / 2, partial_trace(rho, [keep]).mat)

    def test_partial_trace_keeps_order(self):
        a = random_mixed((2,), seed=1)
        b = random_mixed((3,), seed=2)
        rho = DensityMatrix(kron(a.mat, b.mat), (2, 3))
        self.assertMatrixClose(a.mat, partial_trace(rho, [0]).mat)
        self.assertMatrixClose(b.mat, partial_trace(rho, [1]).mat)

    def test_partial_trace_bad_keep(self):
        with self.assertRaises(DimensionError):
            partial_trace(bell(1).density_matrix(), [])
        with self.assertRaises(DimensionError):
            partial_trace(bell(1).density_matrix(), [2])

    def test_partial_transpose_spectrum(self):
        w, _ = hermitian_eig(partial_transpose(bell(1).density_matrix(), 0))
        self.assertMatrixClose([-0.5, 0.5, 0.5, 0.5], w)

    def test_partial_transpose_either_side_same_spectrum(self):
        rho = qubit_qutrit(TwoParamQubitQutrit(0.1, 0.6))
        w0 = hermitian_eig(partial_transpose(rho, 0))[0]
        w1 = hermitian_eig(partial_transpose(rho, 1))[0]
        self.assertMatrixClose(w0, w1)

    def test_trace_norm(self):
        self.assertDeltaWithin(2.0, trace_norm(partial_transpose(bell(4).density_matrix(), 1)), 1e-12)

    @TestParams([dict(dims=(2, 2)), dict(dims=(2, 3)), dict(dims=(2, 2, 2))])
    def test_partial_transpose_invariants(self, dims):
        for seed in range(100):
            rho = random_mixed(dims, seed=seed)
            for part in range(len(dims)):
                pt = partial_transpose(rho, part)
                self.assertMatrixClose(pt.conj().T, pt, 1e-12)
                self.assertDeltaWithin(1.0, np.trace(pt).real, 1e-12)
                self.assertMatrixClose(rho.mat, partial_transpose_matrix(pt, dims, part), 1e-12)


class TestHelpers(QcorrTestCase):
    def test_hermitian_eig_rejects_non_hermitian(self):
        with self.assertRaises(NotHermitianError):
            hermitian_eig([[0, 1], [0, 0]])

    def test_psd_sqrt(self):
        rho = random_mixed((2, 2))
        root = psd_sqrt(rho.mat)
        self.assertMatrixClose(rho.mat, root @ root)
        with self.assertRaises(InvalidStateError):
            psd_sqrt(np.diag([1.0, -1.0]))

    def test_singular_values_match_gram_spectrum(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        from_gram = np.sqrt(np.clip(np.linalg.eigvalsh(a.conj().T @ a), 0, None))[::-1]
        self.assertMatrixClose(from_gram, singular_values(a), atol=1e-10)

    def test_real_symmetric_embedding_doubles_spectrum(self):
        h = random_mixed((3,)).mat
        w = np.linalg.eigvalsh(h)
        w_real = np.linalg.eigvalsh(real_symmetric_embedding(h))
        self.assertMatrixClose(np.sort(np.repeat(w, 2)), w_real)

    def test_local_operator(self):
        op = local_operator(PAULI["Z"], 1, (3, 2))
        self.assertMatrixClose(kron(np.eye(3), PAULI["Z"]), op)
        with self.assertRaises(DimensionError):
            local_operator(PAULI["Z"], 0, (3, 2))


if __name__ == '__main__':
    unittest.main()
