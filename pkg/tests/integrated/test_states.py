from __future__ import annotations

import unittest

import numpy as np

from qcorr.exceptions import ConfigError, DimensionError, InvalidStateError
from qcorr.linalg import PureState, partial_trace
from qcorr.states import (
    GenericParams, TwoParamQubitQutrit, bell, bs, catalog_names, dephase, e_n, e_theta, from_name, generic, ghz,
    haar_random_pure, horodecki_b, horodecki_b_components, horodecki_b_mixture, make_rng, ncc_sigma, pseudo_pure,
    qubit_qutrit, s2, w, w_wbar
)

from tests.integrated.base import QcorrTestCase, TestParams


class TestCatalog(QcorrTestCase):
    def test_bell_states_orthonormal(self):
        states = [bell(k) for k in range(1, 5)]
        gram = np.array([[abs(a.overlap(b)) for b in states] for a in states])
        self.assertMatrixClose(np.eye(4), gram)
        with self.assertRaises(ValueError):
            bell(5)

    @TestParams([dict(k=1), dict(k=2), dict(k=3)])
    def test_biseparable_qubit_in_zero(self, k):
        reduced = partial_trace(bs(k).density_matrix(), [k - 1])
        self.assertMatrixClose(np.diag([1, 0]), reduced.mat)

    def test_w_wbar_is_normalized_sum(self):
        psi = w_wbar()
        self.assertDeltaWithin(1 / np.sqrt(6), abs(psi.amp[1]), 1e-12)
        self.assertDeltaWithin(0.0, abs(psi.amp[0]), 1e-12)

    def test_s2(self):
        self.assertMatrixClose(np.array([1, 0, 1, 0]) / np.sqrt(2), s2().amp)

    def test_e_family(self):
        psi = e_n(15)
        self.assertDeltaWithin(abs(psi.overlap(bell(1))), 1.0, 1e-12)
        with self.assertRaises(InvalidStateError):
            e_n(31)

    def test_e_theta(self):
        self.assertDeltaWithin(1.0, abs(e_theta(7 * np.pi / 30).overlap(e_n(7))), 1e-12)
        self.assertDeltaWithin(1.0, abs(e_theta(0).amp[0]), 1e-12)
        with self.assertRaises(InvalidStateError):
            e_theta(-0.5)

    def test_from_name(self):
        self.assertDeltaWithin(1.0, abs(from_name("GHZ").overlap(ghz())), 1e-12)
        self.assertDeltaWithin(1.0, abs(from_name("e5").overlap(e_n(5))), 1e-12)
        self.assertEqual((2, 3), from_name("qubit_qutrit", alpha=0.1, gamma=0.6).dims)
        self.assertIn("e14", catalog_names())
        self.assertIn("ncc_sigma", catalog_names())
        with self.assertRaises(ConfigError):
            from_name("horodecki")
        with self.assertRaises(ConfigError):
            from_name("nope")


class TestGenericState(QcorrTestCase):
    def test_validation(self):
        with self.assertRaises(InvalidStateError):
            GenericParams(1.0, 1.0)
        with self.assertRaises(InvalidStateError):
            GenericParams(-1.0)
        with self.assertRaises(InvalidStateError):
            GenericParams(1.0, theta=4.0)

    def test_amplitudes(self):
        p = GenericParams(0.6, 0.8, theta=np.pi / 2)
        psi = generic(p)
        self.assertDeltaWithin(0.6, psi.amp[0].real, 1e-12)
        self.assertDeltaWithin(0.8, psi.amp[4].imag, 1e-12)

    def test_random_params_are_valid(self):
        rng = make_rng(7)
        for _ in range(50):
            p = GenericParams.random(rng)
            self.assertDeltaWithin(1.0, float(np.sum(p.a ** 2)), 1e-12)
            again = GenericParams.from_dict(p.to_dict())
            self.assertMatrixClose(p.a, again.a)


class TestMixedFamilies(QcorrTestCase):
    def test_qubit_qutrit_validation(self):
        with self.assertRaises(InvalidStateError):
            TwoParamQubitQutrit(0.5, 0.5)
        p = TwoParamQubitQutrit(0.5, 0.5, validate=False)
        self.assertLess(p.beta, 0)
        self.assertTrue(TwoParamQubitQutrit(0.1, 0.6).entangled)
        self.assertFalse(TwoParamQubitQutrit(0.1, 0.2).entangled)
        rho = qubit_qutrit(TwoParamQubitQutrit(0.1, 0.6))
        self.assertDeltaWithin(1.0, np.trace(rho.mat).real, 1e-12)

    @TestParams([dict(b=0.0), dict(b=0.04), dict(b=0.2), dict(b=0.5), dict(b=1.0)])
    def test_horodecki_two_constructions_agree(self, b):
        self.assertMatrixClose(horodecki_b(b).mat, horodecki_b_mixture(b).mat, atol=1e-12)
        weights = [w_ for w_, _ in horodecki_b_components(b)]
        self.assertDeltaWithin(1.0, sum(weights), 1e-12)

    def test_horodecki_range(self):
        with self.assertRaises(InvalidStateError):
            horodecki_b(1.5)

    def test_ncc_sigma(self):
        rho = ncc_sigma()
        self.assertDeltaWithin(0.5, rho.purity(), 1e-12)
        self.assertEqual((2, 2), rho.dims)

    def test_pseudo_pure(self):
        rho = pseudo_pure(ghz(), 0.9)
        self.assertDeltaWithin(0.9 + 0.1 / 8, rho.eigvalsh()[-1], 1e-12)
        with self.assertRaises(InvalidStateError):
            pseudo_pure(ghz(), 1.1)


class TestRandomAndChannels(QcorrTestCase):
    def test_haar_is_seeded(self):
        a = haar_random_pure(3, seed=42)
        b = haar_random_pure(3, seed=42)
        c = haar_random_pure(3, seed=43)
        self.assertMatrixClose(a.amp, b.amp, atol=0)
        self.assertLess(abs(a.overlap(c)), 1 - 1e-6)
        self.assertEqual((2, 3), haar_random_pure(0, seed=1, dims=(2, 3)).dims)

    def test_dephase(self):
        rho = bell(1).density_matrix()
        self.assertMatrixClose(rho.mat, dephase(rho, 0, 0.0).mat)
        full = dephase(rho, 0, 1.0)
        self.assertMatrixClose(np.diag([0.5, 0, 0, 0.5]), full.mat)
        half = dephase(rho, 1, 0.5)
        self.assertDeltaWithin(0.25, half.mat[0, 3].real, 1e-12)
        with self.assertRaises(InvalidStateError):
            dephase(rho, 0, 1.5)
        with self.assertRaises(DimensionError):
            dephase(qubit_qutrit(TwoParamQubitQutrit(0.1, 0.6)), 1, 0.5)

    def test_dephase_accepts_pure_state(self):
        rho = dephase(PureState([1, 1], normalize=True), 0, 1.0)
        self.assertMatrixClose(np.eye(2) / 2, rho.mat)

    def test_w_is_symmetric(self):
        amp = w().amp
        self.assertMatrixClose(np.full(3, 1 / np.sqrt(3)), amp[[1, 2, 4]].real)


if __name__ == '__main__':
    unittest.main()
