from __future__ import annotations

import unittest

import numpy as np

from qcorr.exceptions import DimensionError
from qcorr.linalg import DensityMatrix
from qcorr.measures import (
    ccnr, concurrence_sq, conditional_entropy, discord, discord_grid, fidelity, g_pauli, g_pauli_terms,
    majorization_check, negativity, ppt_check, reduced_purity, three_tangle, von_neumann_entropy
)
from qcorr.measures.discord import DiscordResult
from qcorr.states import (
    TwoParamQubitQutrit, bell, bs, e_n, ghz, horodecki_b, make_rng, ncc_sigma, qubit_qutrit, random_local_unitary, s1,
    s2, sep, w, w_wbar
)

from tests.integrated.base import QcorrTestCase, TestParams
from tests.integrated.helpers import random_mixed, random_pure_states, random_separables


class TestEntanglementMeasures(QcorrTestCase):
    @TestParams([dict(n=n) for n in range(1, 15)])
    def test_negativity_of_e_family(self, n):
        self.assertDeltaWithin(np.sin(n * np.pi / 30) / 2, negativity(e_n(n)), 1e-10)

    @TestParams([dict(k=k) for k in range(1, 5)])
    def test_bell_negativity(self, k):
        self.assertDeltaWithin(0.5, negativity(bell(k)), 1e-10)
        self.assertDeltaWithin(0.5, negativity(bell(k), cut=1), 1e-10)

    def test_separable_states_are_ppt(self):
        for rho in [s1(), s2()] + random_separables((2, 3), 5):
            ppt, min_eig = ppt_check(rho)
            self.assertTrue(ppt)
            self.assertGreaterEqual(min_eig, -1e-9)
            self.assertDeltaWithin(0.0, negativity(rho), 1e-9)

    def test_qubit_qutrit_negativity(self):
        ppt, min_eig = ppt_check(qubit_qutrit(TwoParamQubitQutrit(0.1, 0.6)))
        self.assertFalse(ppt)
        # (1 - 2 alpha - 2 gamma) / 2
        self.assertDeltaWithin(-0.2, min_eig, 1e-10)

    @TestParams([dict(b=0.04), dict(b=0.2), dict(b=0.5)])
    def test_horodecki_is_ppt(self, b):
        ppt, _ = ppt_check(horodecki_b(b), 0)
        self.assertTrue(ppt)

    def test_ccnr(self):
        total, entangled = ccnr(bell(1))
        self.assertDeltaWithin(2.0, total, 1e-10)
        self.assertTrue(entangled)
        total, entangled = ccnr(s2())
        self.assertDeltaWithin(1.0, total, 1e-10)
        self.assertFalse(entangled)
        with self.assertRaises(DimensionError):
            ccnr(bell(1), split=2)

    def test_majorization(self):
        self.assertFalse(majorization_check(bell(1)))
        for rho in random_separables((2, 2), 5, seed=3):
            self.assertTrue(majorization_check(rho))

    def test_fidelity(self):
        self.assertDeltaWithin(0.0, fidelity(bell(1), bell(2)), 1e-10)
        self.assertDeltaWithin(1.0, fidelity(ghz(), ghz()), 1e-10)
        mixed = DensityMatrix.maximally_mixed((2, 2))
        self.assertDeltaWithin(0.25, fidelity(bell(3), mixed), 1e-10)
        with self.assertRaises(DimensionError):
            fidelity(bell(1), ghz())

    def test_entropies(self):
        self.assertDeltaWithin(2.0, von_neumann_entropy(DensityMatrix.maximally_mixed((2, 2))), 1e-12)
        self.assertDeltaWithin(0.0, von_neumann_entropy(ghz()), 1e-10)
        self.assertDeltaWithin(0.5, reduced_purity(bell(1), 0), 1e-12)
        self.assertDeltaWithin(1.0, reduced_purity(bs(1), [0]), 1e-12)


class TestThreeQubitInvariants(QcorrTestCase):
    def test_ghz_and_w(self):
        for l in (1, 2, 3):
            self.assertDeltaWithin(0.25, concurrence_sq(ghz(), l), 1e-12)
            self.assertDeltaWithin(2 / 9, concurrence_sq(w(), l), 1e-12)
        self.assertDeltaWithin(1.0, three_tangle(ghz()), 1e-12)
        self.assertDeltaWithin(0.0, three_tangle(w()), 1e-12)
        self.assertDeltaWithin(1 / 3, three_tangle(w_wbar()), 1e-12)

    @TestParams([dict(k=1), dict(k=2), dict(k=3)])
    def test_biseparable(self, k):
        g = [concurrence_sq(bs(k), l) for l in (1, 2, 3)]
        for l in (1, 2, 3):
            self.assertDeltaWithin(0.0 if l == k else 0.25, g[l - 1], 1e-12)
        self.assertDeltaWithin(0.0, three_tangle(bs(k)), 1e-12)

    def test_separable(self):
        self.assertDeltaWithin(0.0, max(concurrence_sq(sep(), l) for l in (1, 2, 3)), 1e-12)

    def test_pauli_form_matches_amplitudes(self):
        for psi in random_pure_states(3, 1000):
            for l in (1, 2, 3):
                self.assertDeltaWithin(concurrence_sq(psi, l), g_pauli(psi, l), 1e-10)

    def test_pauli_terms(self):
        terms = g_pauli_terms(1)
        self.assertEqual(15, len(terms))
        self.assertEqual(-3, terms["XII"])
        self.assertEqual(-3, g_pauli_terms(3)["IIX"])
        with self.assertRaises(ValueError):
            g_pauli_terms(4)

    def test_rejects_two_qubits(self):
        with self.assertRaises(DimensionError):
            concurrence_sq(bell(1), 1)


class TestDiscord(QcorrTestCase):
    def test_bell(self):
        for side in ("A", "B"):
            result = discord(bell(1), side=side)
            self.assertDeltaWithin(1.0, result.discord, 1e-6)
            self.assertDeltaWithin(2.0, result.mutual_info, 1e-9)

    def test_classical_states(self):
        rho = DensityMatrix(np.diag([0.4, 0.1, 0.2, 0.3]))
        for side in ("A", "B"):
            self.assertDeltaWithin(0.0, discord(rho, side=side).discord, 1e-6)

    def test_ncc_sigma_one_way(self):
        rho = ncc_sigma()
        # classical on A, not on B
        self.assertDeltaWithin(0.0, discord(rho, side="A").discord, 1e-6)
        self.assertGreater(discord(rho, side="B").discord, 1e-3)

    def test_grid_oracle(self):
        rho = random_separables((2, 2), 1, seed=11)[0]
        refined = discord(rho, side="B")
        grid = discord_grid(rho, side="B")
        self.assertLessEqual(refined.discord, grid.discord + 1e-6)
        self.assertDeltaWithin(grid.discord, refined.discord, 1e-3)

    @TestParams([dict(n_unitaries=2)], long_running_params=[dict(n_unitaries=10)])
    def test_local_unitary_invariance(self, n_unitaries):
        gen = make_rng(17)
        for seed in range(5):
            rho = random_mixed((2, 2), seed=seed)
            reference = {side: discord(rho, side=side).discord for side in ("A", "B")}
            for _ in range(n_unitaries):
                rotated = rho.evolve(random_local_unitary((2, 2), gen))
                for side in ("A", "B"):
                    self.assertDeltaWithin(reference[side], discord(rotated, side=side).discord, 1e-6,
                                           f"seed {seed}, side {side}")

    def test_conditional_entropy_bounds(self):
        value = conditional_entropy(bell(1), 0.3, 1.1)
        self.assertDeltaWithin(0.0, value, 1e-9)

    def test_result_dict(self):
        result = discord(bell(2))
        again = DiscordResult.from_dict(result.to_dict())
        self.assertEqual(result.side, again.side)
        self.assertDeltaWithin(result.discord, again.discord, 0)

    def test_rejects_bad_side(self):
        with self.assertRaises(ValueError):
            discord(bell(1), side="C")


if __name__ == '__main__':
    unittest.main()
