from __future__ import annotations

import os
import tempfile
import unittest

import numpy as np

from qcorr.circuits import (
    GELL_MANN, PAULI, MappingRegistry, ProductObservable, all_pauli_words, cnot, controlled_hadamard,
    default_registry, derive_word, expectation_via_mapping, parse_token, pauli_word, pauli_word_from_index,
    pauli_word_index, product_unitary, pulse, rotation, rz, swap, synthesize, z_rotation_composite
)
from qcorr.circuits.gates import Gate
from qcorr.circuits.mapping import TWO_QUBIT_TABLE
from qcorr.exceptions import DimensionError, MappingMismatchError, UnregisteredObservableError
from qcorr.linalg import kron
from qcorr.states import basis_state, bell, ghz

from tests.integrated.base import QcorrTestCase, TestParams
from tests.integrated.helpers import random_mixed, random_pure_states


class TestGates(QcorrTestCase):
    def test_rejects_non_unitary(self):
        with self.assertRaises(ValueError):
            Gate(np.diag([1.0, 2.0]))
        with self.assertRaises(DimensionError):
            Gate(np.eye(3))

    def test_rotation_axes(self):
        self.assertMatrixClose(-1j * PAULI["X"], rotation(0, np.pi, 0, 1).unitary)
        self.assertMatrixClose(-1j * PAULI["Y"], rotation(np.pi / 2, np.pi, 0, 1).unitary)
        half = rotation(0, np.pi / 2, 1, 2).unitary
        self.assertMatrixClose(kron(np.eye(2), (np.eye(2) - 1j * PAULI["X"]) / np.sqrt(2)), half)

    def test_cnot_truth_table(self):
        u = cnot(0, 1, 2).unitary
        for bits, flipped in (("00", "00"), ("01", "01"), ("10", "11"), ("11", "10")):
            self.assertMatrixClose(basis_state(flipped).amp, u @ basis_state(bits).amp)

    def test_controlled_hadamard(self):
        u = controlled_hadamard(0, 1, 2).unitary
        out = u @ basis_state("10").amp
        self.assertMatrixClose(np.array([0, 0, 1, 1]) / np.sqrt(2), out)
        self.assertMatrixClose(basis_state("01").amp, u @ basis_state("01").amp)

    def test_swap(self):
        u = swap(0, 2, 3).unitary
        self.assertMatrixClose(basis_state("001").amp, u @ basis_state("100").amp)

    def test_pulse_rotates_z_to_minus_y(self):
        psi = basis_state("0").evolve(pulse("X", 0, 1).unitary)
        self.assertDeltaWithin(-1.0, psi.expectation(PAULI["Y"]), 1e-12)

    def test_composite_z_rotation(self):
        angle = 0.7
        self.assertMatrixClose(rz(angle, 1, 2).unitary, z_rotation_composite(angle, 1, 2).unitary)

    def test_parse_token(self):
        self.assertEqual("CNOT12", parse_token("CNOT", 3).label)
        self.assertEqual("Ybar3", parse_token("Ybar3", 3).label)
        self.assertEqual("CH21", parse_token("CH21", 2).label)
        with self.assertRaises(ValueError):
            parse_token("Q1", 2)
        with self.assertRaises(DimensionError):
            parse_token("X3", 2)

    def test_product_order(self):
        # rightmost acts first
        u = product_unitary(["CNOT12", "X1"], 2)
        self.assertMatrixClose(cnot(0, 1, 2).unitary @ pulse("X", 0, 2).unitary, u)

    def test_then(self):
        g = pulse("X", 0, 1).then(pulse("Xbar", 0, 1))
        self.assertMatrixClose(np.eye(2), g.unitary)


class TestProductObservable(QcorrTestCase):
    def test_pauli_word(self):
        obs = pauli_word("xz")
        self.assertEqual("XZ", obs.word)
        self.assertTrue(obs.is_pauli_word)
        self.assertMatrixClose(kron(PAULI["X"], PAULI["Z"]), obs.matrix())
        self.assertDeltaWithin(0.0, obs.trace(), 1e-12)
        with self.assertRaises(ValueError):
            pauli_word("XQ")

    def test_qubit_qutrit_factors(self):
        obs = ProductObservable(["X", "L1"])
        self.assertEqual((2, 3), obs.dims)
        self.assertEqual("X.L1", obs.word)
        self.assertFalse(obs.is_pauli_word)
        self.assertMatrixClose(kron(PAULI["X"], GELL_MANN["L1"]), obs.matrix())
        identity = ProductObservable(["I", "L8"], dims=(2, 3))
        self.assertEqual((1,), identity.support)

    def test_rejects_mismatched_state(self):
        with self.assertRaises(DimensionError):
            pauli_word("XXX").expectation(bell(1))
        with self.assertRaises(DimensionError):
            ProductObservable(["X", "L1"], dims=(2, 2))

    def test_matrix_factors(self):
        rotated = (PAULI["X"] + PAULI["Z"]) / np.sqrt(2)
        obs = ProductObservable([rotated, "Z"])
        self.assertEqual("MZ", obs.word)
        self.assertEqual(obs, ProductObservable.from_dict(obs.to_dict()))
        with self.assertRaises(ValueError):
            ProductObservable([[[0, 1], [0, 0]], "Z"])

    def test_scaled(self):
        obs = pauli_word("ZZ").scaled(0.5)
        self.assertDeltaWithin(0.5, obs.expectation(bell(1)), 1e-12)

    def test_word_index(self):
        self.assertEqual(27, pauli_word_index("XYZ"))
        self.assertEqual("XYZ", pauli_word_from_index(27, 3))
        self.assertEqual(15, len(all_pauli_words(2)))
        self.assertEqual("II", all_pauli_words(2, include_identity=True)[0])
        with self.assertRaises(ValueError):
            pauli_word_from_index(64, 3)


class TestMapping(QcorrTestCase):
    def test_known_rows(self):
        self.assertEqual(("ZZ", 1), derive_word(["CNOT"], 1, 2))
        self.assertEqual(("ZI", 1), derive_word(["I"], 0, 2))
        self.assertEqual(("IZ", 1), derive_word(["I"], 1, 2))

    def test_non_clifford_sequence(self):
        with self.assertRaises(MappingMismatchError):
            derive_word(["CH12"], 1, 2)

    @TestParams([dict(word=w) for w in ("X", "XY", "YZI", "XXX", "IYX", "ZZZ")])
    def test_synthesize(self, word):
        gates, readout = synthesize(word)
        self.assertEqual((word, 1), derive_word(gates, readout, len(word)))

    def test_synthesize_identity(self):
        with self.assertRaises(ValueError):
            synthesize("II")

    @TestParams([dict(n=2), dict(n=3)])
    def test_registry_covers_every_word(self, n):
        registry = default_registry(n)
        self.assertEqual(4 ** n - 1, len(registry))
        for word in all_pauli_words(n):
            self.assertIn(word, registry)

    def test_flagged_rows(self):
        registry = default_registry(2)
        self.assertEqual(len(TWO_QUBIT_TABLE), len(registry.table_entries))
        for entry in registry.flagged:
            self.assertTrue(entry.printed_mismatch or entry.sign < 0)

    @TestParams([dict(n=2, count=100), dict(n=3, count=20)], long_running_params=[dict(n=3, count=100)])
    def test_mapped_magnetization_matches_direct(self, n, count):
        states = random_pure_states(n, count)
        registry = default_registry(n)
        for entry in list(registry.table_entries) + list(registry):
            for psi in states:
                self.assertDeltaWithin(entry.observable.expectation(psi), entry.sign * entry.mapped_magnetization(psi),
                                       1e-9, entry.label)

    def test_expectation_via_mapping(self):
        rho = random_mixed((2, 2, 2))
        value = expectation_via_mapping(rho, pauli_word("XYZ", 2.0), verify=True)
        self.assertDeltaWithin(2 * pauli_word("XYZ").expectation(rho), value, 1e-9)
        self.assertDeltaWithin(1.0, expectation_via_mapping(ghz(), pauli_word("XXX")), 1e-9)

    def test_unregistered(self):
        registry = default_registry(2)
        with self.assertRaises(UnregisteredObservableError):
            registry.lookup(ProductObservable(["X", "L1"]))
        with self.assertRaises(UnregisteredObservableError):
            default_registry(4)

    def test_dump_and_load(self):
        registry = default_registry(2)
        with tempfile.TemporaryDirectory() as tmp:
            filename = os.path.join(tmp, "mapping.json")
            registry.dump(filename)
            loaded = MappingRegistry.load(filename)
        self.assertEqual(len(registry), len(loaded))
        self.assertEqual(len(registry.flagged), len(loaded.flagged))
        entry = loaded.lookup(pauli_word("ZZ"))
        self.assertEqual(registry.lookup(pauli_word("ZZ")).gates, entry.gates)


if __name__ == '__main__':
    unittest.main()
