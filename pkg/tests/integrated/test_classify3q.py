from __future__ import annotations

import itertools
import unittest

import numpy as np

from qcorr.classify3q import (
    ClassificationVerdict, EntanglementClass, classify_decision_table, classify_general, classify_random,
    concurrences, decision_observables, mixedness_error, tangle_from_observable
)
from qcorr.exceptions import ClassificationError, DimensionError
from qcorr.linalg import PureState
from qcorr.measures import three_tangle
from qcorr.states import (
    GenericParams, basis_state, bell, bs, generic, ghz, make_rng, pseudo_pure, random_local_unitary, sep, w, w_wbar
)

from tests.integrated.base import QcorrTestCase, TestParams
from tests.integrated.helpers import random_pure_states

CATALOG = [
    dict(name="ghz", state=ghz, expected=EntanglementClass.ghz),
    dict(name="w", state=w, expected=EntanglementClass.w),
    dict(name="bs1", state=lambda: bs(1), expected=EntanglementClass.bs1),
    dict(name="bs2", state=lambda: bs(2), expected=EntanglementClass.bs2),
    dict(name="bs3", state=lambda: bs(3), expected=EntanglementClass.bs3),
    dict(name="sep", state=sep, expected=EntanglementClass.separable),
    dict(name="w_wbar", state=w_wbar, expected=EntanglementClass.ghz),
]


def _permuted(psi: PureState, perm) -> PureState:
    """Qubit perm[i] of ``psi`` becomes qubit i"""
    amp = psi.amp.reshape(2, 2, 2).transpose(perm).reshape(8)
    return PureState(amp, (2, 2, 2))


def _permuted_label(label: EntanglementClass, perm) -> EntanglementClass:
    cut = {EntanglementClass.bs1: 0, EntanglementClass.bs2: 1, EntanglementClass.bs3: 2}.get(label)
    if cut is None:
        return label
    return EntanglementClass.biseparable(list(perm).index(cut) + 1)


def _generic(a, theta=0.0):
    a = np.asarray(a, dtype=float)
    return generic(GenericParams(*(a / np.linalg.norm(a)), theta=theta))


class TestDecisionTable(QcorrTestCase):
    @TestParams(CATALOG)
    def test_catalog(self, name, state, expected):
        verdict = classify_decision_table(state())
        self.assertEqual(expected, verdict.label, name)
        self.assertEqual("decision-table", verdict.method)

    def test_decision_observables_of_w(self):
        obs = decision_observables(w())
        self.assertDeltaWithin(0.0, obs["XXX"], 1e-12)
        for word in ("XXZ", "XZX", "ZXX"):
            self.assertDeltaWithin(2 / 3, obs[word], 1e-12)

    @TestParams([
        dict(a=[0.6, 0, 0, 0, 0.8], expected=EntanglementClass.ghz),
        dict(a=[1, 0, 1, 1, 0], expected=EntanglementClass.w),
        dict(a=[1, 1, 1, 1, 0], expected=EntanglementClass.w),
        dict(a=[1, 0, 0, 1, 0], expected=EntanglementClass.bs3),
        dict(a=[1, 0, 1, 0, 0], expected=EntanglementClass.bs2),
        dict(a=[0, 1, 0, 0, 1], expected=EntanglementClass.bs1),
        dict(a=[0.6, 0.8, 0, 0, 0], expected=EntanglementClass.separable),
    ])
    def test_generic_form_agrees_with_concurrences(self, a, expected):
        psi = _generic(a, theta=0.4)
        self.assertEqual(expected, classify_decision_table(psi).label)
        self.assertEqual(expected, classify_general(psi).label)

    def test_tangle_from_observable(self):
        for params, _, _ in classify_random(20, seed=4):
            psi = generic(params)
            self.assertDeltaWithin(three_tangle(psi), tangle_from_observable(psi), 1e-12)

    def test_rejects_mixed_and_wrong_dims(self):
        with self.assertRaises(ClassificationError):
            classify_decision_table(pseudo_pure(ghz(), 0.5))
        with self.assertRaises(DimensionError):
            classify_decision_table(bell(1))

    def test_pure_density_matrix_accepted(self):
        verdict = classify_decision_table(ghz().density_matrix())
        self.assertEqual(EntanglementClass.ghz, verdict.label)


class TestConcurrenceClassifier(QcorrTestCase):
    @TestParams(CATALOG)
    def test_catalog(self, name, state, expected):
        self.assertEqual(expected, classify_general(state()).label, name)
        self.assertEqual(expected, classify_general(state(), use_pauli=True).label, name)

    def test_random_states_are_ghz(self):
        for psi in random_pure_states(3, 10):
            verdict = classify_general(psi)
            self.assertEqual(EntanglementClass.ghz, verdict.label)
            self.assertTrue(verdict.label.is_genuine)

    @TestParams(CATALOG)
    def test_local_unitary_invariance(self, name, state, expected):
        gen = make_rng(21)
        for trial in range(20):
            psi = state().evolve(random_local_unitary((2, 2, 2), gen))
            self.assertEqual(expected, classify_general(psi).label, f"{name}, trial {trial}")

    @TestParams(CATALOG)
    def test_permutation_equivariance(self, name, state, expected):
        gen = make_rng(22)
        perms = list(itertools.permutations(range(3)))
        for trial in range(20):
            perm = perms[trial % len(perms)]
            psi = _permuted(state().evolve(random_local_unitary((2, 2, 2), gen)), perm)
            self.assertEqual(_permuted_label(expected, perm), classify_general(psi).label, f"{name}, perm {perm}")

    def test_concurrences(self):
        self.assertMatrixClose([0.25, 0.25, 0.25], concurrences(ghz()))
        self.assertMatrixClose([0.0, 0.25, 0.25], concurrences(bs(1)))

    def test_verdict_round_trip(self):
        verdict = classify_general(w())
        again = ClassificationVerdict.from_dict(verdict.to_dict())
        self.assertEqual(verdict, again)
        self.assertEqual("W", verdict.to_dict()["class"])
        self.assertDeltaWithin(verdict.evidence["G1"], again.evidence["G1"], 0)

    def test_class_helpers(self):
        self.assertEqual(EntanglementClass.bs2, EntanglementClass.biseparable(2))
        self.assertEqual(EntanglementClass.separable, EntanglementClass.from_description("Separable"))
        self.assertFalse(EntanglementClass.bs3.is_genuine)
        with self.assertRaises(ValueError):
            EntanglementClass.from_description("GHZ-like")


class TestMixedness(QcorrTestCase):
    def test_pseudo_pure_ghz(self):
        self.assertDeltaWithin(0.1, mixedness_error(pseudo_pure(ghz(), 0.9), "XXX"), 1e-12)

    def test_pure_state_has_no_error(self):
        self.assertDeltaWithin(0.0, mixedness_error(ghz(), "XXX"), 1e-12)

    def test_vanishing_dominant_expectation(self):
        with self.assertRaises(ClassificationError):
            mixedness_error(basis_state("000"), "XXX")

    def test_random_rows(self):
        rows = classify_random(5, seed=2)
        self.assertEqual(5, len(rows))
        for params, table, general in rows:
            self.assertIsInstance(params, GenericParams)
            self.assertEqual("decision-table", table.method)
            self.assertEqual("concurrence", general.method)


if __name__ == '__main__':
    unittest.main()
