from __future__ import annotations

import unittest

import numpy as np

from qcorr.boundent import (
    b_expectations, closed_form_value, detect, detection_threshold, inequality_value, parse_sweep, sweep
)
from qcorr.exceptions import DimensionError, SolverError
from qcorr.states import bell

from tests.integrated.base import QcorrTestCase, TestParams


class TestBoundEntanglement(QcorrTestCase):
    @TestParams([
        dict(b=0.04, expected=2.3113),
        dict(b=0.08, expected=1.8677),
        dict(b=0.12, expected=1.5574),
        dict(b=0.16, expected=1.3275),
        dict(b=0.20, expected=1.1498),
    ])
    def test_tabulated_values(self, b, expected):
        report = detect(b)
        self.assertDeltaWithin(expected, report.inequality_value, 1e-4)
        self.assertDeltaWithin(closed_form_value(b), report.inequality_value, 1e-9)
        self.assertTrue(report.violated)
        self.assertTrue(report.ppt)
        self.assertTrue(report.bound_entangled)
        self.assertDeltaWithin(0.0, report.negativity, 1e-9)

    def test_threshold(self):
        self.assertDeltaWithin(1 / np.sqrt(17), detection_threshold(), 1e-9)
        self.assertDeltaWithin(1.0, closed_form_value(1 / np.sqrt(17)), 1e-12)
        with self.assertRaises(SolverError):
            detection_threshold(0.3, 0.5)

    def test_above_threshold_not_violated(self):
        report = detect(0.3)
        self.assertFalse(report.violated)
        self.assertFalse(report.bound_entangled)
        self.assertTrue(report.ppt)

    def test_family_endpoints_are_not_bound_entangled(self):
        start = detect(0.0)
        self.assertTrue(start.violated)
        self.assertFalse(start.bound_entangled)
        self.assertFalse(detect(1.0).violated)

    def test_inequality_value(self):
        self.assertDeltaWithin(0.6, inequality_value(0.1, 0.2, 0.3), 1e-12)
        self.assertDeltaWithin(0.6, inequality_value(-0.1, 0.2, -0.3), 1e-12)
        self.assertDeltaWithin(3.0, inequality_value(1, -1, 1), 1e-12)

    def test_expectations_need_three_qubits(self):
        with self.assertRaises(DimensionError):
            b_expectations(bell(1))

    def test_report_dict(self):
        data = detect(0.12).to_dict()
        self.assertEqual({"b", "B1", "B2", "B3", "inequality_value", "violated", "ppt_min_eig", "negativity",
                          "bound_entangled"}, set(data))
        self.assertTrue(data["bound_entangled"])


class TestSweep(QcorrTestCase):
    def test_parse(self):
        self.assertMatrixClose([0.04, 0.08, 0.12, 0.16, 0.2], parse_sweep("0.04:0.2:0.04"))
        self.assertEqual([0.5], parse_sweep("0.5:0.5:0.1"))
        for bad in ("0.1:0.2", "a:b:c", "0.1:0.2:0", "0.1:0.2:-0.1"):
            with self.assertRaises(ValueError):
                parse_sweep(bad)

    def test_sweep_keeps_order(self):
        bs = parse_sweep("0.04:0.2:0.04")
        reports = sweep(bs, workers=2)
        self.assertEqual(bs, [r.b for r in reports])
        values = [r.inequality_value for r in reports]
        self.assertEqual(sorted(values, reverse=True), values)


if __name__ == '__main__':
    unittest.main()
