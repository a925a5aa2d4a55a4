from __future__ import annotations

import csv
import json
import os
import tempfile
import unittest

from qcorr.cli.config import SEED_MAX, RunConfig, load_state_file
from qcorr.cli.main import EXIT_ERROR, EXIT_OK, EXIT_TOLERANCE, _module_tag, build_parser, main, run
from qcorr.cli.output import (
    CsvOutputStrategy, JsonOutputStrategy, Report, load_fixture, load_schema, strategy_for, validate_report
)
from qcorr.cli.reproduce import DEFAULT_TOLERANCES, TABLE_IDS, reproduce
from qcorr.exceptions import ConfigError
from qcorr.linalg import DensityMatrix, PureState
from qcorr.states import bell, from_name

from tests.integrated.base import QcorrTestCase


class CliTestCase(QcorrTestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)

    def path(self, name: str) -> str:
        return os.path.join(self._tmp.name, name)

    def run_json(self, *argv, expected_code=EXIT_OK) -> dict:
        out = self.path("out.json")
        code = main(list(argv) + ["--out", out])
        self.assertEqual(expected_code, code)
        with open(out) as f:
            return json.load(f)


class TestRunConfig(QcorrTestCase):
    def test_validation(self):
        with self.assertRaises(ConfigError):
            RunConfig("state", seed=SEED_MAX + 1)
        with self.assertRaises(ConfigError):
            RunConfig("state", seed=-1)
        with self.assertRaises(ConfigError):
            RunConfig("state", fmt="xml")
        with self.assertRaises(ConfigError):
            RunConfig("reproduce", samples=0)
        with self.assertRaises(ConfigError):
            RunConfig("state", random=0)

    def test_exactly_one_state_source(self):
        with self.assertRaises(ConfigError):
            RunConfig("measure").load_state()
        with self.assertRaises(ConfigError):
            RunConfig("measure", state="ghz", random=3).load_state()

    def test_random_state_label(self):
        cfg = RunConfig("measure", random=2, seed=7)
        self.assertEqual("haar2:7", cfg.state_label)
        self.assertEqual((2, 2), cfg.load_state().dims)

    def test_family_parameters_pass_through(self):
        rho = RunConfig("measure", state="qubit_qutrit", alpha=0.1, gamma=0.6).load_state()
        self.assertEqual((2, 3), rho.dims)

    def test_from_namespace(self):
        args = build_parser().parse_args(["witness", "--state", "bell1", "--ops", "XX,ZZ", "--format", "csv"])
        cfg = RunConfig.from_namespace(args)
        self.assertEqual("csv", cfg.fmt)
        self.assertEqual("XX,ZZ", cfg.extra["ops"])
        self.assertEqual(8, cfg.extra["max_rounds"])


class TestStateFiles(CliTestCase):
    def _dump(self, data) -> str:
        filename = self.path("state.json")
        with open(filename, "w") as f:
            json.dump(data, f)
        return filename

    def test_density_matrix_file(self):
        rho = load_state_file(self._dump(bell(1).density_matrix().to_dict()))
        self.assertIsInstance(rho, DensityMatrix)
        self.assertEqual(bell(1).density_matrix(), rho)

    def test_pure_state_file_without_imaginary_part(self):
        psi = load_state_file(self._dump({"re": [0.6, 0.0, 0.0, 0.8]}))
        self.assertIsInstance(psi, PureState)
        self.assertEqual((2, 2), psi.dims)

    def test_bad_files(self):
        with self.assertRaises(ConfigError):
            load_state_file(self.path("missing.json"))
        with self.assertRaises(ConfigError):
            load_state_file(self._dump([1, 2, 3]))
        filename = self.path("broken.json")
        with open(filename, "w") as f:
            f.write("{not json")
        with self.assertRaises(ConfigError):
            load_state_file(filename)


class TestOutput(CliTestCase):
    def test_schema_validation(self):
        report = Report("measure", [{"negativity": 0.5}], seed=3, tol=1e-6)
        validate_report(report.to_dict())
        data = report.to_dict()
        del data["meta"]
        with self.assertRaises(ConfigError):
            validate_report(data)
        data = report.to_dict()
        data["meta"]["seed"] = True
        with self.assertRaises(ConfigError):
            validate_report(data)
        self.assertIn("rows", load_schema()["required"])

    def test_json_strategy(self):
        report = Report("measure", [{"value": 1 + 2j, "flag": True}])
        data = json.loads(JsonOutputStrategy().dumps(report))
        self.assertEqual({"re": 1.0, "im": 2.0}, data["rows"][0]["value"])
        self.assertIsNone(data["table_id"])

    def test_csv_strategy(self):
        report = Report("state", [{"a": 1, "b": [1, 2]}, {"a": 2, "c": "x"}])
        filename = self.path("out.csv")
        CsvOutputStrategy().write(filename, report)
        with open(filename) as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(["a", "b", "c"], list(rows[0]))
        self.assertEqual("[1, 2]", rows[0]["b"])
        self.assertEqual("", rows[1]["b"])

    def test_strategy_lookup(self):
        self.assertEqual(".csv", strategy_for("CSV").file_extension)
        with self.assertRaises(ConfigError):
            strategy_for("xml")

    def test_fixtures(self):
        rows = load_fixture("table_ch5")
        self.assertEqual(5, len(rows))
        self.assertDeltaWithin(0.08, rows[1]["b"], 1e-12)
        self.assertEqual("sigma_b2", rows[1]["state"])


class TestReproduce(QcorrTestCase):
    def test_table_ids(self):
        self.assertEqual(set(DEFAULT_TOLERANCES), set(TABLE_IDS))
        with self.assertRaises(ConfigError):
            reproduce("table-99")

    def test_bound_entanglement_table(self):
        report = reproduce("table-ch5")
        self.assertTrue(report.ok)
        documented = [r for r in report.rows if r.get("documented")]
        self.assertEqual(["sigma_b2"], [r["state"] for r in documented])
        self.assertFalse(reproduce("table-ch5", tol=1e-9).ok)

    def test_three_qubit_tables(self):
        for table_id in ("result-table", "result-table-1"):
            report = reproduce(table_id)
            self.assertTrue(report.ok, table_id)
            self.assertTrue(all(r["class_ok"] for r in report.rows))

    def test_negativity_table(self):
        report = reproduce("negTab")
        self.assertTrue(report.ok, report.breaches)
        self.assertEqual(len(load_fixture("negtab")), len(report.rows))

    def test_dynamics_and_mappings(self):
        for table_id in ("mv-dynamics", "mapping-tables", "npa-verdicts"):
            report = reproduce(table_id)
            self.assertTrue(report.ok, f"{table_id}: {report.breaches}")

    def test_detection_fractions(self):
        report = reproduce("fig-fractions", seed=1, samples=20000)
        self.assertTrue(report.ok, report.breaches)
        self.assertEqual([1, 2, 3, 4], [row["size"] for row in report.rows[:4]])
        self.assertEqual("sdp", report.rows[2]["witness"])


class TestMain(CliTestCase):
    def test_measure(self):
        data = self.run_json("measure", "--state", "bell1")
        row = data["rows"][0]
        self.assertEqual("measure", data["command"])
        self.assertDeltaWithin(0.5, row["negativity"], 1e-9)
        self.assertFalse(row["ppt"])
        self.assertDeltaWithin(1.0, row["discord_A"], 1e-6)

    def test_run_dispatches_without_writing(self):
        cfg = RunConfig.from_namespace(build_parser().parse_args(["measure", "--state", "ghz"]))
        reports = run(cfg)
        self.assertEqual(1, len(reports))
        row = reports[0].rows[0]
        self.assertDeltaWithin(0.5, row["negativity"], 1e-9)
        self.assertDeltaWithin(1.0, row["tau"], 1e-9)
        self.assertDeltaWithin(0.25, row["G1"], 1e-9)
        self.assertEqual("GHZ", row["class"])

    def test_measure_classifies_three_qubit_pure_states(self):
        data = self.run_json("measure", "--state", "w")
        self.assertEqual("W", data["rows"][0]["class"])

    def test_state_list_as_csv(self):
        out = self.path("names.csv")
        self.assertEqual(EXIT_OK, main(["state", "--list", "--format", "csv", "--out", out]))
        with open(out) as f:
            names = [row["name"] for row in csv.DictReader(f)]
        self.assertIn("ghz", names)

    def test_witness_with_given_operators(self):
        row = self.run_json("witness", "--state", "bell2", "--ops", "XX,YY,ZZ")["rows"][0]
        self.assertTrue(row["detected"])
        self.assertDeltaWithin(-0.5, row["min_ctm"], 1e-5)

    def test_ncc_single_point(self):
        row = self.run_json("ncc", "--lam", "0")["rows"][0]
        self.assertDeltaWithin(-0.067862, row["mv"], 1e-6)
        self.assertDeltaWithin(row["mv"], row["mv_circuit"], 1e-12)

    def test_classify_random(self):
        data = self.run_json("classify", "--random", "3", "--seed", "5")
        self.assertEqual(3, len(data["rows"]))
        self.assertEqual(5, data["meta"]["seed"])

    def test_boundent(self):
        rows = self.run_json("boundent", "--sweep", "0.04:0.08:0.04")["rows"]
        self.assertEqual([0.04, 0.08], [r["b"] for r in rows])
        self.assertEqual(EXIT_ERROR, main(["boundent"]))

    def test_npa(self):
        row = self.run_json("npa", "--state", "w", "--settings", "w")["rows"][0]
        self.assertEqual("infeasible", row["verdict"])
        self.assertEqual(EXIT_ERROR, main(["npa", "--state", "w", "--settings", self.path("none.json")]))

    def test_mapping(self):
        rows = self.run_json("mapping", "--qubits", "2")["rows"]
        self.assertTrue(all(r["n_qubits"] == 2 for r in rows))
        row = self.run_json("mapping", "--qubits", "3", "--word", "XXX", "--state", "ghz")["rows"][0]
        self.assertDeltaWithin(1.0, row["expectation"], 1e-9)

    def test_reproduce_exit_codes(self):
        self.assertEqual("table-ch5", self.run_json("reproduce", "table-ch5")["table_id"])
        self.run_json("reproduce", "table-ch5", "--tol", "1e-9", expected_code=EXIT_TOLERANCE)

    def test_errors(self):
        self.assertEqual(EXIT_ERROR, main(["measure"]))
        self.assertEqual(EXIT_ERROR, main(["measure", "--state", "nope"]))
        self.assertEqual(EXIT_ERROR, main(["measure", "--state", "bell1", "--seed", "-1"]))
        with self.assertRaises(SystemExit):
            main(["teleport"])

    def test_module_tag(self):
        try:
            from_name("nope")
        except ConfigError as e:
            self.assertEqual("states", _module_tag(e))
        self.assertEqual("cli", _module_tag(ConfigError("no traceback")))


if __name__ == '__main__':
    unittest.main()
