"""
Recomputes the theory column of each published table and reports the absolute deltas.

Every table is deterministic for a given seed. A row breaches when its delta exceeds the table's tolerance,
except for rows listed as documented discrepancies.
"""
from __future__ import annotations

import logging
from typing import Callable, Dict, List

import numpy as np

from qcorr import boundent, npa
from qcorr.circuits.mapping import default_registry
from qcorr.circuits.observables import pauli_word
from qcorr.classify3q import EntanglementClass, classify_decision_table, classify_general, concurrences, \
    decision_observables
from qcorr.cli.output import Report, load_fixture
from qcorr.exceptions import ConfigError
from qcorr.measures.entanglement import negativity
from qcorr.states import basis_state, from_name, haar_random_pure, make_rng, ncc_sigma
from qcorr.utils import Stopwatch
from qcorr.utils.parallel import parallel_map
from qcorr.witnesses.ncc import mv_dynamics, mv_zero_crossing, ncc_c_opt
from qcorr.witnesses.qubit_qutrit import detection_fraction_report
from qcorr.witnesses.sdp_witness import random_measurement_protocol

logger = logging.getLogger(__name__)

__all__ = ["TABLE_IDS", "DEFAULT_TOLERANCES", "reproduce", "reproduce_all"]

DEFAULT_SEED = 2019
DEFAULT_SAMPLES = 100000
MAPPING_SAMPLES = 20

DEFAULT_TOLERANCES = {
    "negTab": 1e-3,
    "result-table": 5e-3,
    "result-table-1": 5e-3,
    "table-ch5": 1e-3,
    "fig-fractions": 0.02,
    "mv-dynamics": 1e-6,
    "npa-verdicts": 0.0,
    "mapping-tables": 1e-9,
}

# Rows whose printed theory value differs from the computed one by more than the tolerance
DOCUMENTED_ROWS = {("table-ch5", "sigma_b2")}

_THREE_QUBIT_LABELS = {"GHZ": "ghz", "WWbar": "wwbar", "W": "w", "BS1": "bs1", "BS2": "bs2", "BS3": "bs3",
                       "Sep": "sep"}
_EXPECTED_CLASS = {"GHZ": EntanglementClass.ghz, "WWbar": EntanglementClass.ghz, "W": EntanglementClass.w,
                   "BS1": EntanglementClass.bs1, "BS2": EntanglementClass.bs2, "BS3": EntanglementClass.bs3,
                   "Sep": EntanglementClass.separable}


def _negtab_state(label: str):
    prefix, index = label[0], label[1:]
    return from_name({"B": "bell", "S": "s", "E": "e"}[prefix] + index)


def _breach(row: dict, tol: float, table_id: str, key: str = "state") -> bool:
    if (table_id, row.get(key)) in DOCUMENTED_ROWS:
        row["documented"] = True
        return False
    return any(abs(v) > tol for k, v in row.items() if k.endswith("delta"))


def _neg_tab(seed: int, tol: float, samples: int) -> Report:
    rows, breaches = [], []
    for fixture in load_fixture("negtab"):
        rho = _negtab_state(fixture["state"])
        computed = negativity(rho)
        witness = random_measurement_protocol(rho, seed=seed)
        row = {
            "state": fixture["state"],
            "theory": fixture["theory_negativity"],
            "computed": computed,
            "delta": computed - fixture["theory_negativity"],
            "min_ctm": witness.min_ctm,
            "detected": witness.detected,
            "rounds": witness.rounds,
        }
        rows.append(row)
        false_detection = witness.detected and fixture["theory_negativity"] == 0
        if _breach(row, tol, "negTab") or false_detection:
            breaches.append(row)
    return Report("reproduce", rows, "negTab", seed, tol, breaches)


def _result_table(seed: int, tol: float, samples: int) -> Report:
    columns = {"O": "XXX", "O1": "XXZ", "O2": "XZX", "O3": "ZXX"}
    rows, breaches = [], []
    for fixture in load_fixture("result_table"):
        psi = from_name(_THREE_QUBIT_LABELS[fixture["state"]])
        values = decision_observables(psi)
        verdict = classify_decision_table(psi)
        row = {"state": fixture["state"]}
        for name, word in columns.items():
            row[f"{name}_theory"] = fixture[f"{name}_theory"]
            row[f"{name}_computed"] = values[word]
            row[f"{name}_delta"] = values[word] - fixture[f"{name}_theory"]
        row["class"] = verdict.label.description
        row["class_ok"] = verdict.label == _EXPECTED_CLASS[fixture["state"]]
        rows.append(row)
        if _breach(row, tol, "result-table") or not row["class_ok"]:
            breaches.append(row)
    return Report("reproduce", rows, "result-table", seed, tol, breaches)


def _result_table_1(seed: int, tol: float, samples: int) -> Report:
    rows, breaches = [], []
    for fixture in load_fixture("result_table_1"):
        psi = from_name(_THREE_QUBIT_LABELS[fixture["state"]])
        computed = {"O": pauli_word("XXX").expectation(psi)}
        computed.update(zip(("G1", "G2", "G3"), concurrences(psi)))
        verdict = classify_general(psi)
        row = {"state": fixture["state"]}
        for name, value in computed.items():
            row[f"{name}_theory"] = fixture[f"{name}_theory"]
            row[f"{name}_computed"] = value
            row[f"{name}_delta"] = value - fixture[f"{name}_theory"]
        row["class"] = verdict.label.description
        row["class_ok"] = verdict.label == _EXPECTED_CLASS[fixture["state"]]
        rows.append(row)
        if _breach(row, tol, "result-table-1") or not row["class_ok"]:
            breaches.append(row)
    return Report("reproduce", rows, "result-table-1", seed, tol, breaches)


def _table_ch5(seed: int, tol: float, samples: int) -> Report:
    fixtures = load_fixture("table_ch5")
    reports = boundent.sweep([f["b"] for f in fixtures])
    rows, breaches = [], []
    for fixture, report in zip(fixtures, reports):
        row = {
            "state": fixture["state"],
            "b": fixture["b"],
            "theory": fixture["theory"],
            "computed": report.inequality_value,
            "delta": report.inequality_value - fixture["theory"],
            "closed_form": boundent.closed_form_value(fixture["b"]),
            "ppt": report.ppt,
            "bound_entangled": report.bound_entangled,
        }
        rows.append(row)
        if _breach(row, tol, "table-ch5") or not report.bound_entangled:
            breaches.append(row)
    return Report("reproduce", rows, "table-ch5", seed, tol, breaches)


_FRACTION_TARGETS = {1: 1 / 2, 2: 2 / 3, 3: 5 / 6, 4: 1.0}
"""Worst-case detected fraction by number of measured coefficients"""


def _fig_fractions(seed: int, tol: float, samples: int) -> Report:
    report = detection_fraction_report(samples, seed)
    rows, breaches = [], []
    for size, expected in _FRACTION_TARGETS.items():
        worst = report.worst(size)
        row = {
            "size": size,
            "subset": "+".join(worst.labels),
            "witness": worst.witness,
            "theory": expected,
            "computed": worst.fraction,
            "delta": worst.fraction - expected,
        }
        rows.append(row)
        if _breach(row, tol, "fig-fractions", "subset"):
            breaches.append(row)
    rows.extend(s.to_dict() for s in report.subsets)
    return Report("reproduce", rows, "fig-fractions", seed, tol, breaches)


def _mv_dynamics(seed: int, tol: float, samples: int) -> Report:
    c_opt = ncc_c_opt()
    lambdas = np.linspace(0.0, 1.0, 21)
    rows, breaches = [], []
    for point in mv_dynamics(ncc_sigma(), lambdas):
        theory = c_opt - 0.25 + point.lam / 8
        row = {**point.to_dict(), "theory": theory, "delta": point.mv - theory}
        rows.append(row)
        if _breach(row, tol, "mv-dynamics", "lambda"):
            breaches.append(row)
    crossing = mv_zero_crossing()
    row = {"lambda_star": crossing, "theory": 2 - 8 * c_opt, "delta": crossing - (2 - 8 * c_opt)}
    rows.append(row)
    if _breach(row, tol, "mv-dynamics", "lambda_star"):
        breaches.append(row)
    return Report("reproduce", rows, "mv-dynamics", seed, tol, breaches)


def _npa_case(case):
    name, moments, expected = case
    with Stopwatch() as stopwatch:
        report = npa.test_locality(moments, 3)
    logger.debug(f"NPA case {name} solved in {stopwatch.elapsed:.2f}s")
    return {
        "state": name,
        "expected": expected,
        "verdict": report.verdict,
        "t_star": report.t_star,
        "n_variables": report.matrix.n_variables,
        "n_active_variables": report.matrix.n_active_variables,
    }


def _npa_verdicts(seed: int, tol: float, samples: int) -> Report:
    cases = [
        ("W", npa.measured_moments(from_name("w"), npa.W_SETTINGS), "infeasible"),
        ("GHZ", npa.measured_moments(from_name("ghz"), npa.GHZ_SETTINGS), "infeasible"),
        ("product", npa.measured_moments(basis_state("000"), npa.W_SETTINGS), "feasible"),
        ("deterministic", npa.deterministic_moments([(1, 1)] * 3), "feasible"),
    ]
    rows = parallel_map(_npa_case, cases)
    breaches = [r for r in rows if r["verdict"] != r["expected"]]
    return Report("reproduce", rows, "npa-verdicts", seed, tol, breaches)


def _mapping_tables(seed: int, tol: float, samples: int) -> Report:
    rng = make_rng(seed)
    rows, breaches = [], []
    for n in (2, 3):
        states = [haar_random_pure(n, rng=rng) for _ in range(MAPPING_SAMPLES)]
        registry = default_registry(n)
        entries = list(registry.table_entries) + [e for e in registry if e.source == "synthesized"]
        for entry in entries:
            errors = [abs(entry.sign * entry.mapped_magnetization(s) - entry.observable.expectation(s))
                      for s in states]
            row = {"n_qubits": n, **entry.to_dict(), "gates": ".".join(entry.gates), "max_delta": max(errors)}
            rows.append(row)
            if _breach(row, tol, "mapping-tables", "label"):
                breaches.append(row)
    return Report("reproduce", rows, "mapping-tables", seed, tol, breaches)


_TABLES: Dict[str, Callable[[int, float, int], Report]] = {
    "negTab": _neg_tab,
    "result-table": _result_table,
    "result-table-1": _result_table_1,
    "table-ch5": _table_ch5,
    "fig-fractions": _fig_fractions,
    "mv-dynamics": _mv_dynamics,
    "npa-verdicts": _npa_verdicts,
    "mapping-tables": _mapping_tables,
}

TABLE_IDS = tuple(_TABLES)


def reproduce(table_id: str, seed: int = None, tol: float = None, samples: int = None) -> Report:
    """
    Recomputes one table

    :param table_id: One of :data:`TABLE_IDS`
    :param seed: Seed for randomized tables, a fixed default otherwise
    :param tol: Overrides the table's default tolerance
    :param samples: Monte Carlo samples for ``fig-fractions``
    :raises ConfigError: for unknown ids
    """
    if table_id not in _TABLES:
        raise ConfigError(f"Unknown table id '{table_id}', expected one of {', '.join(TABLE_IDS)} or 'all'")
    seed = DEFAULT_SEED if seed is None else seed
    tol = DEFAULT_TOLERANCES[table_id] if tol is None else tol
    samples = DEFAULT_SAMPLES if samples is None else samples
    with Stopwatch() as stopwatch:
        report = _TABLES[table_id](seed, tol, samples)
    level = logging.INFO if report.ok else logging.WARNING
    logger.log(level, f"{table_id}: {len(report.rows)} row(s), {len(report.breaches)} breach(es) "
                      f"in {stopwatch.elapsed:.2f}s")
    return report


def reproduce_all(seed: int = None, tol: float = None, samples: int = None) -> List[Report]:
    return [reproduce(table_id, seed, tol, samples) for table_id in TABLE_IDS]
