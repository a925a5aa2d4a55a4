from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import traceback
from typing import List, Optional, Sequence

import qcorr
from qcorr import boundent, npa
from qcorr.circuits.mapping import default_registry, expectation_via_mapping
from qcorr.circuits.observables import ProductObservable, pauli_word
from qcorr.classify3q import DEFAULT_TOL, classify_decision_table, classify_general, classify_random
from qcorr.cli.config import RunConfig
from qcorr.cli.output import Report, strategy_for
from qcorr.cli.reproduce import TABLE_IDS, reproduce, reproduce_all
from qcorr.exceptions import ConfigError, QcorrException
from qcorr.linalg import to_density
from qcorr.measures.discord import discord
from qcorr.measures.entanglement import ccnr, negativity, ppt_check, von_neumann_entropy
from qcorr.states import catalog_names, dephase, ncc_sigma
from qcorr.utils import setup_logger
from qcorr.witnesses.ncc import ncc_c_opt, ncc_circuit_magnetizations, ncc_map_from_magnetizations, ncc_map_value
from qcorr.witnesses.sdp_witness import DETECTION_TOL, random_measurement_protocol, witness_sdp

logger = logging.getLogger(__name__)

__all__ = ["EXIT_OK", "EXIT_ERROR", "EXIT_TOLERANCE", "build_parser", "run", "main"]

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TOLERANCE = 2


def _cmd_state(cfg: RunConfig) -> Report:
    if cfg.extra.get("list"):
        return Report("state", [{"name": name} for name in catalog_names()])
    rho = to_density(cfg.load_state())
    row = {"state": cfg.state_label, "dims": list(rho.dims), "purity": rho.purity(), "matrix": rho.to_dict()}
    return Report("state", [row], seed=cfg.seed)


def _cmd_measure(cfg: RunConfig) -> Report:
    state = cfg.load_state()
    rho = to_density(state)
    ppt, min_eig = ppt_check(rho)
    ccnr_sum, ccnr_flag = ccnr(rho)
    row = {
        "state": cfg.state_label,
        "dims": list(rho.dims),
        "purity": rho.purity(),
        "entropy_bits": von_neumann_entropy(rho),
        "negativity": negativity(rho),
        "ppt": ppt,
        "ppt_min_eig": min_eig,
        "ccnr": ccnr_sum,
        "ccnr_entangled": ccnr_flag,
    }
    if rho.dims == (2, 2):
        row["discord_A"] = discord(rho, side="A").discord
        row["discord_B"] = discord(rho, side="B").discord
    if rho.dims == (2, 2, 2) and abs(rho.purity() - 1) < 1e-9:
        verdict = classify_general(rho)
        row.update(verdict.evidence)
        row["class"] = verdict.label.description
    return Report("measure", [row], seed=cfg.seed)


def _cmd_witness(cfg: RunConfig) -> Report:
    rho = to_density(cfg.load_state())
    tol = DETECTION_TOL if cfg.tol is None else cfg.tol
    if cfg.extra.get("ops"):
        words = [o.strip() for o in cfg.extra["ops"].split(",")]
        ops = [ProductObservable(w.split(".") if "." in w else w) for w in words]
        report = witness_sdp(ops, [o.expectation(rho) for o in ops], tol=tol)
    else:
        report = random_measurement_protocol(rho, seed=cfg.seed, max_rounds=cfg.extra.get("max_rounds", 8),
                                             correlation_first=not cfg.extra.get("random_only", False), tol=tol)
    row = {
        "state": cfg.state_label,
        "min_ctm": report.min_ctm,
        "detected": report.detected,
        "rounds": report.rounds,
        "operators": [o.labels for o in report.operators],
        "coeffs": report.coeffs,
        "witness_value": report.witness_value(rho),
    }
    return Report("witness", [row], seed=cfg.seed, tol=tol)


def _cmd_ncc(cfg: RunConfig) -> Report:
    rho0 = cfg.load_state() if cfg.n_state_sources else ncc_sigma()
    qubit = cfg.extra.get("qubit", 1)
    lambdas = [cfg.lam] if cfg.lam is not None else boundent.parse_sweep(cfg.extra.get("lambdas") or "0:1:0.05")
    c_opt = ncc_c_opt()
    rows = []
    for lam in lambdas:
        rho = dephase(rho0, qubit, lam)
        z1, z2, z2p = ncc_circuit_magnetizations(rho)
        rows.append({
            "lambda": lam,
            "mv": ncc_map_value(rho, c_opt),
            "mv_circuit": ncc_map_from_magnetizations(z1, z2, z2p, c_opt),
            "z1": z1,
            "z2": z2,
            "z2_prime": z2p,
            "discord_B": discord(rho, side="B").discord,
        })
    return Report("ncc", rows, seed=cfg.seed)


def _cmd_classify(cfg: RunConfig) -> Report:
    tol = DEFAULT_TOL if cfg.tol is None else cfg.tol
    if cfg.random is not None and cfg.state is None and cfg.state_file is None:
        rows = []
        for params, by_table, by_concurrence in classify_random(cfg.random, cfg.seed, tol):
            rows.append({
                **params.to_dict(),
                "decision_table": by_table.label.description,
                "concurrence": by_concurrence.label.description,
                "agree": by_table.label == by_concurrence.label,
                **{k: v for k, v in by_table.evidence.items()},
                **{k: v for k, v in by_concurrence.evidence.items() if k != "XXX"},
            })
        return Report("classify", rows, seed=cfg.seed, tol=tol)
    psi = cfg.load_state()
    rows = [{"state": cfg.state_label, **v.to_dict()}
            for v in (classify_decision_table(psi, tol), classify_general(psi, tol))]
    return Report("classify", rows, seed=cfg.seed, tol=tol)


def _cmd_boundent(cfg: RunConfig) -> Report:
    if cfg.extra.get("threshold"):
        return Report("boundent", [{"threshold": boundent.detection_threshold()}])
    if (cfg.b is None) == (cfg.extra.get("sweep") is None):
        raise ConfigError("Give exactly one of --b and --sweep")
    bs = [cfg.b] if cfg.b is not None else boundent.parse_sweep(cfg.extra["sweep"])
    return Report("boundent", [r.to_dict() for r in boundent.sweep(bs)])


def _npa_settings(name: str):
    if name in npa.SETTINGS:
        return npa.SETTINGS[name]
    try:
        with open(name, "r") as f:
            return npa.settings_from_dict(json.load(f))
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"Settings must be one of {sorted(npa.SETTINGS)} or a JSON file: {e}")


def _cmd_npa(cfg: RunConfig) -> Report:
    rho = to_density(cfg.load_state())
    settings = _npa_settings(cfg.extra.get("settings", "w"))
    moments = npa.measured_moments(rho, settings)
    report = npa.test_locality(moments, rho.n_subsystems, full_body=not cfg.extra.get("no_full_body", False))
    return Report("npa", [{"state": cfg.state_label, **report.to_dict()}], seed=cfg.seed)


def _cmd_mapping(cfg: RunConfig) -> Report:
    n = cfg.extra.get("qubits", 3)
    registry = default_registry(n)
    word = cfg.extra.get("word")
    if word:
        rho = cfg.load_state()
        entry = registry.lookup(pauli_word(word))
        value = expectation_via_mapping(rho, pauli_word(word), registry, verify=True)
        return Report("mapping", [{**entry.to_dict(), "state": cfg.state_label, "expectation": value}])
    entries = list(registry.table_entries) + [e for e in registry if e.source == "synthesized"]
    return Report("mapping", [{"n_qubits": n, **e.to_dict()} for e in entries])


def _cmd_reproduce(cfg: RunConfig) -> List[Report]:
    table_id = cfg.extra["table_id"]
    if table_id == "all":
        return reproduce_all(cfg.seed, cfg.tol, cfg.samples)
    return [reproduce(table_id, cfg.seed, cfg.tol, cfg.samples)]


_COMMANDS = {
    "state": _cmd_state,
    "measure": _cmd_measure,
    "witness": _cmd_witness,
    "ncc": _cmd_ncc,
    "classify": _cmd_classify,
    "boundent": _cmd_boundent,
    "npa": _cmd_npa,
    "mapping": _cmd_mapping,
    "reproduce": _cmd_reproduce,
}


def _add_state_args(p: argparse.ArgumentParser):
    src = p.add_argument_group("state source (exactly one)")
    src.add_argument("--state", help="Catalog state name, see 'state --list'")
    src.add_argument("--state-file", help="JSON state file")
    src.add_argument("--random", type=int, help="Haar-random pure state on this many qubits")
    p.add_argument("--b", type=float, help="Parameter of the 'horodecki' family")
    p.add_argument("--alpha", type=float, help="alpha of the 'qubit_qutrit' family")
    p.add_argument("--gamma", type=float, help="gamma of the 'qubit_qutrit' family")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="64-bit seed")
    common.add_argument("--tol", type=float, help="Override the default tolerance")
    common.add_argument("--format", choices=("csv", "json"), default="json", help="Output format")
    common.add_argument("--out", help="Output file (a directory for 'reproduce all'), stdout by default")
    common.add_argument("--log-level", default="WARNING", help="Logging level (default WARNING)")
    common.add_argument("-v", "--verbose", action="store_true", help="Shorthand for --log-level DEBUG")

    parser = argparse.ArgumentParser(prog="qcorr", description="Quantum correlation detection toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {qcorr.__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", parents=[common], help="Print a state's density matrix")
    _add_state_args(p)
    p.add_argument("--list", action="store_true", help="List catalog state names")

    p = sub.add_parser("measure", parents=[common], help="Entanglement and discord measures of a state")
    _add_state_args(p)

    p = sub.add_parser("witness", parents=[common], help="Witness SDP from local measurements")
    _add_state_args(p)
    p.add_argument("--ops", help="Comma separated product observables, e.g. XX,YY,ZZ")
    p.add_argument("--max-rounds", type=int, default=8)
    p.add_argument("--random-only", action="store_true", help="Skip the correlation operators")

    p = sub.add_parser("ncc", parents=[common], help="Nonclassicality map along a dephasing sweep")
    _add_state_args(p)
    p.add_argument("--lam", type=float, help="Single dephasing strength")
    p.add_argument("--lambdas", help="Sweep start:stop:step (default 0:1:0.05)")
    p.add_argument("--qubit", type=int, default=1, help="0-based dephased qubit")

    p = sub.add_parser("classify", parents=[common], help="Three-qubit pure-state classification")
    _add_state_args(p)

    p = sub.add_parser("boundent", parents=[common], help="Bound-entanglement inequality")
    p.add_argument("--b", type=float)
    p.add_argument("--sweep", help="start:stop:step, stop inclusive")
    p.add_argument("--threshold", action="store_true", help="Root of the inequality value at 1")

    p = sub.add_parser("npa", parents=[common], help="Level-2 locality feasibility test")
    _add_state_args(p)
    p.add_argument("--settings", default="w", help="'w', 'ghz' or a JSON file of Pauli coefficients")
    p.add_argument("--no-full-body", action="store_true", help="Leave three-body correlators free")

    p = sub.add_parser("mapping", parents=[common], help="Dump the observable-to-magnetization mappings")
    _add_state_args(p)
    p.add_argument("--qubits", type=int, choices=(2, 3), default=3)
    p.add_argument("--word", help="Measure this Pauli word on the given state through its mapping")

    p = sub.add_parser("reproduce", parents=[common], help="Recompute a published table")
    p.add_argument("table_id", choices=TABLE_IDS + ("all",))
    p.add_argument("--samples", type=int, help="Monte Carlo samples for fig-fractions")
    return parser


def _module_tag(exc: BaseException) -> str:
    tag = "cli"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        name = frame.f_globals.get("__name__", "")
        parts = name.split(".")
        if parts[0] == "qcorr" and len(parts) > 1 and parts[1] != "cli":
            tag = parts[1]
    return tag


def run(cfg: RunConfig) -> List[Report]:
    """Dispatches one parsed invocation and returns its report(s)"""
    logger.debug(f"Running {cfg!r}")
    reports = _COMMANDS[cfg.command](cfg)
    return reports if isinstance(reports, list) else [reports]


def _write(cfg: RunConfig, reports: Sequence[Report]):
    strategy = strategy_for(cfg.fmt)
    if len(reports) == 1:
        strategy.write(cfg.out, reports[0])
        return
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        for r in reports:
            strategy.write(os.path.join(cfg.out, f"{r.table_id}{strategy.file_extension}"), r)
    summary = [{"table_id": r.table_id, "rows": len(r.rows), "breaches": len(r.breaches), "ok": r.ok}
               for r in reports]
    strategy.write(None, Report(cfg.command, summary, "all", cfg.seed, cfg.tol,
                                [s for s in summary if not s["ok"]]))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger("qcorr", "DEBUG" if args.verbose else args.log_level.upper())
    try:
        cfg = RunConfig.from_namespace(args)
        reports = run(cfg)
        _write(cfg, reports)
    except QcorrException as e:
        print(f"[{_module_tag(e)}] {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.exception("Unexpected error")
        print(f"[{_module_tag(e)}] {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    if any(not r.ok for r in reports):
        return EXIT_TOLERANCE
    return EXIT_OK
