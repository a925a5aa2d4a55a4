from __future__ import annotations

import csv
import io
import json
import logging
import sys
from importlib import resources
from typing import IO, List, Optional, Sequence, Union

import numpy as np

import qcorr
from qcorr.exceptions import ConfigError

logger = logging.getLogger(__name__)

__all__ = [
    "Report", "OutputStrategy", "JsonOutputStrategy", "CsvOutputStrategy", "strategy_for", "load_schema",
    "validate_report", "load_fixture",
]

_JSON_TYPES = {
    "object": dict,
    "array": list,
    "string": str,
    "integer": int,
    "number": (int, float),
    "boolean": bool,
    "null": type(None),
}


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


class Report:
    """
    Rows produced by one CLI command, plus the metadata every output format carries

    :param command: Subcommand name
    :param rows: One dict per output row
    :param table_id: Reproduced table id, if any
    :param seed: Seed used, if any
    :param tol: Tolerance used, if any
    :param breaches: Rows whose delta exceeded the tolerance
    """
    def __init__(self, command: str, rows: Sequence[dict], table_id: str = None, seed: int = None,
                 tol: float = None, breaches: Sequence[dict] = ()):
        self.command = command
        self.rows = [_plain(r) for r in rows]
        self.table_id = table_id
        self.seed = seed
        self.tol = tol
        self.breaches = [_plain(b) for b in breaches]

    @property
    def ok(self) -> bool:
        return not self.breaches

    def to_dict(self):
        return {
            "qcorr_version": qcorr.__version__,
            "command": self.command,
            "table_id": self.table_id,
            "rows": self.rows,
            "meta": {"seed": self.seed, "tol": self.tol, "breaches": self.breaches},
        }


class OutputStrategy:
    """
    Abstract base class for writing reports in a given format
    """
    @property
    def file_extension(self) -> str:
        """
        The file extension this strategy writes
        """
        raise NotImplementedError

    def write(self, destination: Union[str, IO, None], report: Report):
        """
        Writes the report

        :param destination: A filename, an open text stream, or None for stdout
        :param report: The report to write
        """
        if destination is None:
            self._write(sys.stdout, report)
        elif isinstance(destination, str):
            logger.info(f"Writing {report.command} report to {destination}")
            with open(destination, "w", newline="") as f:
                self._write(f, report)
        else:
            self._write(destination, report)

    def dumps(self, report: Report) -> str:
        buf = io.StringIO()
        self._write(buf, report)
        return buf.getvalue()

    def _write(self, stream: IO, report: Report):
        raise NotImplementedError


class JsonOutputStrategy(OutputStrategy):
    """
    Strategy for writing reports as a single JSON document matching the shipped report schema
    """
    @property
    def file_extension(self) -> str:
        return ".json"

    def _write(self, stream: IO, report: Report):
        data = report.to_dict()
        validate_report(data)
        json.dump(data, stream, indent=2)
        stream.write("\n")


class CsvOutputStrategy(OutputStrategy):
    """
    Strategy for writing report rows as CSV. Nested values are written as JSON text
    """
    @property
    def file_extension(self) -> str:
        return ".csv"

    def _write(self, stream: IO, report: Report):
        columns: List[str] = []
        for row in report.rows:
            columns.extend(k for k in row if k not in columns)
        writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in report.rows:
            writer.writerow({k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in row.items()})


_STRATEGIES = {"json": JsonOutputStrategy, "csv": CsvOutputStrategy}


def strategy_for(fmt: str) -> OutputStrategy:
    try:
        return _STRATEGIES[fmt.lower()]()
    except KeyError:
        raise ConfigError(f"Unknown output format '{fmt}', expected one of {sorted(_STRATEGIES)}")


def _data_text(name: str) -> str:
    return resources.files("qcorr.data").joinpath(name).read_text()


def load_schema() -> dict:
    return json.loads(_data_text("report.schema.json"))


def _check_type(value, expected: Union[str, List[str]], path: str):
    expected = [expected] if isinstance(expected, str) else expected
    for name in expected:
        py_type = _JSON_TYPES[name]
        # bool is an int subclass
        if name in ("integer", "number") and isinstance(value, bool):
            continue
        if isinstance(value, py_type):
            return
    raise ConfigError(f"Report field {path} has type {type(value).__name__}, expected {'/'.join(expected)}")


def _validate(value, schema: dict, path: str):
    if "type" in schema:
        _check_type(value, schema["type"], path)
    if isinstance(value, dict):
        for key in schema.get("required", []):
            if key not in value:
                raise ConfigError(f"Report is missing required field {path}.{key}")
        for key, sub in schema.get("properties", {}).items():
            if key in value:
                _validate(value[key], sub, f"{path}.{key}")
    if isinstance(value, list) and "items" in schema:
        for i, item in enumerate(value):
            _validate(item, schema["items"], f"{path}[{i}]")


def validate_report(data: dict, schema: Optional[dict] = None):
    """
    Structural check of a report against the shipped schema: required keys and JSON types only

    :raises ConfigError: on the first violation
    """
    _validate(data, schema or load_schema(), "$")


def load_fixture(name: str) -> List[dict]:
    """
    Rows of a shipped table fixture, numeric columns converted to float

    :param name: Fixture basename without extension, e.g. ``"table_ch5"``
    """
    rows = []
    for row in csv.DictReader(io.StringIO(_data_text(f"{name}.csv"))):
        parsed = {}
        for k, v in row.items():
            try:
                parsed[k] = float(v)
            except ValueError:
                parsed[k] = v
        rows.append(parsed)
    return rows
