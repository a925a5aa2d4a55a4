from __future__ import annotations

from qcorr.cli.config import RunConfig
from qcorr.cli.main import main, run
from qcorr.cli.output import CsvOutputStrategy, JsonOutputStrategy, Report, strategy_for
from qcorr.cli.reproduce import TABLE_IDS, reproduce, reproduce_all
