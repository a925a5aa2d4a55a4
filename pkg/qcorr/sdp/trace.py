from __future__ import annotations

import json
import logging
from typing import IO, List, Optional

from qcorr.sdp.solver import BarrierSolver, IterationEventArgs

logger = logging.getLogger(__name__)


class TraceWriter:
    """
    Base class for solver iteration traces. Instances are callables registered on
    :attr:`BarrierSolver.on_iteration <qcorr.sdp.solver.BarrierSolver.on_iteration>`
    """
    def __call__(self, sender: BarrierSolver, event_args: IterationEventArgs):
        self.write(event_args.to_dict())

    def write(self, record: dict):
        raise NotImplementedError

    def attach(self, solver: BarrierSolver):
        """
        Subscribes to the solver's iteration event, returning the subscription context
        """
        return solver.on_iteration.register(self)


class JsonLinesTraceWriter(TraceWriter):
    """
    Writes one JSON object per iteration to a text stream or file

    :param destination: An open text stream, or a filename which is opened lazily in append mode
    """
    def __init__(self, destination):
        self._stream: Optional[IO[str]] = None
        self._filename: Optional[str] = None
        if isinstance(destination, str):
            self._filename = destination
        else:
            self._stream = destination

    def write(self, record: dict):
        if self._stream is None:
            logger.info(f"Writing solver trace to {self._filename}")
            self._stream = open(self._filename, "a")
        self._stream.write(json.dumps(record) + "\n")

    def close(self):
        if self._filename and self._stream:
            self._stream.close()
            self._stream = None


class MemoryTraceWriter(TraceWriter):
    def __init__(self):
        self.records: List[dict] = []

    def write(self, record: dict):
        self.records.append(record)
