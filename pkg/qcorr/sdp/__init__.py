from __future__ import annotations

from qcorr.sdp.problem import (
    AffineReparameterization, FeasibilityResult, FeasibilityVerdict, LMIBlock, LMIProblem, SDPSolution,
    SolverOptions, SolveStatus
)
from qcorr.sdp.solver import BarrierSolver, IterationEventArgs, feasibility, require_optimal, solve
from qcorr.sdp.trace import JsonLinesTraceWriter, MemoryTraceWriter, TraceWriter
